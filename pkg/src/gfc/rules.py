"""The catalogue of sound local rewrites.

Each rule names one equation between two small terms built from the
basic cells.  A rule carries the metavariables it abstracts over, the
side conditions those bindings must satisfy, a builder that turns a
binding into the (lhs, rhs) pair of terms, and a sampler that draws a
fresh random binding.  Soundness of every rule is checked against the
finite evaluation backend, never assumed.
"""

from __future__ import annotations

from .sgf import Sgf, lower, upper
from .sgnt import BasicCell, SgntTerm, counit_expand, make_bc, rna
from .spaces import Session
from .rewrite import _commute_comp_past_bc, _commute_triv_past, _steps_term


class RewriteRule:
    """One oriented equation with morphism metavariables."""

    __slots__ = ("name", "vars", "side_conditions", "build", "sample")

    def __init__(self, name, vars, side_conditions, build, sample):
        self.name = name
        self.vars = vars
        self.side_conditions = side_conditions
        self.build = build
        self.sample = sample

    def instantiate(self, session, **binding):
        return self.build(session, **binding)

    def __repr__(self):
        return "RewriteRule(%s)" % self.name


def _cell(c, left=None, right=None):
    return SgntTerm.of_cell(c, left=left, right=right)


def _w(s, *terms):
    return Sgf(s, terms)


# ----------------------------------------------------------------------
# samplers.  Maps are drawn as short chains or cospans; with small
# probability a link degenerates to an identity so the rules get
# exercised at their boundary instances as well.


def _chain(rng, names):
    """Composable maps m1: X1 -> X0, m2: X2 -> X1, ..."""
    s = Session()
    spaces = [s.declare_space("X0")]
    out = {}
    for i, name in enumerate(names):
        if rng.random() < 0.2:
            out[name] = s.identity(spaces[-1])
            spaces.append(spaces[-1])
        else:
            nxt = s.declare_space("X%d" % (i + 1))
            out[name] = s.declare_map(name, nxt, spaces[-1])
            spaces.append(nxt)
    return s, out


def _sample_map(names):
    def sample(rng):
        return _chain(rng, names)
    return sample


def _sample_space(rng):
    s = Session()
    return s, {"x": s.declare_space("X")}


def _sample_cospan(rng):
    s = Session()
    y = s.declare_space("Y")
    if rng.random() < 0.2:
        f = s.identity(y)
    else:
        f = s.declare_map("f", s.declare_space("X"), y)
    if rng.random() < 0.2:
        g = s.identity(y)
    else:
        g = s.declare_map("g", s.declare_space("Z"), y)
    return s, {"f": f, "g": g}


# ----------------------------------------------------------------------
# adjunction triangles


def _b_triangle_lower(s, f):
    fl = _w(s, lower(f))
    lhs = _cell(BasicCell.unit(f), right=fl).then(
        _cell(BasicCell.counit(f), left=fl))
    return lhs, SgntTerm.identity(fl)


def _b_triangle_upper(s, f):
    fu = _w(s, upper(f))
    lhs = _cell(BasicCell.unit(f), left=fu).then(
        _cell(BasicCell.counit(f), right=fu))
    return lhs, SgntTerm.identity(fu)


# ----------------------------------------------------------------------
# free inverses


def _inverse_pair(make):
    def retraction(s, **kw):
        t = _cell(make(s, **kw))
        return t.then(t.inverse()), SgntTerm.identity(t.src)

    def section(s, **kw):
        t = _cell(make(s, **kw))
        return t.inverse().then(t), SgntTerm.identity(t.dst)

    return retraction, section


_comp_lower_r, _comp_lower_s = _inverse_pair(
    lambda s, f, g: BasicCell.comp_lower(f, g))
_comp_upper_r, _comp_upper_s = _inverse_pair(
    lambda s, f, g: BasicCell.comp_upper(f, g))
_triv_lower_r, _triv_lower_s = _inverse_pair(
    lambda s, x: BasicCell.triv_lower(s, x))
_triv_upper_r, _triv_upper_s = _inverse_pair(
    lambda s, x: BasicCell.triv_upper(s, x))


# ----------------------------------------------------------------------
# composition coherence


def _b_assoc_lower(s, f, g, h):
    # word [h_*, g_*, f_*], f applied first
    word = _w(s, lower(h), lower(g), lower(f))
    lhs = _cell(BasicCell.comp_lower(g, h), right=_w(s, lower(f))).then(
        _cell(BasicCell.comp_lower(f, g.then(h))))
    rhs = _cell(BasicCell.comp_lower(f, g), left=_w(s, lower(h))).then(
        _cell(BasicCell.comp_lower(f.then(g), h)))
    assert lhs.src == word and rhs.src == word
    return lhs, rhs


def _b_assoc_upper(s, f, g, h):
    word = _w(s, upper(f), upper(g), upper(h))
    lhs = _cell(BasicCell.comp_upper(f, g), right=_w(s, upper(h))).then(
        _cell(BasicCell.comp_upper(f.then(g), h)))
    rhs = _cell(BasicCell.comp_upper(g, h), left=_w(s, upper(f))).then(
        _cell(BasicCell.comp_upper(f, g.then(h))))
    assert lhs.src == word and rhs.src == word
    return lhs, rhs


def _b_comp_lower_id_left(s, f):
    i = s.identity(f.dst)
    lhs = _cell(BasicCell.comp_lower(f, i))
    rhs = _cell(BasicCell.triv_lower(s, f.dst), right=_w(s, lower(f)))
    return lhs, rhs


def _b_comp_lower_id_right(s, f):
    i = s.identity(f.src)
    lhs = _cell(BasicCell.comp_lower(i, f))
    rhs = _cell(BasicCell.triv_lower(s, f.src), left=_w(s, lower(f)))
    return lhs, rhs


def _b_comp_upper_id_left(s, f):
    i = s.identity(f.src)
    lhs = _cell(BasicCell.comp_upper(i, f))
    rhs = _cell(BasicCell.triv_upper(s, f.src), right=_w(s, upper(f)))
    return lhs, rhs


def _b_comp_upper_id_right(s, f):
    i = s.identity(f.dst)
    lhs = _cell(BasicCell.comp_upper(f, i))
    rhs = _cell(BasicCell.triv_upper(s, f.dst), left=_w(s, upper(f)))
    return lhs, rhs


# ----------------------------------------------------------------------
# units and counits of identities and composites


def _b_unit_identity(s, x):
    i = s.identity(x)
    lhs = _cell(BasicCell.unit(i))
    rhs = _cell(BasicCell.triv_upper(s, x).inverse()).then(
        _cell(BasicCell.triv_lower(s, x).inverse(), right=_w(s, upper(i))))
    return lhs, rhs


def _b_counit_identity(s, x):
    i = s.identity(x)
    lhs = _cell(BasicCell.counit(i))
    rhs = _cell(BasicCell.triv_upper(s, x), right=_w(s, lower(i))).then(
        _cell(BasicCell.triv_lower(s, x)))
    return lhs, rhs


def _b_unit_composite(s, f, g):
    c = f.then(g)
    gl, gu = _w(s, lower(g)), _w(s, upper(g))
    lhs = _cell(BasicCell.unit(c))
    rhs = _cell(BasicCell.unit(g)).then(
        _cell(BasicCell.unit(f), left=gl, right=gu)).then(
        _cell(BasicCell.comp_lower(f, g), right=_w(s, upper(f), upper(g)))).then(
        _cell(BasicCell.comp_upper(f, g), left=_w(s, lower(c))))
    return lhs, rhs


def _b_counit_composite(s, f, g):
    c = f.then(g)
    lhs = _cell(BasicCell.counit(c))
    rhs = _cell(BasicCell.comp_upper(f, g).inverse(),
                right=_w(s, lower(c))).then(
        _cell(BasicCell.comp_lower(f, g).inverse(),
              left=_w(s, upper(f), upper(g)))).then(
        _cell(BasicCell.counit(g), left=_w(s, upper(f)),
              right=_w(s, lower(f)))).then(
        _cell(BasicCell.counit(f)))
    return lhs, rhs


def _b_mixed_counit_composite(s, f, g):
    c = f.then(g)
    lhs = _cell(BasicCell.comp_lower(f, g), left=_w(s, upper(c))).then(
        _cell(BasicCell.counit(c)))
    rhs = _cell(BasicCell.comp_upper(f, g).inverse(),
                right=_w(s, lower(g), lower(f))).then(
        _cell(BasicCell.counit(g), left=_w(s, upper(f)),
              right=_w(s, lower(f)))).then(
        _cell(BasicCell.counit(f)))
    return lhs, rhs


def _b_mixed_unit_composite(s, f, g):
    c = f.then(g)
    lhs = _cell(BasicCell.unit(c)).then(
        _cell(BasicCell.comp_lower(f, g).inverse(), right=_w(s, upper(c))))
    rhs = _cell(BasicCell.unit(g)).then(
        _cell(BasicCell.unit(f), left=_w(s, lower(g)),
              right=_w(s, upper(g)))).then(
        _cell(BasicCell.comp_upper(f, g), left=_w(s, lower(g), lower(f))))
    return lhs, rhs


# ----------------------------------------------------------------------
# refactorisations of composites


def _b_frobenius_lower_left(s, f, l, k):
    g, h = k.then(l), l.then(f)
    lhs = _cell(BasicCell.comp_lower(g, f)).then(
        _cell(BasicCell.comp_lower(k, h).inverse()))
    rhs = _cell(BasicCell.comp_lower(k, l).inverse(),
                left=_w(s, lower(f))).then(
        _cell(BasicCell.comp_lower(l, f), right=_w(s, lower(k))))
    return lhs, rhs


def _b_frobenius_lower_right(s, h, l, g):
    f, k = l.then(h), g.then(l)
    lhs = _cell(BasicCell.comp_lower(g, f)).then(
        _cell(BasicCell.comp_lower(k, h).inverse()))
    rhs = _cell(BasicCell.comp_lower(l, h).inverse(),
                right=_w(s, lower(g))).then(
        _cell(BasicCell.comp_lower(g, l), left=_w(s, lower(h))))
    return lhs, rhs


def _b_frobenius_upper_left(s, f, l, k):
    g, h = k.then(l), l.then(f)
    lhs = _cell(BasicCell.comp_upper(g, f)).then(
        _cell(BasicCell.comp_upper(k, h).inverse()))
    rhs = _cell(BasicCell.comp_upper(k, l).inverse(),
                right=_w(s, upper(f))).then(
        _cell(BasicCell.comp_upper(l, f), left=_w(s, upper(k))))
    return lhs, rhs


def _b_frobenius_upper_right(s, h, l, g):
    f, k = l.then(h), g.then(l)
    lhs = _cell(BasicCell.comp_upper(g, f)).then(
        _cell(BasicCell.comp_upper(k, h).inverse()))
    rhs = _cell(BasicCell.comp_upper(l, h).inverse(),
                left=_w(s, upper(g))).then(
        _cell(BasicCell.comp_upper(g, l), right=_w(s, upper(h))))
    return lhs, rhs


def _b_loop_lower(s, f, l, k):
    g, h = k.then(l), l.then(f)
    lhs = _cell(BasicCell.comp_lower(k, h).inverse())
    rhs = _cell(BasicCell.comp_lower(g, f).inverse()).then(
        _cell(BasicCell.comp_lower(k, l).inverse(),
              left=_w(s, lower(f)))).then(
        _cell(BasicCell.comp_lower(l, f), right=_w(s, lower(k))))
    return lhs, rhs


def _b_loop_upper(s, f, l, k):
    g, h = k.then(l), l.then(f)
    lhs = _cell(BasicCell.comp_upper(k, h).inverse())
    rhs = _cell(BasicCell.comp_upper(g, f).inverse()).then(
        _cell(BasicCell.comp_upper(k, l).inverse(),
              right=_w(s, upper(f)))).then(
        _cell(BasicCell.comp_upper(l, f), left=_w(s, upper(k))))
    return lhs, rhs


# ----------------------------------------------------------------------
# degenerate base changes


def _b_bc_identity_lower(s, f):
    i = s.identity(f.dst)
    sq = s.pullback(i, f)
    lhs = _cell(BasicCell.bc(s, sq))
    rhs = _cell(BasicCell.triv_lower(s, f.dst), left=_w(s, upper(f))).then(
        _cell(BasicCell.triv_lower(s, f.src).inverse(),
              right=_w(s, upper(f))))
    return lhs, rhs


def _b_bc_identity_upper(s, f):
    i = s.identity(f.dst)
    sq = s.pullback(f, i)
    lhs = _cell(BasicCell.bc(s, sq))
    rhs = _cell(BasicCell.triv_upper(s, f.dst), right=_w(s, lower(f))).then(
        _cell(BasicCell.triv_upper(s, f.src).inverse(),
              left=_w(s, lower(f))))
    return lhs, rhs


def _b_bc_fold(s, f, g):
    sq = s.pullback(f, g)
    return _cell(BasicCell.bc(s, sq)), make_bc(s, sq)


def _b_counit_expansion(s, f):
    return _cell(BasicCell.counit(f)), counit_expand(s, f)


# ----------------------------------------------------------------------
# commutations: the exact local moves the ordering passes make


def _b_commute_triv_comp(s, u, v, low_pair, low_id):
    if low_pair:
        mid = u.src
        letters = (lower(u), lower(v))
        comp = BasicCell.comp_lower(v, u)
    else:
        mid = u.dst
        letters = (upper(u), upper(v))
        comp = BasicCell.comp_upper(u, v)
    tcell = (BasicCell.triv_lower(s, mid) if low_id
             else BasicCell.triv_upper(s, mid))
    lhs = _cell(tcell, left=_w(s, letters[0]),
                right=_w(s, letters[1])).then(_cell(comp))
    steps = _commute_triv_past(lhs.layers[0], lhs.layers[1])
    return lhs, _steps_term(s, lhs.src, steps)[1]


def _sample_commute_triv_comp(rng):
    s = Session()
    low_pair = rng.random() < 0.5
    a = s.declare_space("A")
    m = s.declare_space("M")
    c = s.declare_space("C")
    if low_pair:
        binding = {"u": s.declare_map("u", m, c),
                   "v": s.declare_map("v", a, m)}
    else:
        binding = {"u": s.declare_map("u", a, m),
                   "v": s.declare_map("v", m, c)}
    binding["low_pair"] = low_pair
    binding["low_id"] = rng.random() < 0.5
    return s, binding


def _b_commute_triv_bc(s, f, g, low_id):
    y = f.dst
    tcell = (BasicCell.triv_lower(s, y) if low_id
             else BasicCell.triv_upper(s, y))
    lhs = _cell(tcell, left=_w(s, upper(g)), right=_w(s, lower(f))).then(
        _cell(BasicCell.bc(s, s.pullback(f, g))))
    steps = _commute_triv_past(lhs.layers[0], lhs.layers[1])
    return lhs, _steps_term(s, lhs.src, steps)[1]


def _sample_commute_triv_bc(rng):
    s, binding = _sample_cospan(rng)
    binding["low_id"] = rng.random() < 0.5
    return s, binding


def _b_commute_comp_bc(s, a, b, c, low_comp):
    if low_comp:
        # [c^*, a_*, b_*]: merge the direct images, then swap past c^*
        lhs = _cell(BasicCell.comp_lower(b, a), left=_w(s, upper(c))).then(
            _cell(BasicCell.bc(s, s.pullback(b.then(a), c))))
    else:
        # [a^*, b^*, c_*]: merge the inverse images, then swap past c_*
        lhs = _cell(BasicCell.comp_upper(a, b), right=_w(s, lower(c))).then(
            _cell(BasicCell.bc(s, s.pullback(c, a.then(b)))))
    steps = _commute_comp_past_bc(lhs.layers[0], lhs.layers[1])
    return lhs, _steps_term(s, lhs.src, steps)[1]


def _sample_commute_comp_bc(rng):
    s = Session()
    low_comp = rng.random() < 0.5
    t = s.declare_space("T")
    m = s.declare_space("M")
    e = s.declare_space("E")
    if low_comp:
        binding = {"a": s.declare_map("a", m, t),
                   "b": s.declare_map("b", e, m),
                   "c": s.declare_map("c", s.declare_space("Z"), t)}
    else:
        binding = {"a": s.declare_map("a", e, m),
                   "b": s.declare_map("b", m, t),
                   "c": s.declare_map("c", s.declare_space("Z"), t)}
    binding["low_comp"] = low_comp
    return s, binding


def _b_interchange(s, a, b, c, d, mixed):
    if mixed:
        word = _w(s, lower(a), lower(b), upper(c), upper(d))
        one = [("comp", 0, True), ("comp", 1, False)]
        two = [("comp", 2, False), ("comp", 0, True)]
    else:
        word = _w(s, lower(a), lower(b), lower(c), lower(d))
        one = [("comp", 0, True), ("comp", 1, True)]
        two = [("comp", 2, True), ("comp", 0, True)]
    return _steps_term(s, word, one)[1], _steps_term(s, word, two)[1]


def _sample_interchange(rng):
    s = Session()
    mixed = rng.random() < 0.5
    spaces = [s.declare_space("S%d" % i) for i in range(5)]
    binding = {"a": s.declare_map("a", spaces[1], spaces[0]),
               "b": s.declare_map("b", spaces[2], spaces[1]),
               "mixed": mixed}
    if mixed:
        # the upper pair reads [c^*, d^*], so c leaves the lower pair's source
        binding["c"] = s.declare_map("c", spaces[2], spaces[3])
        binding["d"] = s.declare_map("d", spaces[3], spaces[4])
    else:
        binding["c"] = s.declare_map("c", spaces[3], spaces[2])
        binding["d"] = s.declare_map("d", spaces[4], spaces[3])
    return s, binding


def _b_rna_forward_roundtrip(s, f, g):
    phi = _cell(BasicCell.comp_lower(f, g))
    return phi, rna(rna(phi, f, "fwd"), f, "bwd")


def _b_rna_backward_roundtrip(s, f):
    psi = _cell(BasicCell.unit(f))
    return psi, rna(rna(psi, f, "bwd"), f, "fwd")


# ----------------------------------------------------------------------


def rule_catalogue():
    """All named local equations, each with its sampler."""
    comp_side = ("dst f = src g",)
    chain2 = _sample_map(["g", "f"])
    chain3 = _sample_map(["h", "g", "f"])
    fk_chain = _sample_map(["f", "l", "k"])
    hg_chain = _sample_map(["h", "l", "g"])
    one = _sample_map(["f"])
    rules = [
        RewriteRule("triangle-lower", ("f",), (), _b_triangle_lower, one),
        RewriteRule("triangle-upper", ("f",), (), _b_triangle_upper, one),
        RewriteRule("comp-lower-retraction", ("f", "g"), comp_side,
                    _comp_lower_r, chain2),
        RewriteRule("comp-lower-section", ("f", "g"), comp_side,
                    _comp_lower_s, chain2),
        RewriteRule("comp-upper-retraction", ("f", "g"), comp_side,
                    _comp_upper_r, chain2),
        RewriteRule("comp-upper-section", ("f", "g"), comp_side,
                    _comp_upper_s, chain2),
        RewriteRule("triv-lower-retraction", ("x",), (), _triv_lower_r,
                    _sample_space),
        RewriteRule("triv-lower-section", ("x",), (), _triv_lower_s,
                    _sample_space),
        RewriteRule("triv-upper-retraction", ("x",), (), _triv_upper_r,
                    _sample_space),
        RewriteRule("triv-upper-section", ("x",), (), _triv_upper_s,
                    _sample_space),
        RewriteRule("comp-assoc-lower", ("f", "g", "h"),
                    ("dst f = src g", "dst g = src h"), _b_assoc_lower,
                    chain3),
        RewriteRule("comp-assoc-upper", ("f", "g", "h"),
                    ("dst f = src g", "dst g = src h"), _b_assoc_upper,
                    chain3),
        RewriteRule("comp-lower-identity-left", ("f",), (),
                    _b_comp_lower_id_left, one),
        RewriteRule("comp-lower-identity-right", ("f",), (),
                    _b_comp_lower_id_right, one),
        RewriteRule("comp-upper-identity-left", ("f",), (),
                    _b_comp_upper_id_left, one),
        RewriteRule("comp-upper-identity-right", ("f",), (),
                    _b_comp_upper_id_right, one),
        RewriteRule("unit-of-identity", ("x",), (), _b_unit_identity,
                    _sample_space),
        RewriteRule("counit-of-identity", ("x",), (), _b_counit_identity,
                    _sample_space),
        RewriteRule("unit-of-composite", ("f", "g"), comp_side,
                    _b_unit_composite, chain2),
        RewriteRule("counit-of-composite", ("f", "g"), comp_side,
                    _b_counit_composite, chain2),
        RewriteRule("mixed-counit-of-composite", ("f", "g"), comp_side,
                    _b_mixed_counit_composite, chain2),
        RewriteRule("mixed-unit-of-composite", ("f", "g"), comp_side,
                    _b_mixed_unit_composite, chain2),
        RewriteRule("frobenius-lower-left", ("f", "l", "k"),
                    ("g = l o k", "h = f o l"), _b_frobenius_lower_left,
                    fk_chain),
        RewriteRule("frobenius-lower-right", ("h", "l", "g"),
                    ("f = h o l", "k = l o g"), _b_frobenius_lower_right,
                    hg_chain),
        RewriteRule("frobenius-upper-left", ("f", "l", "k"),
                    ("g = l o k", "h = f o l"), _b_frobenius_upper_left,
                    fk_chain),
        RewriteRule("frobenius-upper-right", ("h", "l", "g"),
                    ("f = h o l", "k = l o g"), _b_frobenius_upper_right,
                    hg_chain),
        RewriteRule("loop-collapse-lower", ("f", "l", "k"),
                    ("g = l o k", "h = f o l", "m = h o k"), _b_loop_lower,
                    fk_chain),
        RewriteRule("loop-collapse-upper", ("f", "l", "k"),
                    ("g = l o k", "h = f o l", "m = h o k"), _b_loop_upper,
                    fk_chain),
        RewriteRule("bc-identity-lower", ("f",), (), _b_bc_identity_lower,
                    one),
        RewriteRule("bc-identity-upper", ("f",), (), _b_bc_identity_upper,
                    one),
        RewriteRule("bc-fold", ("f", "g"), ("dst f = dst g",), _b_bc_fold,
                    _sample_cospan),
        RewriteRule("counit-expansion", ("f",), (), _b_counit_expansion,
                    one),
        RewriteRule("commute-triv-comp", ("u", "v", "low_pair", "low_id"),
                    ("identity letter splits the composable pair",),
                    _b_commute_triv_comp, _sample_commute_triv_comp),
        RewriteRule("commute-triv-bc", ("f", "g", "low_id"),
                    ("identity letter splits the base-change pair",),
                    _b_commute_triv_bc, _sample_commute_triv_bc),
        RewriteRule("commute-comp-bc", ("a", "b", "c", "low_comp"),
                    ("merged letter fills one slot of the base change",),
                    _b_commute_comp_bc, _sample_commute_comp_bc),
        RewriteRule("horizontal-interchange", ("a", "b", "c", "d", "mixed"),
                    ("the two pairs have disjoint support",),
                    _b_interchange, _sample_interchange),
        RewriteRule("transpose-round-trip-forward", ("f", "g"), comp_side,
                    _b_rna_forward_roundtrip, chain2),
        RewriteRule("transpose-round-trip-backward", ("f",), (),
                    _b_rna_backward_roundtrip, one),
    ]
    return rules

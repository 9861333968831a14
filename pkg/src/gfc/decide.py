"""Theorem-backed equality of zigzag transformations.

Every transformation in a tractable class fits into a commuting square
whose vertical edges collapse the boundary words to their roofs and
whose horizontal edges are whiskered units of ordinary space maps.
The square is rigid: once the hypotheses hold, any two transformations
with the same endpoints produce the same square, so equality reduces
to comparing endpoints.  ``decide_equal`` runs a ladder of such
uniqueness results in increasing strength and falls back to a finite
model search for a separating family.
"""

from .errors import DecideError, TermError
from .oracle import find_counterexample
from .rewrite import roof
from .sgf import Sgf, lower, upper
from .sgnt import (BasicCell, FREE_INVERTIBLE, Layer, SgntTerm,
                   counit_expand, term_class)
from .structures import YES


def _whisk(t, cell, i):
    """Extend ``t`` by one layer applying ``cell`` at display position ``i``."""
    w = t.dst
    j = i + len(cell.src_word)
    layer = Layer(w.slice(0, i), cell, w.slice(j, len(w)))
    return t.then(SgntTerm(t.session, (layer,)))


def _pad_block(t, data, at):
    """Insert identity letters so a reduced roof displays as a_* b^*."""
    s = t.session
    blk = data.as_sgf
    has_lower = len(blk) > 0 and blk[0].lower
    has_upper = len(blk) > 0 and not blk[len(blk) - 1].lower
    if not has_lower:
        t = _whisk(t, BasicCell.triv_lower(s, data.apex).inverse(), at)
    if not has_upper:
        t = _whisk(t, BasicCell.triv_upper(s, data.apex).inverse(), at + 1)
    return t


def _split_roof_word(w):
    """A roof-shaped word cut into its direct and inverse image parts."""
    k = 1 if (len(w) > 0 and w[0].lower) else 0
    return w.slice(0, k), w.slice(k, len(w))


def unit_roof_square(left_word, f, right_word):
    """Slide a whiskered unit across the roof of its boundary word.

    The unit of ``f`` sits between ``left_word`` and ``right_word``,
    so its codomain is ``left_word f_* f^* right_word``.  Returns the
    base change of ``f`` to the roof apex of the plain concatenation
    together with the bottom edge of the comparison square: a term
    carrying the whiskered codomain down to the target of the merged
    composite a_* unit(f~) b^* over that roof.
    """
    s = left_word.session
    if left_word.src_space is not f.dst or right_word.dst_space is not f.dst:
        raise TermError("the unit of %r does not fit between %r and %r"
                        % (f, left_word, right_word))
    nf = len(left_word)
    dom = left_word.concat(right_word)
    fit = Sgf(s, (lower(f), upper(f)))
    start = left_word.concat(fit).concat(right_word)

    r_all = roof(dom)
    c = r_all.cones[nf]
    sq_mid = s.pullback(c, f)
    f_t = sq_mid.g_tilde
    if len(dom) == 0:
        return f_t, SgntTerm.identity(start)

    r_left = roof(left_word)
    r_right = roof(right_word)

    # collapse both halves and pad to the literal shape a0_* b0^* f_* f^* a1_* b1^*
    t = r_left.to_roof.whisker_right(fit.concat(right_word))
    t = t.then(r_right.to_roof.whisker_left(r_left.as_sgf.concat(fit)))
    t = _pad_block(t, r_left, 0)
    t = _pad_block(t, r_right, 4)
    a0, b0 = r_left.a, r_left.b
    a1, b1 = r_right.a, r_right.b

    # three base changes funnel both middle letters through one apex
    sq_f = s.pullback(f, b0)
    t = _whisk(t, BasicCell.bc(s, sq_f), 1)
    sq_g = s.pullback(a1, f)
    t = _whisk(t, BasicCell.bc(s, sq_g), 3)
    sq_t = s.pullback(sq_g.f_tilde, sq_f.g_tilde)
    t = _whisk(t, BasicCell.bc(s, sq_t), 2)

    sq_p = s.pullback(a1, b0)
    p0, p1 = sq_p.f_tilde, sq_p.g_tilde
    if sq_p.apex is not r_all.apex or sq_t.apex is not sq_mid.apex:
        raise TermError("roof of %r does not associate with its halves" % dom)
    if (sq_t.f_tilde.then(sq_f.f_tilde) != f_t.then(p0)
            or sq_t.g_tilde.then(sq_g.g_tilde) != f_t.then(p1)):
        raise TermError("middle base changes of %r do not close up" % dom)

    # merge the funneled legs, then split off the base-changed map
    t = _whisk(t, BasicCell.comp_lower(sq_t.f_tilde, sq_f.f_tilde), 1)
    t = _whisk(t, BasicCell.comp_upper(sq_t.g_tilde, sq_g.g_tilde), 2)
    t = _whisk(t, BasicCell.comp_lower(f_t, p0).inverse(), 1)
    t = _whisk(t, BasicCell.comp_upper(f_t, p1).inverse(), 3)

    if p0.then(a0) != r_all.a or p1.then(b1) != r_all.b:
        raise TermError("roof legs of %r do not project from its halves" % dom)
    t = _whisk(t, BasicCell.comp_lower(p0, a0), 0)
    t = _whisk(t, BasicCell.comp_upper(p1, b1), 3)
    t = _whisk(t, BasicCell.comp_lower(f_t, r_all.a), 0)
    t = _whisk(t, BasicCell.comp_upper(f_t, r_all.b), 1)
    ea = f_t.then(r_all.a)
    eb = f_t.then(r_all.b)
    if ea.is_identity():
        t = _whisk(t, BasicCell.triv_lower(s, f_t.src), 0)
    if eb.is_identity():
        t = _whisk(t, BasicCell.triv_upper(s, f_t.src), len(t.dst) - 1)

    letters = [x for x in (lower(ea), upper(eb)) if not x.map.is_identity()]
    if t.src != start or t.dst != Sgf(s, letters, base=f_t.src):
        raise TermError("bottom edge for %r lost its endpoints" % dom)
    return f_t, t


def unit_edge(data, m):
    """The composite a_* unit(m) b^* over a roof, with the legs merged in."""
    s = data.to_roof.session
    low, up = _split_roof_word(data.as_sgf)
    t = SgntTerm.of_cell(BasicCell.unit(m), left=low, right=up)
    if len(low) > 0:
        t = _whisk(t, BasicCell.comp_lower(m, data.a), 0)
    if len(up) > 0:
        t = _whisk(t, BasicCell.comp_upper(m, data.b), len(t.dst) - 2)
    if m.then(data.a).is_identity():
        t = _whisk(t, BasicCell.triv_lower(s, m.src), 0)
    if m.then(data.b).is_identity():
        t = _whisk(t, BasicCell.triv_upper(s, m.src), len(t.dst) - 1)
    return t


def expand_counits(phi):
    """The term with every counit layer rewritten through its self-pullback."""
    s = phi.session
    out = SgntTerm.identity(phi.src)
    for layer in phi.layers:
        cell = layer.cell
        if cell.kind == "counit":
            exp = counit_expand(s, cell.params[0])
            out = out.then(exp.whisker(layer.left, layer.right))
        else:
            out = out.then(SgntTerm(s, (layer,)))
    return out


class SquareDecomposition:
    """A commuting square certifying a transformation against its roofs.

    ``left`` and ``right`` collapse the source and target words,
    ``bottom`` is the identity of the source roof word, and the
    optional horizontal edges carry the whiskered units of the
    comparison maps: ``up_unit`` holds u pointing into the source
    roof apex, ``down_unit`` holds d pointing into the target one.
    Composing ``phi`` with right and then the down edge equals left,
    bottom, then the up edge; both paths land on the common word
    [(a u)_*, (b u)^*].
    """

    __slots__ = ("phi", "left", "right", "bottom", "up_unit", "down_unit")

    def __init__(self, phi, left, right, bottom, up_unit=None, down_unit=None):
        self.phi = phi
        self.left = left
        self.right = right
        self.bottom = bottom
        self.up_unit = up_unit
        self.down_unit = down_unit

    def paths(self):
        """Both composite paths around the square, source word to common end."""
        lhs = self.left.then(self.bottom)
        if self.up_unit is not None and self.up_unit[1] is not None:
            lhs = lhs.then(self.up_unit[1])
        rhs = self.phi.then(self.right)
        if self.down_unit is not None and self.down_unit[1] is not None:
            rhs = rhs.then(self.down_unit[1])
        return lhs, rhs

    def _edge_json(self, edge):
        if edge is None:
            return None
        m, term = edge
        return {"map": repr(m), "identity": m.is_identity(),
                "layers": 0 if term is None else len(term.layers)}

    def to_json(self):
        return {
            "source": repr(self.phi.src),
            "target": repr(self.phi.dst),
            "left_layers": len(self.left.layers),
            "right_layers": len(self.right.layers),
            "up": self._edge_json(self.up_unit),
            "down": self._edge_json(self.down_unit),
        }

    def __repr__(self):
        return "SquareDecomposition(%r -> %r)" % (self.phi.src, self.phi.dst)


def sgnt0_square(phi):
    """The comparison square of a term whose only units point forward.

    Accepts composition, trivialisation and base-change cells in either
    orientation plus counits and forward units.  The whole term is
    summarised by a single map u into the source roof apex; the down
    edge stays empty.
    """
    t = expand_counits(phi)
    for k, layer in enumerate(t.layers):
        cell = layer.cell
        if cell.kind == "unit" and cell.inverted:
            raise DecideError(
                "layer %d inverts %r; the one-map square needs forward units"
                % (k, cell), hypothesis="class", layer=layer)
    s = phi.session
    rf = roof(phi.src)
    rg = roof(phi.dst)
    u = s.identity(rf.apex)
    for layer in t.layers:
        cell = layer.cell
        if cell.kind == "unit":
            v, _ = unit_roof_square(layer.left, cell.params[0], layer.right)
            u = v.then(u)
    if u.src is not rg.apex:
        raise TermError("comparison map of %r misses the target roof" % phi)
    if u.then(rf.a) != rg.a or u.then(rf.b) != rg.b:
        raise TermError("comparison square of %r does not close" % phi)
    edge = None if u.is_identity() else unit_edge(rf, u)
    return SquareDecomposition(phi, rf.to_roof, rg.to_roof,
                               SgntTerm.identity(rf.as_sgf),
                               up_unit=(u, edge))


def inverses_square(phi, structure=None):
    """The comparison square of a term that may also invert units.

    Forward units accumulate into the up map u by fibre product with
    the running down map d; inverted units compose straight into d.
    With a structure supplied, every inverted base change and unit is
    revalidated and an uncertified inversion raises ``DecideError``
    naming the blocking layer and the first failed hypothesis.
    """
    t = expand_counits(phi)
    s = phi.session
    rf = roof(phi.src)
    rg = roof(phi.dst)
    u = s.identity(rf.apex)
    d = s.identity(rf.apex)
    for k, layer in enumerate(t.layers):
        cell = layer.cell
        kind = cell.kind
        if kind in FREE_INVERTIBLE:
            continue
        if kind == "bc":
            if cell.inverted and structure is not None:
                ans, _ = structure.check_bc_inversion(cell)
                if ans != YES:
                    raise DecideError(
                        "layer %d: base change %r is not invertible here"
                        % (k, cell), hypothesis="base-change-inversion",
                        layer=layer)
            continue
        if kind != "unit":
            raise DecideError("layer %d: cell %r is outside the class"
                              % (k, cell), hypothesis="class", layer=layer)
        v, _ = unit_roof_square(layer.left, cell.params[0], layer.right)
        if not cell.inverted:
            sq = s.pullback(d, v)
            u = sq.g_tilde.then(u)
            d = sq.f_tilde
        else:
            if structure is not None:
                ans, why = structure.check_unit_inversion(layer)
                if ans != YES:
                    raise DecideError(
                        "layer %d: inverting %r is not certified, %s fails"
                        % (k, cell, why), hypothesis=why, layer=layer)
            d = d.then(v)
    if d.dst is not rg.apex or u.src is not d.src:
        raise TermError("comparison maps of %r miss their roofs" % phi)
    if u.then(rf.a) != d.then(rg.a) or u.then(rf.b) != d.then(rg.b):
        raise TermError("comparison square of %r does not close" % phi)
    up = (u, None if u.is_identity() else unit_edge(rf, u))
    down = (d, None if d.is_identity() else unit_edge(rg, d))
    return SquareDecomposition(phi, rf.to_roof, rg.to_roof,
                               SgntTerm.identity(rf.as_sgf),
                               up_unit=up, down_unit=down)


class Verdict:
    """Outcome of an equality decision with its supporting evidence."""

    __slots__ = ("kind", "proof", "witness", "diagnostics", "trace")

    def __init__(self, kind, proof=None, witness=None, diagnostics=(),
                 trace=()):
        self.kind = kind
        self.proof = proof
        self.witness = witness
        self.diagnostics = tuple(diagnostics)
        self.trace = tuple(trace)

    def to_json(self):
        return {"verdict": self.kind, "proof": self.proof,
                "witness": self.witness,
                "diagnostics": list(self.diagnostics),
                "trace": list(self.trace)}

    def __repr__(self):
        rule = self.proof.get("rule") if self.proof else None
        return "Verdict(%r%s)" % (self.kind,
                                  ", rule=%r" % rule if rule else "")


ROOF_CLASSES = ("comp-triv", "sgnt0-plus", "sgnt0")
UNIT_CLASSES = ROOF_CLASSES + ("sgnt0-unit",)


def _bc_certs_ok(phi, structure, diagnostics, label):
    """All inverted base changes of the term revalidate against the structure."""
    for k, layer in enumerate(phi.layers):
        cell = layer.cell
        if cell.kind == "bc" and cell.inverted:
            ans, _ = structure.check_bc_inversion(cell)
            if ans != YES:
                diagnostics.append({
                    "hypothesis": "base-change-inversion", "term": label,
                    "layer": k, "map": repr(cell.params[0].f),
                    "detail": "inverted base change is not certified"})
                return False
    return True


def _route_hypotheses(term2, label, phi, structure, diagnostics):
    """Check the unit-direction dependent hypotheses for one term."""
    s = phi.session
    prof = term2.kind_profile()
    has_fwd = prof.get(("unit", False), 0) > 0
    has_inv = prof.get(("unit", True), 0) > 0
    ok = True
    if has_inv and not has_fwd:
        wa, pm = structure.weak_admissibility(phi.dst)
        if wa != YES:
            diagnostics.append({
                "hypothesis": "weak admissibility", "term": label,
                "word": repr(phi.dst), "map": repr(pm),
                "detail": "the target word roof legs do not pair injectively"})
            ok = False
    else:
        wa, pm = structure.weak_admissibility(phi.src)
        if wa != YES:
            diagnostics.append({
                "hypothesis": "weak admissibility", "term": label,
                "word": repr(phi.src), "map": repr(pm),
                "detail": "the source word roof legs do not pair injectively"})
            ok = False
    if not ok:
        return None
    try:
        sq = inverses_square(term2, structure)
    except DecideError as e:
        diagnostics.append({"hypothesis": e.hypothesis or "class",
                            "term": label, "detail": str(e)})
        return None
    if has_fwd and has_inv:
        d = sq.down_unit[0]
        if s.inverse(d) is None:
            diagnostics.append({
                "hypothesis": "factorization", "term": label,
                "map": repr(d),
                "detail": "the down comparison map admits no inverse, so the"
                          " roof pairs do not factor through each other"})
            return None
    return sq


def decide_equal(phi, psi, structure, trials=100, seed=0):
    """Decide whether two transformations with shared endpoints agree.

    Runs a ladder of uniqueness theorems: rearrangements of
    compositions and trivialisations, base-change composites into a
    roof-shaped word, one-letter endpoints, and the general comparison
    square under goodness, admissibility, weak admissibility and
    factorization.  If no theorem applies, a finite model search looks
    for a separating family.  Returns a ``Verdict``.
    """
    if phi.src != psi.src or phi.dst != psi.dst:
        raise DecideError("endpoint mismatch: %r -> %r against %r -> %r"
                          % (phi.src, phi.dst, psi.src, psi.dst))
    trace = []
    diagnostics = []
    cls = (term_class(phi), term_class(psi))

    trace.append("composition-trivialisation-uniqueness")
    if cls[0] == "comp-triv" and cls[1] == "comp-triv":
        return Verdict("equal", proof={
            "rule": trace[-1],
            "detail": "both terms only rearrange compositions and"
                      " trivialisations, and endpoints determine those"},
            trace=trace)

    trace.append("roof-codomain-uniqueness")
    if (cls[0] in ROOF_CLASSES and cls[1] in ROOF_CLASSES
            and phi.dst.is_roof_shape()
            and _bc_certs_ok(phi, structure, diagnostics, "phi")
            and _bc_certs_ok(psi, structure, diagnostics, "psi")):
        return Verdict("equal", proof={
            "rule": trace[-1],
            "detail": "base-change composites into a roof-shaped word"
                      " are determined by their endpoints"},
            diagnostics=diagnostics, trace=trace)

    trace.append("small-endpoints-uniqueness")
    if (len(phi.src) <= 1 and len(phi.dst) <= 1
            and cls[0] in UNIT_CLASSES and cls[1] in UNIT_CLASSES
            and _bc_certs_ok(phi, structure, diagnostics, "phi")
            and _bc_certs_ok(psi, structure, diagnostics, "psi")):
        return Verdict("equal", proof={
            "rule": trace[-1],
            "detail": "terms between words of at most one letter are"
                      " determined by their endpoints"},
            diagnostics=diagnostics, trace=trace)

    trace.append("square-uniqueness")
    squares = []
    good, blockers = structure.goodness(phi.dst)
    if good != YES:
        offender = blockers["push"] if blockers else None
        diagnostics.append({
            "hypothesis": "goodness", "word": repr(phi.dst),
            "map": repr(offender),
            "detail": "the target word does not flatten invertibly"})
    else:
        adm, _ = structure.admissibility(phi.dst)
        if adm != YES:
            data = roof(phi.dst)
            diagnostics.append({
                "hypothesis": "admissibility", "word": repr(phi.dst),
                "map": repr((data.a, data.b)),
                "detail": "the target roof pair is not in the acyclicity"
                          " class"})
        else:
            phi2 = expand_counits(phi)
            psi2 = expand_counits(psi)
            for term2, label in ((phi2, "phi"), (psi2, "psi")):
                sq = _route_hypotheses(term2, label, phi, structure,
                                       diagnostics)
                if sq is not None:
                    squares.append(sq)
    if len(squares) == 2:
        return Verdict("equal", proof={
            "rule": trace[-1],
            "detail": "both terms decompose into the same comparison"
                      " square, whose edges are determined by endpoints",
            "squares": [sq.to_json() for sq in squares]},
            diagnostics=diagnostics, trace=trace)

    trace.append("counterexample-search")
    witness = find_counterexample(phi, psi, trials=trials, seed=seed,
                                  models=structure.models)
    if witness is not None:
        return Verdict("unequal", witness=witness, diagnostics=diagnostics,
                       trace=trace)
    return Verdict("unknown", diagnostics=diagnostics, trace=trace)

"""Rewriting of functor words and ordering of transformation terms.

A rewrite of a word is recorded as a small step tuple, so one sequence
of steps can be replayed on bare words or materialised as whiskered
layers.  Three procedures share the engine:

* the alternating reduction (compose runs, drop trivial letters),
* the roof construction (reduce, then push inverse images right),
* the staged factorisation (push first, reduce once at the end).

On top of the engine sit the ordering passes that sort a term built
from composition, trivialisation and base-change cells into the shape
base-changes first, compositions second, trivialisations last, and the
canonical representatives derived from that order.
"""

from __future__ import annotations

from .errors import TermError
from .sgf import Sgf, lower, upper
from .sgnt import BasicCell, Layer, SgntTerm

COMP_KINDS = ("comp_lower", "comp_upper")
TRIV_KINDS = ("triv_lower", "triv_upper")
ORDERED_KINDS = COMP_KINDS + TRIV_KINDS + ("bc",)


# ----------------------------------------------------------------------
# step engine
#
# ("comp", i, low)  merge the same-variance pair at (i, i+1)
# ("triv", i, low)  delete the identity letter at i
# ("bc", i)         swap the (inverse image, direct image) pair at (i, i+1)


def _step_apply(s, w, step):
    """The word after one step."""
    op = step[0]
    if op == "comp":
        _, i, low = step
        if low:
            m = w[i + 1].map.then(w[i].map)
            piece = Sgf(s, (lower(m),))
        else:
            m = w[i].map.then(w[i + 1].map)
            piece = Sgf(s, (upper(m),))
        return w.replace(i, i + 2, piece)
    if op == "triv":
        _, i, _low = step
        return w.replace(i, i + 1, Sgf(s, (), base=w[i].in_space))
    _, i = step
    sq = s.pullback(w[i + 1].map, w[i].map)
    piece = Sgf(s, (lower(sq.f_tilde), upper(sq.g_tilde)))
    return w.replace(i, i + 2, piece)


def _step_layer(s, w, step):
    """The step as a whiskered layer on ``w``."""
    op = step[0]
    if op == "comp":
        _, i, low = step
        if low:
            cell = BasicCell.comp_lower(w[i + 1].map, w[i].map)
        else:
            cell = BasicCell.comp_upper(w[i].map, w[i + 1].map)
        return Layer(w.slice(0, i), cell, w.slice(i + 2, len(w)))
    if op == "triv":
        _, i, low = step
        x = w[i].in_space
        cell = (BasicCell.triv_lower(s, x) if low
                else BasicCell.triv_upper(s, x))
        return Layer(w.slice(0, i), cell, w.slice(i + 1, len(w)))
    _, i = step
    sq = s.pullback(w[i + 1].map, w[i].map)
    return Layer(w.slice(0, i), BasicCell.bc(s, sq), w.slice(i + 2, len(w)))


def _run_steps(s, w, steps):
    """Materialise steps; returns (words, layers), words[k] before step k."""
    words = [w]
    layers = []
    for st in steps:
        layers.append(_step_layer(s, w, st))
        w = _step_apply(s, w, st)
        words.append(w)
    return words, layers


def _steps_term(s, w, steps):
    words, layers = _run_steps(s, w, steps)
    return words[-1], SgntTerm(s, layers, src=w if not layers else None)


# ----------------------------------------------------------------------
# alternating reduction


def _reduce_steps(s, w):
    """Compose all same-variance pairs left to right, drop identity
    letters, repeat to a fixpoint."""
    steps = []
    changed = True
    while changed:
        changed = False
        i = 0
        while i + 1 < len(w):
            if w[i].lower == w[i + 1].lower:
                st = ("comp", i, w[i].lower)
                steps.append(st)
                w = _step_apply(s, w, st)
                changed = True
            else:
                i += 1
        i = 0
        while i < len(w):
            if w[i].map.is_identity():
                st = ("triv", i, w[i].lower)
                steps.append(st)
                w = _step_apply(s, w, st)
                changed = True
            else:
                i += 1
    return w, steps


def alternating_reduce(word):
    """Reduce a word to its alternating form.

    Returns the reduced word together with the term performing the
    reduction.  Deterministic, and idempotent on its own output.
    """
    s = word.session
    red, steps = _reduce_steps(s, word)
    _, term = _steps_term(s, word, steps)
    return red, term


# ----------------------------------------------------------------------
# roofs


def _first_push(w):
    """Leftmost (inverse image, direct image) adjacency, or None."""
    for i in range(len(w) - 1):
        if not w[i].lower and w[i + 1].lower:
            return i
    return None


class RoofData:
    """A word flattened to at most one direct and one inverse image.

    ``a`` and ``b`` are the legs of the roof: ``a`` lands in the
    outer space of the word and ``b`` in its inner space.  ``cones``
    holds one map from the apex to every boundary space of the
    original word, listed left to right.
    """

    __slots__ = ("apex", "a", "b", "as_sgf", "to_roof", "cones")

    def __init__(self, apex, a, b, as_sgf, to_roof, cones):
        self.apex = apex
        self.a = a
        self.b = b
        self.as_sgf = as_sgf
        self.to_roof = to_roof
        self.cones = cones

    def __repr__(self):
        return "RoofData(%r)" % (self.as_sgf,)


def _trace_cones(s, words, steps, cones):
    """Pull cones on the final word back to the first, step by step."""
    cones = list(cones)
    for k in range(len(steps) - 1, -1, -1):
        st = steps[k]
        before = words[k]
        i = st[1]
        if st[0] == "comp":
            if st[2]:
                cones.insert(i + 1, cones[i + 1].then(before[i + 1].map))
            else:
                cones.insert(i + 1, cones[i].then(before[i].map))
        elif st[0] == "triv":
            cones.insert(i + 1, cones[i])
        else:
            sq = s.pullback(before[i + 1].map, before[i].map)
            cones[i + 1] = cones[i + 1].then(sq.f_tilde).then(before[i].map)
    return tuple(cones)


def _final_cones(s, w):
    if len(w) == 0:
        return [s.identity(w.dst_space)]
    if len(w) == 1 and w[0].lower:
        return [w[0].map, s.identity(w[0].map.src)]
    if len(w) == 1:
        return [s.identity(w[0].map.src), w[0].map]
    return [w[0].map, s.identity(w[0].map.src), w[1].map]


def roof(word):
    """Flatten a word to the shape a_* b^*.

    Interleaves alternating reductions with single base-change swaps,
    always swapping the leftmost eligible pair, so iterated pullbacks
    associate left to right.  Results are cached per session.
    """
    s = word.session
    cache = getattr(s, "_roof_cache", None)
    if cache is None:
        cache = s._roof_cache = {}
    hit = cache.get(word)
    if hit is not None:
        return hit
    w = word
    steps = []
    while True:
        w, part = _reduce_steps(s, w)
        steps.extend(part)
        i = _first_push(w)
        if i is None:
            break
        st = ("bc", i)
        steps.append(st)
        w = _step_apply(s, w, st)
    words, layers = _run_steps(s, word, steps)
    term = SgntTerm(s, layers, src=word if not layers else None)
    final = _final_cones(s, w)
    cones = _trace_cones(s, words, steps, final)
    apex = final[1 if (len(w) and w[0].lower) else 0].src
    data = RoofData(apex, cones[0], cones[-1], w, term, cones)
    cache[word] = data
    return data


def _staged_steps(s, w):
    """All base-change swaps first (leftmost each time), then reduce."""
    steps = []
    while True:
        i = _first_push(w)
        if i is None:
            break
        st = ("bc", i)
        steps.append(st)
        w = _step_apply(s, w, st)
    w, part = _reduce_steps(s, w)
    steps.extend(part)
    return w, steps


def staged_roof(word):
    """The staged factorisation of a word onto its roof."""
    return _steps_term(word.session, word, _staged_steps(word.session, word)[1])


# ----------------------------------------------------------------------
# ordering of composition/trivialisation/base-change terms


def _is_triv(layer):
    return layer.cell.kind in TRIV_KINDS


def _is_comp(layer):
    return layer.cell.kind in COMP_KINDS


def _is_bc(layer):
    return layer.cell.kind == "bc"


def _check_ordered(phi):
    for c in phi.cells():
        if c.kind not in ORDERED_KINDS or c.inverted:
            raise TermError(
                "cell %r is not a plain composition, trivialisation or "
                "base change" % c)


def _layer_step(layer, at):
    k = layer.cell.kind
    if k == "comp_lower":
        return ("comp", at, True)
    if k == "comp_upper":
        return ("comp", at, False)
    if k == "triv_lower":
        return ("triv", at, True)
    if k == "triv_upper":
        return ("triv", at, False)
    return ("bc", at)


def _commute_triv_past(lt, ln):
    """Steps performing [trivialisation, other] as [other..., trivial?].

    ``lt`` deletes an identity letter at position p; ``ln`` acts at q
    in the shorter word.  When the supports are disjoint the two simply
    swap.  When the identity letter sits inside the pair acted on, the
    letter is either absorbed by a composition against a neighbour of
    its own variance or carried around the pair by a degenerate base
    change, after which the original cell applies unchanged.
    """
    p = len(lt.left)
    low_id = lt.cell.kind == "triv_lower"
    q = len(ln.left)
    m = len(ln.cell.src_word)
    mp = len(ln.cell.dst_word)
    if q + m <= p or q >= p:
        q0 = q if q < p else q + 1
        p2 = p + (mp - m) if q < p else p
        return [_layer_step(ln, q0), ("triv", p2, low_id)]
    # interacting: the identity letter splits the pair, p == q + 1
    kind = ln.cell.kind
    if kind == "comp_lower":
        if low_id:
            return [("comp", p, True), ("comp", q, True)]
        return [("bc", p), ("comp", q, True), ("triv", p, False)]
    if kind == "comp_upper":
        if not low_id:
            return [("comp", p, False), ("comp", q, False)]
        return [("bc", q), ("comp", p, False), ("triv", q, True)]
    # base change: absorb the letter into the leg of its own variance
    if low_id:
        return [("comp", p, True), ("bc", q)]
    return [("comp", q, False), ("bc", q)]


def _commute_comp_past_bc(lc, lb):
    """Steps performing [composition, base change] base-change first.

    A composition under a base change either commutes outright or, when
    the merged letter is one slot of the swapped pair, unfolds into two
    base changes whose pasting is the original square, followed by the
    composition of the two base-changed maps.
    """
    p = len(lc.left)
    low = lc.cell.kind == "comp_lower"
    q = len(lb.left)
    if q != p and q + 1 != p:
        q0 = q if q < p else q + 1
        return [("bc", q0), _layer_step(lc, p)]
    if low:
        # merged letter fills the direct-image slot: q + 1 == p
        return [("bc", q), ("bc", q + 1), ("comp", q, True)]
    # merged letter fills the inverse-image slot: q == p
    return [("bc", p + 1), ("bc", p), ("comp", p + 1, False)]


def _bubble(s, layers, lo_pred, hi_pred, commute):
    """Rewrite topmost [lo, hi] adjacencies until none remain."""
    out = list(layers)
    while True:
        for i in range(len(out) - 2, -1, -1):
            if lo_pred(out[i]) and hi_pred(out[i + 1]):
                steps = commute(out[i], out[i + 1])
                words, seg = _run_steps(s, out[i].src_word, steps)
                assert words[-1] == out[i + 1].dst_word, \
                    "commutation moved an endpoint"
                out[i:i + 2] = seg
                break
        else:
            return out


def order_sgnt0(phi):
    """Sort a term into trivialisations after compositions after base
    changes.

    Returns (alpha, gamma, beta) with phi equal to alpha of gamma of
    beta, beta applied first: beta collects the base changes, gamma the
    compositions, alpha the trivialisations.  The middle map of each
    base-change commutation is taken cartesian, i.e. the actual base
    change of the original map.
    """
    _check_ordered(phi)
    s = phi.session
    layers = _bubble(s, phi.layers, _is_triv,
                     lambda l: not _is_triv(l), _commute_triv_past)
    layers = _bubble(s, layers, _is_comp, _is_bc, _commute_comp_past_bc)
    n = len(layers)
    i = 0
    while i < n and _is_bc(layers[i]):
        i += 1
    j = i
    while j < n and _is_comp(layers[j]):
        j += 1
    assert all(_is_triv(l) for l in layers[j:]), "ordering left a residue"
    beta = SgntTerm(s, layers[:i], src=phi.src if i == 0 else None)
    gamma = SgntTerm(s, layers[i:j], src=beta.dst if j == i else None)
    alpha = SgntTerm(s, layers[j:], src=gamma.dst if j == n else None)
    return alpha, gamma, beta


# ----------------------------------------------------------------------
# boundary trivialisations


def canonical_triv(phi, target):
    """Split phi into boundary trivialisations after everything else.

    Returns (phi_triv, psi) with phi equal to phi_triv of psi, where
    psi uses no trivialisation cells and phi_triv deletes at most one
    leading identity direct image and at most one trailing identity
    inverse image.  A leading deletion survives only when the target
    starts with an inverse image, a trailing one only when the target
    ends with a direct image (or the target is empty).
    """
    if phi.dst != target:
        raise TermError("term does not end at the stated word")
    _check_ordered(phi)
    s = phi.session
    layers = _bubble(s, phi.layers, _is_triv,
                     lambda l: not _is_triv(l), _commute_triv_past)
    k = len(layers)
    while k > 0 and _is_triv(layers[k - 1]):
        k -= 1
    base, stack = layers[:k], layers[k:]
    start = base[-1].dst_word if base else phi.src
    alive = list(range(len(start)))
    marks = set()
    for l in stack:
        p = len(l.left)
        marks.add(alive[p])
        del alive[p]

    V = start
    tags = [i in marks for i in range(len(start))]
    psi_steps = []
    retired_low = retired_up = False
    progress = True
    while any(tags) and progress:
        progress = False
        p = 0
        while p < len(V):
            if not tags[p]:
                p += 1
                continue
            low = V[p].lower
            if p + 1 < len(V) and V[p + 1].lower == low:
                st = ("comp", p, low)
                tags[p:p + 2] = [tags[p + 1]]
            elif p > 0 and V[p - 1].lower == low:
                st = ("comp", p - 1, low)
                tags[p - 1:p + 1] = [tags[p - 1]]
            elif low and p > 0:
                st = ("bc", p - 1)
                tags[p - 1], tags[p] = tags[p], tags[p - 1]
            elif not low and p + 1 < len(V):
                st = ("bc", p)
                tags[p], tags[p + 1] = tags[p + 1], tags[p]
            elif low:
                # stranded at the left edge
                if len(target) and target[0].lower:
                    p += 1
                    continue
                assert not retired_low
                retired_low = True
                tags[p] = False
                progress = True
                continue
            else:
                # stranded at the right edge
                if len(target) and not target[-1].lower:
                    p += 1
                    continue
                assert not retired_up
                retired_up = True
                tags[p] = False
                progress = True
                continue
            psi_steps.append(st)
            V = _step_apply(s, V, st)
            progress = True
    assert not any(tags), "a trivialisation could not be placed"

    _, extra = _run_steps(s, start, psi_steps)
    psi_layers = base + extra
    psi = SgntTerm(s, psi_layers, src=phi.src if not psi_layers else None)
    w = psi.dst
    triv_steps = []
    if retired_low:
        triv_steps.append(("triv", 0, True))
    if retired_up:
        triv_steps.append(("triv", len(w) - 1 - len(triv_steps), False))
    final, phi_triv = _steps_term(s, w, triv_steps)
    assert final == target, "boundary split moved the endpoint"
    return phi_triv, psi


# ----------------------------------------------------------------------
# canonical representatives

INVERSION_NOTE = "inverted through the shared roof factorisation"


def sgnt0_canonicalize(phi):
    """The canonical representative of an ordered term.

    Within the fragment generated by compositions, trivialisations and
    base changes (inverses of the first two free, of the third only as
    certified), the representative depends only on the endpoints:

    * equal endpoints give the identity term,
    * pure composition/trivialisation terms reduce the source and then
      expand to the target,
    * a term landing on the roof of its source becomes the staged
      factorisation, base changes level-ordered before a single final
      reduction,
    * anything else goes down from both endpoints to the shared roof,
      inverting the target side.
    """
    s = phi.session
    for c in phi.cells():
        if c.kind not in ORDERED_KINDS:
            raise TermError("cell %r is outside the ordered fragment" % c)
    src, dst = phi.src, phi.dst
    if src == dst:
        return SgntTerm.identity(src)
    if all(c.kind != "bc" for c in phi.cells()):
        red_s, mat_s = alternating_reduce(src)
        red_d, mat_d = alternating_reduce(dst)
        if red_s != red_d:
            raise TermError("endpoints do not share an alternating form")
        return mat_s.then(mat_d.inverse())
    down_s = staged_roof(src)
    if down_s[0] == dst:
        return down_s[1]
    down_d = staged_roof(dst)
    if down_s[0] != down_d[0]:
        raise TermError("endpoints do not share a roof")
    return down_s[1].then(down_d[1].inverse(lambda cell: INVERSION_NOTE))

"""Geolocalizing map classes and the hypothesis checks built on them.

A ``GeoStructure`` owns two classes of maps, one acting through direct
images and one through inverse images.  Each class is spanned by
declared generators and is closed under composition, isomorphisms and
base change; membership is what the decision procedures ask about when
they want to invert a base-change cell or the roof morphism of a word.

On top of the closure the structure answers three questions about a
functor word:

* goodness: after the alternating reduction, are all direct-image
  letters in the push class, or all inverse-image letters in the pull
  class;
* admissibility: is the roof pair of the word inside the declared
  acyclicity class;
* weak admissibility: is the tupled pair map of the roof a
  monomorphism.

Answers are three-valued.  ``"yes"`` is backed by a replayable
certificate, ``"no"`` by a concrete computation (only the finite
backend produces one), and ``"unknown"`` is an honest refusal: the
formal backend never guesses about membership it cannot derive from
declared data.

A structure may carry a finite families model.  In that backend every
map is in every class (base change of families along a fibre square is
always invertible), so goodness holds for free and the interesting
checks are weak admissibility, decided by injectivity on carriers, and
invertibility of whiskered units, decided by evaluation on spanning
shapes.
"""

from __future__ import annotations

from .errors import OracleError, StructureError
from .rewrite import alternating_reduce, roof
from .sgnt import SgntTerm

YES = "yes"
NO = "no"
UNKNOWN = "unknown"

ACYCLICITY_MODES = ("trivial", "all-pairs", "declared")


def base_change_pair(session, a, b, u, v):
    """The pair (a, b) pulled back along maps into its two targets.

    ``u`` lands in ``a.dst`` and ``v`` in ``b.dst``; the result is the
    projection pair from the fibre product of the tupled map of
    ``(a, b)`` with ``u x v``.
    """
    s = session
    if u.dst is not a.dst or v.dst is not b.dst:
        raise StructureError("base change legs do not match the pair")
    q = s.pair_map(a, b)
    prod = s.product(u.src, v.src)
    target = s.product(a.dst, b.dst)
    uxv = s.induced(target, prod.g_tilde.then(u), prod.f_tilde.then(v))
    sq = s.pullback(q, uxv)
    lift = sq.f_tilde
    return lift.then(prod.g_tilde), lift.then(prod.f_tilde)


class GeoStructure:
    """Declared push/pull classes plus an acyclicity class of pairs.

    ``acyclicity`` selects how pairs are certified: ``"trivial"``
    admits only the degenerate pairs (one leg an isomorphism, the
    other in the matching class), ``"all-pairs"`` admits everything
    and is only sound over a finite families model, and ``"declared"``
    extends the degenerate pairs by explicit ``pairs`` and their base
    changes along named maps.  The degenerate and base-change clauses
    are derived here; the invertibility axiom of the declared class is
    the user's assertion.
    """

    def __init__(self, session, push_gens=(), pull_gens=(),
                 acyclicity="trivial", pairs=(), mono_class=(), model=None):
        if acyclicity not in ACYCLICITY_MODES:
            raise StructureError("unknown acyclicity mode %r" % acyclicity)
        if acyclicity == "all-pairs" and model is None:
            raise StructureError(
                "all-pairs acyclicity is only valid over a finite families "
                "model; pass one or declare the pairs")
        self.session = session
        self.push_gens = tuple(push_gens)
        self.pull_gens = tuple(pull_gens)
        self.acyclicity = acyclicity
        self.pairs = tuple(pairs)
        for a, b in self.pairs:
            if a.src is not b.src:
                raise StructureError(
                    "acyclicity pairs must share their source: %r, %r" % (a, b))
        self.mono_class = tuple(mono_class)
        for m in self.mono_class:
            session.declare_mono(m)
        self.model = model
        self.models = (model,) if model is not None else ()
        self._memo = {}

    def __repr__(self):
        backend = "finite" if self.model is not None else "formal"
        return ("GeoStructure(push=%d, pull=%d, acyclicity=%r, %s)"
                % (len(self.push_gens), len(self.pull_gens),
                   self.acyclicity, backend))

    # ------------------------------------------------------------------
    # class membership

    def in_push(self, f):
        return self._membership("push", f)[0]

    def in_pull(self, f):
        return self._membership("pull", f)[0]

    def certificate(self, side, f):
        """The membership certificate, or None when not derivable."""
        return self._membership(side, f)[1]

    def _membership(self, side, f):
        key = (side, f)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        # the placeholder breaks provenance self-loops such as a map
        # that is its own base change along an identity
        self._memo[key] = (UNKNOWN, None)
        out = self._derive(side, f)
        self._memo[key] = out
        return out

    def _derive(self, side, f):
        s = self.session
        if self.model is not None:
            return (YES, ("finite-family",))
        if s.is_iso(f):
            return (YES, ("isomorphism",))
        gens = self.push_gens if side == "push" else self.pull_gens
        for k, g in enumerate(gens):
            if g == f:
                return (YES, ("generator", k))
        for rec in s.provenance(f):
            kind = rec[0]
            if kind == "compose":
                a1, c1 = self._membership(side, rec[1])
                if a1 != YES:
                    continue
                a2, c2 = self._membership(side, rec[2])
                if a2 == YES:
                    return (YES, ("compose", rec[1], rec[2], c1, c2))
            elif kind == "base_change":
                a1, c1 = self._membership(side, rec[1])
                if a1 == YES:
                    return (YES, ("base-change", rec[1], rec[2], c1))
        return (UNKNOWN, None)

    def replay(self, side, f, cert):
        """Recheck a membership certificate from first principles."""
        s = self.session
        kind = cert[0]
        if kind == "finite-family":
            return self.model is not None
        if kind == "isomorphism":
            return s.is_iso(f)
        if kind == "generator":
            gens = self.push_gens if side == "push" else self.pull_gens
            return cert[1] < len(gens) and gens[cert[1]] == f
        if kind == "compose":
            _, m1, m2, c1, c2 = cert
            return (m1.then(m2) == f and self.replay(side, m1, c1)
                    and self.replay(side, m2, c2))
        if kind == "base-change":
            _, base, along, c = cert
            sq = s.pullback(base, along)
            return sq.f_tilde == f and self.replay(side, base, c)
        return False

    # ------------------------------------------------------------------
    # goodness

    def goodness(self, word):
        """Answer plus, on failure, the first blocking map per side."""
        red, _ = alternating_reduce(word)
        lowers = [t.map for t in red if t.lower]
        uppers = [t.map for t in red if not t.lower]
        push_block = self._first_blocking("push", lowers)
        if push_block is None:
            return (YES, None)
        pull_block = self._first_blocking("pull", uppers)
        if pull_block is None:
            return (YES, None)
        return (UNKNOWN, {"push": push_block, "pull": pull_block})

    def _first_blocking(self, side, maps):
        for m in maps:
            if self._membership(side, m)[0] != YES:
                return m
        return None

    def is_good(self, word):
        # membership is never refuted outright, so goodness never
        # answers "no"; an undecided closure stays unknown
        return self.goodness(word)[0]

    # ------------------------------------------------------------------
    # admissibility

    def pair_in_class(self, a, b):
        """Membership of a pair of maps in the acyclicity class."""
        s = self.session
        if self.acyclicity == "all-pairs":
            return (YES, ("all-pairs",))
        if s.is_iso(b):
            ans, cert = self._membership("push", a)
            if ans == YES:
                return (YES, ("degenerate", "push", cert))
        if s.is_iso(a):
            ans, cert = self._membership("pull", b)
            if ans == YES:
                return (YES, ("degenerate", "pull", cert))
        if self.acyclicity == "trivial":
            if s.is_iso(a) or s.is_iso(b):
                # degenerate shape whose other leg is merely undecided
                return (UNKNOWN, None)
            return (NO, None)
        for k, (a0, b0) in enumerate(self.pairs):
            if a0 == a and b0 == b:
                return (YES, ("declared", k))
        hit = self._base_change_pair(a, b)
        if hit is not None:
            return (YES, hit)
        return (UNKNOWN, None)

    def _base_change_pair(self, a, b):
        """Search declared pairs for one whose base change is (a, b).

        Candidate base-change legs are the named generator maps and
        identities; the search is bounded and sound, not complete.
        """
        s = self.session
        for k, (a0, b0) in enumerate(self.pairs):
            for u in self._legs_into(a0.dst, a.dst):
                for v in self._legs_into(b0.dst, b.dst):
                    ta, tb = base_change_pair(s, a0, b0, u, v)
                    if ta == a and tb == b:
                        return ("base-change-pair", k, u, v)
        return None

    def _legs_into(self, dst_space, src_space):
        out = []
        if src_space is dst_space:
            out.append(self.session.identity(dst_space))
        for m in self.session.named_maps.values():
            if m.dst is dst_space and m.src is src_space:
                out.append(m)
        return out

    def admissibility(self, word):
        data = roof(word)
        return self.pair_in_class(data.a, data.b)

    def is_admissible(self, word):
        return self.admissibility(word)[0]

    # ------------------------------------------------------------------
    # weak admissibility

    def weak_admissibility(self, word):
        """Answer plus the tupled pair map that was tested."""
        s = word.session
        data = roof(word)
        pm = s.pair_map(data.b, data.a)
        if self.model is not None:
            seen = set()
            for x in self.model.carrier(pm.src):
                y = self.model.eval_map(pm, x)
                if y in seen:
                    return (NO, pm)
                seen.add(y)
            return (YES, pm)
        if s.is_mono(pm):
            return (YES, pm)
        return (UNKNOWN, pm)

    def is_weakly_admissible(self, word):
        return self.weak_admissibility(word)[0]

    # ------------------------------------------------------------------
    # certification of inverted cells

    def check_bc_inversion(self, cell):
        """Whether a base-change cell may be inverted, with evidence."""
        sq = cell.params[0]
        if self.model is not None:
            return (YES, ("finite-family",))
        ans, cert = self._membership("push", sq.f)
        if ans == YES:
            return (YES, ("push", cert))
        ans, cert = self._membership("pull", sq.g)
        if ans == YES:
            return (YES, ("pull", cert))
        return (UNKNOWN, None)

    def check_unit_inversion(self, layer):
        """Hypotheses for inverting a whiskered unit, first failure named.

        The whiskered transformation must be good on both sides and
        its domain word admissible; invertibility itself is the
        attached certificate in the formal backend and a spanning
        evaluation over the model in the finite one.  Goodness is
        required unconditionally even where it is only a convenience.
        """
        cell = layer.cell
        fwd_src = layer.dst_word if cell.inverted else layer.src_word
        fwd_dst = layer.src_word if cell.inverted else layer.dst_word
        for w in (fwd_src, fwd_dst):
            if self.is_good(w) != YES:
                return (UNKNOWN, "goodness")
        ans = self.is_admissible(fwd_src)
        if ans != YES:
            return (ans, "admissibility")
        if self.model is not None:
            if not self._layer_invertible(layer):
                return (NO, "invertibility")
            return (YES, None)
        if cell.cert is None:
            return (UNKNOWN, "certificate")
        return (YES, None)

    def _layer_invertible(self, layer):
        """Evaluate the forward layer over the model on spanning shapes."""
        from .oracle import FamilyShape, eval_sgnt
        cell = layer.cell
        fwd = cell.inverse() if cell.inverted else cell
        term = SgntTerm.of_cell(fwd, left=layer.left, right=layer.right)
        space = term.src.src_space
        for d in (1, 2):
            shape = FamilyShape(space, {x: d for x in self.model.carrier(space)})
            try:
                mats = eval_sgnt(self.model, term, shape)
            except OracleError:
                return False
            for m in mats.values():
                if m.rows != m.cols:
                    return False
                try:
                    m.inverse()
                except OracleError:
                    return False
        return True


# ----------------------------------------------------------------------
# word-level entry points


def is_good(word, structure):
    return structure.is_good(word)


def is_admissible(word, structure):
    return structure.is_admissible(word)


def is_weakly_admissible(word, structure=None):
    if structure is None:
        structure = GeoStructure(word.session)
    return structure.is_weakly_admissible(word)

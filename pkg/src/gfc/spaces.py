"""Spaces and maps presented over a finite family of user generators.

Every object handled by the engine is a presented space: a tuple of
user-declared atom spaces together with equational constraints between
coordinate expressions.  A coordinate expression is a pair ``(i, w)``
meaning "apply the word ``w`` of generator maps to coordinate ``i``".
Words are kept in application order, so the word ``(g, h)`` sends ``x``
to ``h(g(x))``.

Maps are stored in flat form, one coordinate expression per codomain
atom.  Composition is then substitution, which is strictly associative,
and fibre products are computed by concatenating presentations and
adding the gluing equations.  Canonicalisation (merging of identified
atoms, elimination of determined coordinates, a bounded congruence
closure, and a canonical atom order) makes the chosen limits strict:
any two constructions of the same fibre product intern to the identical
``SpaceObj``, and equal maps have identical coordinate tables.  The
rewriting layers above rely on this strictness; nothing here is up to
isomorphism.
"""

from __future__ import annotations

import itertools
from collections import deque

from .errors import SpaceError

# Bounds for the word and congruence searches.  Sessions are small by
# design, so generous caps keep canonical forms exact in practice while
# guaranteeing termination on adversarial input.
WORD_EXTRA_LENGTH = 4
WORD_NODE_CAP = 4096
CLOSURE_ROUNDS = 8
CLOSURE_EXTRA_LENGTH = 2
PERMUTATION_CAP = 5040


def _ekey(expr):
    """Total order on coordinate expressions: shorter word, then atom."""
    i, word = expr
    return (len(word), i, word)


def _pair(a, b):
    return (a, b) if _ekey(a) <= _ekey(b) else (b, a)


def _renumber_stars(stars, inv):
    out = [tuple(sorted(((inv[i], w) for i, w in members), key=_ekey))
           for members in stars]
    out.sort(key=lambda m: tuple(map(_ekey, m)))
    return tuple(out)


class SpaceObj:
    """An interned presented space.

    ``atoms`` lists the user space ids whose coordinates present the
    object; ``constraints`` is the canonical equation basis between
    coordinate expressions.  Instances are hash-consed by the session,
    so two equal presentations are the same Python object and identity
    comparison is meaningful.
    """

    __slots__ = ("session", "sid", "atoms", "constraints")

    def __init__(self, session, sid, atoms, constraints):
        self.session = session
        self.sid = sid
        self.atoms = atoms
        self.constraints = constraints

    def is_atom(self):
        return len(self.atoms) == 1 and not self.constraints

    def label(self):
        return self.session.space_label(self)

    def __repr__(self):
        return self.label()


class FlatMap:
    """A map between presented spaces in flat coordinate form.

    ``coords[k]`` is the expression over the source presentation giving
    the k-th coordinate of the image.  Coordinates are canonicalised at
    construction time (modulo the source constraints and the declared
    relations), so two maps are equal if and only if they compare equal.
    """

    __slots__ = ("session", "src", "dst", "coords", "_key")

    def __init__(self, session, src, dst, coords, _canon=True):
        self.session = session
        self.src = src
        self.dst = dst
        if _canon:
            coords = tuple(session._canonical_expr(src, e) for e in coords)
        self.coords = tuple(coords)
        self._key = (id(session), src.sid, dst.sid, self.coords)
        session._check_map(self)

    def __eq__(self, other):
        return isinstance(other, FlatMap) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def then(self, other):
        """Composite applying ``self`` first, then ``other``."""
        if self.dst is not other.src:
            raise SpaceError(
                "cannot compose %r with %r: middle spaces differ" % (self, other))
        coords = []
        for j, w2 in other.coords:
            i, w1 = self.coords[j]
            coords.append((i, w1 + w2))
        self.session._relations_frozen = True
        out = FlatMap(self.session, self.src, other.dst, tuple(coords))
        self.session._record(out, ("compose", self, other))
        return out

    def after(self, other):
        """Composite applying ``other`` first, then ``self``."""
        return other.then(self)

    def is_identity(self):
        if self.src is not self.dst:
            return False
        return all(e == (i, ()) for i, e in enumerate(self.coords))

    def __repr__(self):
        name = self.session.map_name(self)
        body = name if name is not None else "<%s>" % ", ".join(
            self.session.expr_label(e) for e in self.coords)
        return "%s: %s -> %s" % (body, self.src.label(), self.dst.label())


class PullbackSquare:
    """The chosen fibre product square over an ordered cospan (f, g).

    ``f_tilde`` is f base-changed along g (it lands in the source of g)
    and ``g_tilde`` is g base-changed along f.  ``origin`` records, for
    each apex atom, its position in the concatenated presentation of
    src(f) and src(g); induced maps into the apex are read off from it.
    """

    __slots__ = ("f", "g", "apex", "f_tilde", "g_tilde", "origin", "name")

    def __init__(self, f, g, apex, f_tilde, g_tilde, origin, name=None):
        self.f = f
        self.g = g
        self.apex = apex
        self.f_tilde = f_tilde
        self.g_tilde = g_tilde
        self.origin = origin
        self.name = name

    def __repr__(self):
        return "pullback(%r, %r)" % (self.f, self.g)


class Session:
    """Owner of all declared data and of the interning tables.

    A session collects the user's spaces, generator maps and relations,
    and hands out presented spaces and flat maps.  All derived objects
    must be created through the session so that canonical forms stay
    consistent; relations therefore have to be declared before the
    first derived construction.
    """

    def __init__(self):
        self.space_names = []
        self.space_ids = {}
        self.gen_names = []
        self.gen_src = []
        self.gen_dst = []
        self.gen_ids = {}
        self.iso_gens = set()
        self.mono_gens = set()
        self.word_eqs = []
        self.named_spaces = {}
        self.named_maps = {}
        self._gens_from_cache = {}
        self._canon_cache = {}
        self._expr_cache = {}
        self._spaces = {}
        self._atom_objs = {}
        self._pullbacks = {}
        self._prov = {}
        self._prov_seen = set()
        self._checked = set()
        self._iso_cache = {}
        self._mono_cache = {}
        self._space_aliases = {}
        self._relations_frozen = False

    # ------------------------------------------------------------------
    # declarations

    def declare_space(self, name):
        if name in self.space_ids:
            raise SpaceError("space %r is already declared" % name)
        uid = len(self.space_names)
        self.space_names.append(name)
        self.space_ids[name] = uid
        obj, _, _ = self._intern((uid,), ())
        self._atom_objs[uid] = obj
        self.named_spaces[name] = obj
        return obj

    def declare_map(self, name, src, dst, iso=False):
        """Declare a generator map between two atom spaces."""
        if name in self.gen_ids or name in self.named_maps:
            raise SpaceError("map %r is already declared" % name)
        if not src.is_atom() or not dst.is_atom():
            raise SpaceError(
                "generator %r must run between declared spaces; maps touching "
                "a fibre product are introduced through its projections" % name)
        gid = len(self.gen_names)
        self.gen_names.append(name)
        self.gen_src.append(src.atoms[0])
        self.gen_dst.append(dst.atoms[0])
        self.gen_ids[name] = gid
        self._gens_from_cache.clear()
        if iso:
            self.iso_gens.add(gid)
        m = FlatMap(self, src, dst, ((0, (gid,)),))
        self._record(m, ("generator", gid))
        self.named_maps[name] = m
        return m

    def declare_iso(self, name, src, dst):
        return self.declare_map(name, src, dst, iso=True)

    def declare_mono(self, m):
        """Mark an existing map as a monomorphism."""
        for rec in self._prov.get(m, ()):
            if rec[0] == "generator":
                self.mono_gens.add(rec[1])
        self._mono_cache[m] = True

    def declare_word_relation(self, src, lhs, rhs):
        """Declare that two generator words out of ``src`` are equal.

        Words are tuples of generator ids in application order.  All
        relations must be declared before the first derived space or
        composite map is built, since canonical forms depend on them.
        """
        if self._relations_frozen:
            raise SpaceError(
                "relations must be declared before any derived space or "
                "composite map is constructed")
        if not src.is_atom():
            raise SpaceError("word relations start at a declared space")
        start = src.atoms[0]
        if self._end_space(start, lhs) != self._end_space(start, rhs):
            raise SpaceError("relation sides do not land in the same space")
        self.word_eqs.append((start, tuple(lhs), tuple(rhs)))
        self._canon_cache.clear()
        self._expr_cache.clear()

    # ------------------------------------------------------------------
    # constructions

    def identity(self, space):
        m = FlatMap(self, space, space,
                    tuple((i, ()) for i in range(len(space.atoms))))
        self._record(m, ("identity",))
        return m

    def point(self):
        """The empty presentation: terminal among presented spaces."""
        obj, _, _ = self._intern((), ())
        return obj

    def terminal(self, space):
        """The unique map from a presented space to the point."""
        m = FlatMap(self, space, self.point(), ())
        self._record(m, ("terminal",))
        return m

    def product(self, x, y):
        """The binary product square, as the fibre product over the point.

        The cospan over the empty presentation contributes no
        constraints, so the apex is the concatenation of the two
        presentations; ``g_tilde`` projects onto ``x`` and ``f_tilde``
        onto ``y``.
        """
        return self.pullback(self.terminal(x), self.terminal(y))

    def pair_map(self, u, v):
        """The map (u, v) into the product of the two targets."""
        sq = self.product(u.dst, v.dst)
        return self.induced(sq, u, v)

    def atom_space(self, uid):
        return self._atom_objs[uid]

    def pullback(self, f, g):
        """The chosen fibre product square over the ordered cospan (f, g)."""
        if f.dst is not g.dst:
            raise SpaceError("pullback needs a cospan: %r and %r" % (f, g))
        key = (f, g)
        sq = self._pullbacks.get(key)
        if sq is not None:
            return sq
        nf = len(f.src.atoms)
        atoms = f.src.atoms + g.src.atoms
        cons = list(f.src.constraints)
        for a, b in g.src.constraints:
            cons.append(((a[0] + nf, a[1]), (b[0] + nf, b[1])))
        for k in range(len(f.dst.atoms)):
            i, w = f.coords[k]
            j, v = g.coords[k]
            cons.append(((i, w), (j + nf, v)))
        apex, origin, mu = self._intern(atoms, cons)
        g_tilde = FlatMap(self, apex, f.src, tuple(mu[:nf]))
        f_tilde = FlatMap(self, apex, g.src, tuple(mu[nf:]))
        self._record(f_tilde, ("base_change", f, g))
        self._record(g_tilde, ("base_change", g, f))
        sq = PullbackSquare(f, g, apex, f_tilde, g_tilde, origin)
        self._pullbacks[key] = sq
        return sq

    def declare_pullback(self, name, f_leg_name, g_leg_name, f, g):
        """Declare a named fibre product; the square is definitional."""
        if name in self.space_ids or name in self.named_spaces:
            raise SpaceError("space %r is already declared" % name)
        sq = self.pullback(f, g)
        sq.name = name
        self.named_spaces[name] = sq.apex
        self._space_aliases.setdefault(sq.apex, name)
        for leg_name, leg in ((f_leg_name, sq.f_tilde), (g_leg_name, sq.g_tilde)):
            if leg_name in self.named_maps or leg_name in self.gen_ids:
                raise SpaceError("map %r is already declared" % leg_name)
            self.named_maps[leg_name] = leg
        return sq

    def induced(self, square, u, v):
        """The map into a fibre product with components u and v.

        ``u`` lands in the source of ``square.f`` and ``v`` in the
        source of ``square.g``; they must agree over the base.
        """
        if u.dst is not square.f.src or v.dst is not square.g.src:
            raise SpaceError("induced map components do not match the square")
        if u.src is not v.src:
            raise SpaceError("induced map components have different sources")
        if u.then(square.f) != v.then(square.g):
            raise SpaceError("induced map components do not agree over the base")
        nf = len(square.f.src.atoms)
        coords = []
        for j in square.origin:
            coords.append(u.coords[j] if j < nf else v.coords[j - nf])
        m = FlatMap(self, u.src, square.apex, tuple(coords))
        self._record(m, ("induced",))
        assert m.then(square.g_tilde) == u and m.then(square.f_tilde) == v
        return m

    def swap_iso(self, square):
        """The canonical iso from pullback(f, g) to pullback(g, f)."""
        other = self.pullback(square.g, square.f)
        m = self.induced(other, square.f_tilde, square.g_tilde)
        self._record(m, ("swap_iso",))
        return m

    # ------------------------------------------------------------------
    # predicates

    def maps_equal(self, f, g):
        if f.src is not g.src or f.dst is not g.dst:
            raise SpaceError("cannot compare maps with different endpoints")
        return f == g

    def inverse(self, f):
        """Structural two-sided inverse, or None.

        Only finds inverses that are visible in the flat form (a
        bijective relabelling of coordinates); declared isos of opaque
        generators have no computable inverse table.
        """
        if f.is_identity():
            return f
        if len(f.src.atoms) != len(f.dst.atoms):
            return None
        seen = set()
        coords = [None] * len(f.src.atoms)
        for k, (i, w) in enumerate(f.coords):
            if w or i in seen:
                return None
            seen.add(i)
            coords[i] = (k, ())
        try:
            inv = FlatMap(self, f.dst, f.src, tuple(coords))
        except SpaceError:
            return None
        if f.then(inv).is_identity() and inv.then(f).is_identity():
            self._record(inv, ("compose_inverse", f))
            return inv
        return None

    def is_iso(self, f):
        cached = self._iso_cache.get(f)
        if cached is not None:
            return cached
        self._iso_cache[f] = False
        out = self._is_iso_raw(f)
        self._iso_cache[f] = out
        return out

    def _is_iso_raw(self, f):
        if f.is_identity() or self.inverse(f) is not None:
            return True
        for rec in self._prov.get(f, ()):
            kind = rec[0]
            if kind == "generator" and rec[1] in self.iso_gens:
                return True
            if kind == "swap_iso" or kind == "compose_inverse":
                return True
            if kind == "compose" and self.is_iso(rec[1]) and self.is_iso(rec[2]):
                return True
            if kind == "base_change" and self.is_iso(rec[1]):
                return True
        return False

    def is_mono(self, f):
        cached = self._mono_cache.get(f)
        if cached is not None:
            return cached
        self._mono_cache[f] = False
        out = self._is_mono_raw(f)
        self._mono_cache[f] = out
        return out

    def _is_mono_raw(self, f):
        if self.is_iso(f):
            return True
        bare = {i for i, w in f.coords if not w}
        if bare >= set(range(len(f.src.atoms))):
            return True
        for rec in self._prov.get(f, ()):
            kind = rec[0]
            if kind == "generator" and rec[1] in self.mono_gens:
                return True
            if kind == "compose" and self.is_mono(rec[1]) and self.is_mono(rec[2]):
                return True
            if kind == "base_change" and self.is_mono(rec[1]):
                return True
        return False

    # ------------------------------------------------------------------
    # labels

    def space_label(self, obj):
        alias = self._space_aliases.get(obj)
        if alias is not None:
            return alias
        if not obj.atoms:
            return "{pt}"
        body = " x ".join(self.space_names[a] for a in obj.atoms)
        if not obj.constraints:
            return body if len(obj.atoms) == 1 else "(%s)" % body
        eqs = ", ".join("%s = %s" % (self.expr_label(a), self.expr_label(b))
                        for a, b in obj.constraints)
        return "{%s | %s}" % (body, eqs)

    def expr_label(self, expr):
        i, word = expr
        out = "x%d" % i
        for g in word:
            out = "%s(%s)" % (self.gen_names[g], out)
        return out

    def map_name(self, m):
        for name, other in self.named_maps.items():
            if other == m:
                return name
        return None

    # ------------------------------------------------------------------
    # word machinery

    def _gens_from(self, uid):
        out = self._gens_from_cache.get(uid)
        if out is None:
            out = [g for g in range(len(self.gen_names)) if self.gen_src[g] == uid]
            self._gens_from_cache[uid] = out
        return out

    def _end_space(self, start, word):
        cur = start
        for g in word:
            if self.gen_src[g] != cur:
                raise SpaceError("ill-typed word %r" % (word,))
            cur = self.gen_dst[g]
        return cur

    def _prefix_spaces(self, start, word):
        spaces = [start]
        for g in word:
            spaces.append(self.gen_dst[g])
        return spaces

    def _word_canon(self, start, word):
        """Smallest spelling of a word reachable by the relations."""
        key = (start, word)
        cached = self._canon_cache.get(key)
        if cached is not None:
            return cached
        if not self.word_eqs:
            self._canon_cache[key] = word
            return word
        cap = len(word) + WORD_EXTRA_LENGTH
        seen = {word}
        queue = deque([word])
        while queue and len(seen) < WORD_NODE_CAP:
            w = queue.popleft()
            spaces = self._prefix_spaces(start, w)
            for src, lhs, rhs in self.word_eqs:
                for old, new in ((lhs, rhs), (rhs, lhs)):
                    n = len(old)
                    for p in range(len(w) - n + 1):
                        if spaces[p] != src or w[p:p + n] != old:
                            continue
                        w2 = w[:p] + new + w[p + n:]
                        if len(w2) > cap or w2 in seen:
                            continue
                        seen.add(w2)
                        queue.append(w2)
        best = min(seen, key=lambda w: (len(w), w))
        self._canon_cache[key] = best
        return best

    def _validate_expr(self, space, expr):
        i, word = expr
        if not 0 <= i < len(space.atoms):
            raise SpaceError("coordinate index %d out of range for %r" % (i, space))
        return self._end_space(space.atoms[i], word)

    def _canonical_expr(self, space, expr):
        """Least expression equal to ``expr`` modulo the presentation."""
        self._validate_expr(space, expr)
        key = (space.sid, expr)
        cached = self._expr_cache.get(key)
        if cached is not None:
            return cached
        i, w = expr
        cur = (i, self._word_canon(space.atoms[i], w))
        if space.constraints:
            while True:
                cl = _Closure(self, space.atoms, space.constraints, [cur])
                best = cl.least(cur)
                if best == cur:
                    break
                cur = best
        self._expr_cache[key] = cur
        return cur

    def _entails(self, space, a, b):
        if a == b:
            return True
        cl = _Closure(self, space.atoms, space.constraints, [a, b])
        return cl.connected(a, b)

    def _check_map(self, m):
        if m._key in self._checked:
            return
        if len(m.coords) != len(m.dst.atoms):
            raise SpaceError("map has %d coordinates, expected %d"
                             % (len(m.coords), len(m.dst.atoms)))
        for k, e in enumerate(m.coords):
            end = self._validate_expr(m.src, e)
            if end != m.dst.atoms[k]:
                raise SpaceError(
                    "coordinate %d lands in %s, expected %s"
                    % (k, self.space_names[end], self.space_names[m.dst.atoms[k]]))
        for a, b in m.dst.constraints:
            pa = (m.coords[a[0]][0], m.coords[a[0]][1] + a[1])
            pb = (m.coords[b[0]][0], m.coords[b[0]][1] + b[1])
            if not self._entails(m.src, pa, pb):
                raise SpaceError("map does not respect the codomain constraint "
                                 "%s = %s" % (self.expr_label(a), self.expr_label(b)))
        self._checked.add(m._key)

    def _record(self, m, rec):
        key = (m, rec)
        if key in self._prov_seen:
            return
        self._prov_seen.add(key)
        self._prov.setdefault(m, []).append(rec)

    def provenance(self, m):
        return tuple(self._prov.get(m, ()))

    # ------------------------------------------------------------------
    # interning

    def _intern(self, atoms, constraints):
        """Canonicalise a presentation and hash-cons the space.

        Returns ``(obj, origin, mu)`` where ``origin[k]`` is the input
        position that became atom ``k`` and ``mu[j]`` expresses input
        coordinate ``j`` over the canonical atoms.
        """
        atoms2, basis, origin, mu = self._canonical_presentation(atoms, constraints)
        if len(atoms2) > 1 or basis:
            self._relations_frozen = True
        key = (atoms2, basis)
        obj = self._spaces.get(key)
        if obj is None:
            obj = SpaceObj(self, len(self._spaces), atoms2, basis)
            self._spaces[key] = obj
        return obj, origin, mu

    def _canonical_presentation(self, atoms, constraints):
        atoms = list(atoms)
        mu = [(i, ()) for i in range(len(atoms))]
        origin = list(range(len(atoms)))
        cons = list(constraints)

        while True:
            # normalise spellings and drop trivial pairs
            seen = set()
            out = []
            for a, b in cons:
                a = (a[0], self._word_canon(atoms[a[0]], a[1]))
                b = (b[0], self._word_canon(atoms[b[0]], b[1]))
                ea = self._end_space(atoms[a[0]], a[1])
                eb = self._end_space(atoms[b[0]], b[1])
                if ea != eb:
                    raise SpaceError("constraint sides land in different spaces")
                if a == b:
                    continue
                p = _pair(a, b)
                if p not in seen:
                    seen.add(p)
                    out.append(p)
            cons = out

            # merge atoms identified outright
            merge = None
            for a, b in cons:
                if not a[1] and not b[1] and a[0] != b[0]:
                    merge = (min(a[0], b[0]), max(a[0], b[0]))
                    break
            if merge is not None:
                keep, drop = merge
                assert atoms[keep] == atoms[drop]

                def remap(e, keep=keep, drop=drop):
                    i, w = e
                    if i == drop:
                        i = keep
                    elif i > drop:
                        i -= 1
                    return (i, w)

                cons = [(remap(a), remap(b)) for a, b in cons]
                mu = [remap(e) for e in mu]
                origin[keep] = min(origin[keep], origin[drop])
                del atoms[drop]
                del origin[drop]
                continue

            # eliminate coordinates determined by the others
            cand = None
            for a, b in cons:
                for bare, other in ((a, b), (b, a)):
                    if bare[1] or other[0] == bare[0]:
                        continue
                    if cand is None or bare[0] > cand[0][0] or \
                            (bare[0] == cand[0][0] and _ekey(other) < _ekey(cand[1])):
                        cand = (bare, other)
            if cand is not None:
                drop = cand[0][0]
                tgt = cand[1]

                def subst(e, drop=drop, tgt=tgt):
                    i, w = e
                    if i == drop:
                        j, v = tgt
                        return (j if j < drop else j - 1, v + w)
                    return (i if i < drop else i - 1, w)

                cons = [(subst(a), subst(b)) for a, b in cons]
                mu = [subst(e) for e in mu]
                del atoms[drop]
                del origin[drop]
                continue
            break

        stars = self._congruence_stars(tuple(atoms), cons)

        perm = self._canonical_perm(atoms, stars)
        inv = {old: new for new, old in enumerate(perm)}
        atoms = [atoms[o] for o in perm]
        origin = [origin[o] for o in perm]
        mu = [(inv[i], w) for i, w in mu]
        basis = self._prune_stars(tuple(atoms), _renumber_stars(stars, inv))
        return tuple(atoms), basis, tuple(origin), tuple(mu)

    def _congruence_stars(self, atom_spaces, cons):
        """Nontrivial congruence classes in canonical spelling.

        The classes, not the presented pairs, are what the canonical
        form is built from, so two spellings of the same gluing data
        cannot drift apart.
        """
        if not cons:
            return ()
        cl = _Closure(self, atom_spaces, cons, [])
        classes = {}
        for e in cl.exprs:
            if self._word_canon(atom_spaces[e[0]], e[1]) != e[1]:
                continue
            classes.setdefault(cl.find(e), []).append(e)
        stars = [tuple(sorted(v, key=_ekey))
                 for v in classes.values() if len(v) > 1]
        stars.sort(key=lambda m: tuple(map(_ekey, m)))
        return tuple(stars)

    def _prune_stars(self, atom_spaces, stars):
        """Minimal basis spanning the classes, deterministically spelled."""
        pairs = []
        for members in stars:
            least = members[0]
            pairs.extend((least, e) for e in members[1:])
        pairs.sort(key=lambda p: (len(p[0][1]) + len(p[1][1]),
                                  _ekey(p[0]), _ekey(p[1])))
        basis = []
        for a, b in pairs:
            if basis:
                probe = _Closure(self, atom_spaces, basis, [a, b])
                if probe.connected(a, b):
                    continue
            basis.append((a, b))
        return tuple(sorted(basis, key=lambda p: (_ekey(p[0]), _ekey(p[1]))))

    def _canonical_perm(self, atoms, stars):
        """Atom order minimising (space ids, renumbered classes)."""
        order = sorted(range(len(atoms)), key=lambda i: (atoms[i], i))
        blocks = []
        for _, grp in itertools.groupby(order, key=lambda i: atoms[i]):
            blocks.append(tuple(grp))
        total = 1
        for b in blocks:
            for k in range(2, len(b) + 1):
                total *= k
        if total > PERMUTATION_CAP:
            return tuple(order)
        best = None
        for combo in itertools.product(*[itertools.permutations(b) for b in blocks]):
            perm = tuple(itertools.chain.from_iterable(combo))
            inv = {old: new for new, old in enumerate(perm)}
            cand = (_renumber_stars(stars, inv), perm)
            if best is None or cand < best:
                best = cand
        return best[1]


class _Closure:
    """Bounded congruence closure over coordinate expressions.

    Seeds every constraint side, the bare atoms, all word prefixes and
    the normalised spelling of each expression, then saturates: when two
    expressions are identified and one of their extensions by a
    generator is present, the other extension is added and identified
    too.  Word lengths are capped, so the closure always terminates;
    the bound is generous relative to session sizes.
    """

    def __init__(self, session, atom_spaces, constraints, seeds):
        self.session = session
        self.atom_spaces = atom_spaces
        self.parent = {}
        self.exprs = set()
        words = [e[1] for e in seeds]
        for a, b in constraints:
            words.append(a[1])
            words.append(b[1])
        self.len_cap = max((len(w) for w in words), default=0) + CLOSURE_EXTRA_LENGTH
        for i in range(len(atom_spaces)):
            self._add((i, ()))
        for e in seeds:
            self._add(e)
        for a, b in constraints:
            self._add(a)
            self._add(b)
            self._union(a, b)
        self._saturate()

    def find(self, e):
        while self.parent[e] != e:
            self.parent[e] = self.parent[self.parent[e]]
            e = self.parent[e]
        return e

    def connected(self, a, b):
        return self.find(a) == self.find(b)

    def least(self, e):
        root = self.find(e)
        return min((x for x in self.exprs if self.find(x) == root), key=_ekey)

    def _union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if _ekey(rb) < _ekey(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra
        return True

    def _add(self, e):
        if e in self.exprs:
            return
        self.exprs.add(e)
        self.parent[e] = e
        i, w = e
        if w:
            self._add((i, w[:-1]))
        cw = self.session._word_canon(self.atom_spaces[i], w)
        if cw != w:
            self._add((i, cw))
            self._union(e, (i, cw))

    def _saturate(self):
        session = self.session
        for _ in range(CLOSURE_ROUNDS):
            changed = False
            classes = {}
            for e in self.exprs:
                classes.setdefault(self.find(e), []).append(e)
            for members in classes.values():
                if len(members) < 2:
                    continue
                by_end = {}
                for e in members:
                    end = session._end_space(self.atom_spaces[e[0]], e[1])
                    by_end.setdefault(end, []).append(e)
                for end, ms in by_end.items():
                    if len(ms) < 2:
                        continue
                    for g in session._gens_from(end):
                        exts = [(i, w + (g,)) for i, w in ms]
                        if not any(x in self.exprs for x in exts):
                            continue
                        grown = [x for x in exts if len(x[1]) <= self.len_cap
                                 or x in self.exprs]
                        for x in grown:
                            if x not in self.exprs:
                                self._add(x)
                                changed = True
                        for x in grown[1:]:
                            if self._union(grown[0], x):
                                changed = True
            if not changed:
                break

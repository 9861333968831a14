"""Words of direct and inverse image functors over a diagram of maps.

A word is a display-ordered tuple of signed terms ``f_*`` (direct
image) and ``f^*`` (inverse image); the rightmost term is applied
first.  Words form the objects that natural transformation terms run
between.  Everything here is syntax: the only semantics is the typing
of the underlying maps, which is checked strictly on construction.
"""

from __future__ import annotations

from .errors import TermError


class Term:
    """A single signed functor symbol over a flat map."""

    __slots__ = ("map", "lower")

    def __init__(self, map_, lower):
        self.map = map_
        self.lower = bool(lower)

    # Sh(src f) -> Sh(dst f) for f_*, the other way round for f^*
    @property
    def in_space(self):
        return self.map.src if self.lower else self.map.dst

    @property
    def out_space(self):
        return self.map.dst if self.lower else self.map.src

    def __eq__(self, other):
        return (isinstance(other, Term) and self.lower == other.lower
                and self.map == other.map)

    def __hash__(self):
        return hash((self.lower, self.map))

    def __repr__(self):
        name = self.map.session.map_name(self.map)
        if name is None:
            if self.map.is_identity():
                name = "id(%s)" % self.map.src.label()
            else:
                name = repr(self.map)
        return name + ("_*" if self.lower else "^*")


def lower(f):
    return Term(f, True)


def upper(f):
    return Term(f, False)


class Sgf:
    """A composable word of signed functor terms.

    ``terms`` is kept in display order.  The word denotes a functor
    from sheaves over ``src_space`` to sheaves over ``dst_space``; the
    empty word is the identity functor and needs an explicit base.
    """

    __slots__ = ("session", "terms", "src_space", "dst_space")

    def __init__(self, session, terms, base=None):
        terms = tuple(terms)
        for t in terms:
            if not isinstance(t, Term):
                raise TermError("word entries must be signed terms")
            if t.map.session is not session:
                raise TermError("term belongs to a different session")
        for k in range(len(terms) - 1):
            if terms[k].in_space is not terms[k + 1].out_space:
                raise TermError(
                    "terms %r and %r do not compose" % (terms[k], terms[k + 1]))
        if terms:
            src = terms[-1].in_space
            dst = terms[0].out_space
        else:
            if base is None:
                raise TermError("an empty word needs a base space")
            src = dst = base
        self.session = session
        self.terms = terms
        self.src_space = src
        self.dst_space = dst

    def __len__(self):
        return len(self.terms)

    def __getitem__(self, k):
        return self.terms[k]

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other):
        return (isinstance(other, Sgf) and self.terms == other.terms
                and self.src_space is other.src_space
                and self.dst_space is other.dst_space)

    def __hash__(self):
        return hash((self.terms, self.src_space.sid, self.dst_space.sid))

    def boundary_space(self, k):
        """The space sitting between display positions k-1 and k."""
        if not 0 <= k <= len(self.terms):
            raise TermError("boundary index out of range")
        if k == len(self.terms):
            return self.src_space
        return self.terms[k].out_space

    def concat(self, other):
        """Display-order concatenation; ``other`` is applied first."""
        if self.src_space is not other.dst_space:
            raise TermError("words do not compose: %r then %r" % (self, other))
        return Sgf(self.session, self.terms + other.terms,
                   base=other.src_space if not (self.terms or other.terms) else None)

    def slice(self, i, j):
        if not 0 <= i <= j <= len(self.terms):
            raise TermError("bad slice of a word")
        return Sgf(self.session, self.terms[i:j],
                   base=self.boundary_space(i) if i == j else None)

    def replace(self, i, j, piece):
        """The word with positions [i, j) replaced by ``piece``."""
        return self.slice(0, i).concat(piece).concat(self.slice(j, len(self.terms)))

    def is_roof_shape(self):
        """[], [a_*], [b^*] or [a_*, b^*]."""
        t = self.terms
        if len(t) <= 1:
            return True
        return len(t) == 2 and t[0].lower and not t[1].lower

    def __repr__(self):
        if not self.terms:
            return "Id(%s)" % self.src_space.label()
        return " ".join(repr(t) for t in self.terms)


def word(session, terms, base=None):
    return Sgf(session, terms, base=base)

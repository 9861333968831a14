"""Transformation terms between functor words.

A term is a vertical composite of layers; each layer is one basic cell
whiskered on both sides by functor words.  Layers are listed bottom to
top, i.e. ``layers[0]`` is applied first.  Endpoints of consecutive
layers must match strictly, which the canonical space layer makes
possible: equal composites of maps are equal objects, so words match
on the nose.

Basic cells and their fixed orientations:

    unit(f)         : Id -> f_* f^*        over sheaves on dst(f)
    counit(f)       : f^* f_* -> Id        over sheaves on src(f)
    comp_lower(f,g) : g_* f_* -> (gf)_*
    comp_upper(f,g) : f^* g^* -> (gf)^*
    triv_lower(X)   : id_*   -> Id
    triv_upper(X)   : id^*   -> Id
    bc(square)      : g^* f_* -> ftilde_* gtilde^*

Composition and trivialisation cells may be inverted freely.  Inverting
a base-change or unit cell requires a certificate object supplied by
the structure layer; this module never manufactures one.  Counits are
never inverted directly: a counit unfolds into units and freely
invertible cells, so certified inverses are only ever granted on the
unit side.
"""

from __future__ import annotations

from .errors import TermError
from .sgf import Sgf, Term, lower, upper

FREE_INVERTIBLE = ("comp_lower", "comp_upper", "triv_lower", "triv_upper")


class BasicCell:
    """One generating cell, possibly inverted."""

    __slots__ = ("session", "kind", "params", "inverted", "cert")

    def __init__(self, session, kind, params, inverted=False, cert=None):
        self.session = session
        self.kind = kind
        self.params = params
        self.inverted = inverted
        self.cert = cert

    # -- construction helpers ------------------------------------------

    @staticmethod
    def unit(f):
        return BasicCell(f.session, "unit", (f,))

    @staticmethod
    def counit(f):
        return BasicCell(f.session, "counit", (f,))

    @staticmethod
    def comp_lower(f, g):
        if f.dst is not g.src:
            raise TermError("composition cell needs composable maps")
        return BasicCell(f.session, "comp_lower", (f, g))

    @staticmethod
    def comp_upper(f, g):
        if f.dst is not g.src:
            raise TermError("composition cell needs composable maps")
        return BasicCell(f.session, "comp_upper", (f, g))

    @staticmethod
    def triv_lower(session, space):
        return BasicCell(session, "triv_lower", (space,))

    @staticmethod
    def triv_upper(session, space):
        return BasicCell(session, "triv_upper", (space,))

    @staticmethod
    def bc(session, square):
        return BasicCell(session, "bc", (square,))

    # -- endpoints ------------------------------------------------------

    def _oriented_words(self):
        s = self.session
        k = self.kind
        if k == "unit":
            f, = self.params
            return (Sgf(s, (), base=f.dst), Sgf(s, (lower(f), upper(f))))
        if k == "counit":
            f, = self.params
            return (Sgf(s, (upper(f), lower(f))), Sgf(s, (), base=f.src))
        if k == "comp_lower":
            f, g = self.params
            return (Sgf(s, (lower(g), lower(f))), Sgf(s, (lower(f.then(g)),)))
        if k == "comp_upper":
            f, g = self.params
            return (Sgf(s, (upper(f), upper(g))), Sgf(s, (upper(f.then(g)),)))
        if k == "triv_lower":
            x, = self.params
            return (Sgf(s, (lower(s.identity(x)),)), Sgf(s, (), base=x))
        if k == "triv_upper":
            x, = self.params
            return (Sgf(s, (upper(s.identity(x)),)), Sgf(s, (), base=x))
        if k == "bc":
            sq, = self.params
            return (Sgf(s, (upper(sq.g), lower(sq.f))),
                    Sgf(s, (lower(sq.f_tilde), upper(sq.g_tilde))))
        raise TermError("unknown cell kind %r" % k)

    @property
    def src_word(self):
        a, b = self._oriented_words()
        return b if self.inverted else a

    @property
    def dst_word(self):
        a, b = self._oriented_words()
        return a if self.inverted else b

    def inverse(self, cert=None):
        inverted = not self.inverted
        if inverted and self.kind == "counit":
            raise TermError(
                "counit cells have no inverse form; invert the unit of the "
                "adjunction instead")
        if inverted and self.kind not in FREE_INVERTIBLE and cert is None:
            raise TermError(
                "cell %r is not freely invertible; a certificate is required"
                % self)
        return BasicCell(self.session, self.kind, self.params, inverted,
                         cert if inverted else None)

    def _param_key(self):
        if self.kind == "bc":
            sq, = self.params
            return (sq.f, sq.g)
        if self.kind in ("triv_lower", "triv_upper"):
            return (self.params[0].sid,)
        return self.params

    def __eq__(self, other):
        return (isinstance(other, BasicCell) and self.kind == other.kind
                and self.inverted == other.inverted
                and self._param_key() == other._param_key())

    def __hash__(self):
        return hash((self.kind, self.inverted, self._param_key()))

    def __repr__(self):
        k = self.kind
        if k == "bc":
            sq, = self.params
            body = "bc(%s, %s)" % (_map_label(sq.f), _map_label(sq.g))
        elif k in ("triv_lower", "triv_upper"):
            body = "triv%s(%s)" % ("_*" if k == "triv_lower" else "^*",
                                   self.params[0].label())
        elif k in ("comp_lower", "comp_upper"):
            f, g = self.params
            body = "comp%s(%s, %s)" % ("_*" if k == "comp_lower" else "^*",
                                       _map_label(f), _map_label(g))
        else:
            body = "%s(%s)" % (k, _map_label(self.params[0]))
        return body + ("^-1" if self.inverted else "")


def _map_label(m):
    name = m.session.map_name(m)
    if name is not None:
        return name
    if m.is_identity():
        return "id(%s)" % m.src.label()
    return repr(m)


class Layer:
    """A basic cell whiskered by display-order contexts."""

    __slots__ = ("left", "cell", "right", "src_word", "dst_word")

    def __init__(self, left, cell, right):
        self.left = left
        self.cell = cell
        self.right = right
        self.src_word = left.concat(cell.src_word).concat(right)
        self.dst_word = left.concat(cell.dst_word).concat(right)

    def inverse(self, cert=None):
        return Layer(self.left, self.cell.inverse(cert), self.right)

    def __eq__(self, other):
        return (isinstance(other, Layer) and self.left == other.left
                and self.cell == other.cell and self.right == other.right)

    def __hash__(self):
        return hash((self.left, self.cell, self.right))

    def __repr__(self):
        parts = []
        if len(self.left):
            parts.append(repr(self.left))
        parts.append(repr(self.cell))
        if len(self.right):
            parts.append(repr(self.right))
        return "[%s]" % " | ".join(parts)


class SgntTerm:
    """A vertical composite of whiskered cells."""

    __slots__ = ("session", "layers", "src", "dst")

    def __init__(self, session, layers, src=None):
        layers = tuple(layers)
        if not layers:
            if src is None:
                raise TermError("an identity term needs its word")
            self.src = self.dst = src
        else:
            for k in range(len(layers) - 1):
                if layers[k].dst_word != layers[k + 1].src_word:
                    raise TermError(
                        "layers %d and %d of a term do not meet: %r vs %r"
                        % (k, k + 1, layers[k].dst_word, layers[k + 1].src_word))
            self.src = layers[0].src_word
            self.dst = layers[-1].dst_word
        self.session = session
        self.layers = layers

    @staticmethod
    def identity(word):
        return SgntTerm(word.session, (), src=word)

    @staticmethod
    def of_cell(cell, left=None, right=None):
        s = cell.session
        if left is None:
            left = Sgf(s, (), base=cell.src_word.dst_space)
        if right is None:
            right = Sgf(s, (), base=cell.src_word.src_space)
        return SgntTerm(s, (Layer(left, cell, right),))

    def then(self, other):
        """Vertical composite applying ``self`` first."""
        if self.dst != other.src:
            raise TermError("terms do not compose vertically:\n  %r\n  %r"
                            % (self.dst, other.src))
        return SgntTerm(self.session, self.layers + other.layers,
                        src=self.src if not (self.layers or other.layers) else None)

    def whisker(self, left, right):
        """The term with contexts appended on both displayed sides."""
        layers = [Layer(left.concat(l.left), l.cell, l.right.concat(right))
                  for l in self.layers]
        return SgntTerm(self.session, layers,
                        src=left.concat(self.src).concat(right)
                        if not layers else None)

    def whisker_left(self, word):
        return self.whisker(word, Sgf(self.session, (), base=self.src.src_space))

    def whisker_right(self, word):
        return self.whisker(Sgf(self.session, (), base=self.src.dst_space), word)

    def inverse(self, certifier=None):
        """Layerwise inverse, top to bottom.

        ``certifier`` is called on each cell that is not freely
        invertible and must return a certificate; without one the
        inversion fails.
        """
        out = []
        for layer in reversed(self.layers):
            cell = layer.cell
            need = (not cell.inverted) and cell.kind not in FREE_INVERTIBLE
            cert = certifier(cell) if (need and certifier is not None) else None
            out.append(layer.inverse(cert))
        return SgntTerm(self.session, out, src=self.dst if not out else None)

    def cells(self):
        return tuple(l.cell for l in self.layers)

    def kind_profile(self):
        """Multiset of (kind, inverted) pairs appearing in the term."""
        out = {}
        for c in self.cells():
            k = (c.kind, c.inverted)
            out[k] = out.get(k, 0) + 1
        return out

    def __eq__(self, other):
        return (isinstance(other, SgntTerm) and self.layers == other.layers
                and self.src == other.src and self.dst == other.dst)

    def __hash__(self):
        return hash((self.layers, self.src, self.dst))

    def __repr__(self):
        if not self.layers:
            return "Id[%r]" % (self.src,)
        body = " ; ".join(repr(l) for l in self.layers)
        return "(%r => %r : %s)" % (self.src, self.dst, body)


# ----------------------------------------------------------------------
# derived constructions


def make_bc(session, square):
    """The base-change cell expanded into units, counits and compositions.

    Bottom to top: insert unit(gtilde) on the right, merge the two
    direct images (both spellings of the square diagonal are the same
    map, so the middle equality is strict), split the diagonal the
    other way, and cancel g against its counit.
    """
    f, g = square.f, square.g
    ft, gt = square.f_tilde, square.g_tilde
    s = session
    gu = Sgf(s, (upper(g),))
    gtu = Sgf(s, (upper(gt),))
    l1 = Layer(Sgf(s, (upper(g), lower(f))), BasicCell.unit(gt),
               Sgf(s, (), base=gt.dst))
    l2 = Layer(gu, BasicCell.comp_lower(gt, f), gtu)
    l3 = Layer(gu, BasicCell.comp_lower(ft, g).inverse(), gtu)
    l4 = Layer(Sgf(s, (), base=g.src), BasicCell.counit(g),
               Sgf(s, (lower(ft), upper(gt))))
    return SgntTerm(s, (l1, l2, l3, l4))


def rna_forward(phi, f):
    """Transpose phi : F f_* -> G into F -> G f^*."""
    if not phi.src.terms or phi.src.terms[-1] != lower(f):
        raise TermError("term does not end with the direct image of %r" % f)
    s = phi.session
    front = phi.src.slice(0, len(phi.src.terms) - 1)
    unit_part = SgntTerm.of_cell(BasicCell.unit(f), left=front)
    return unit_part.then(phi.whisker_right(Sgf(s, (upper(f),))))


def rna_backward(psi, f):
    """Transpose psi : F -> G f^* into F f_* -> G."""
    if not psi.dst.terms or psi.dst.terms[-1] != upper(f):
        raise TermError("term does not end with the inverse image of %r" % f)
    s = psi.session
    back = psi.dst.slice(0, len(psi.dst.terms) - 1)
    counit_part = SgntTerm.of_cell(BasicCell.counit(f), left=back)
    return psi.whisker_right(Sgf(s, (lower(f),))).then(counit_part)


def rna(phi, f, direction):
    """Transpose across the adjunction of ``f``.

    ``direction`` is ``"fwd"`` to turn F f_* -> G into F -> G f^*, or
    ``"bwd"`` for the other way around.
    """
    if direction == "fwd":
        return rna_forward(phi, f)
    if direction == "bwd":
        return rna_backward(phi, f)
    raise TermError("unknown transposition direction %r" % direction)


# Generator classes, smallest first.  A term sits in the least class
# admitting every one of its cells; a counit counts with the units
# since it unfolds into one.
CLASS_ORDER = ("comp-triv", "sgnt0-plus", "sgnt0", "sgnt0-unit",
               "sgnt0-unit-inv", "general")


def cell_class(cell):
    k = cell.kind
    if k in FREE_INVERTIBLE:
        return "comp-triv"
    if k == "bc":
        return "sgnt0" if cell.inverted else "sgnt0-plus"
    if k == "unit":
        return "sgnt0-unit-inv" if cell.inverted else "sgnt0-unit"
    if k == "counit":
        return "general" if cell.inverted else "sgnt0-unit"
    return "general"


def term_class(phi):
    worst = 0
    for c in phi.cells():
        worst = max(worst, CLASS_ORDER.index(cell_class(c)))
    return CLASS_ORDER[worst]


def counit_expand(session, f):
    """The counit of f written without counit(f) itself.

    Uses the self-pullback of f and its strict diagonal: base-change,
    insert the unit of the diagonal, merge both projections against it
    (each composite is an identity on the nose) and trivialise.
    """
    s = session
    sq = s.pullback(f, f)
    p2, p1 = sq.f_tilde, sq.g_tilde
    diag = s.induced(sq, s.identity(f.src), s.identity(f.src))
    x = f.src
    l1 = Layer(Sgf(s, (), base=f.src), BasicCell.bc(s, sq),
               Sgf(s, (), base=f.src))
    l2 = Layer(Sgf(s, (lower(p2),)), BasicCell.unit(diag),
               Sgf(s, (upper(p1),)))
    l3 = Layer(Sgf(s, (), base=x), BasicCell.comp_lower(diag, p2),
               Sgf(s, (upper(diag), upper(p1))))
    # both leg composites against the diagonal are identities on the nose
    l4 = Layer(Sgf(s, (lower(s.identity(x)),)),
               BasicCell.comp_upper(diag, p1), Sgf(s, (), base=x))
    l5 = Layer(Sgf(s, (), base=x), BasicCell.triv_lower(s, x),
               Sgf(s, (upper(s.identity(x)),)))
    l6 = Layer(Sgf(s, (), base=x), BasicCell.triv_upper(s, x),
               Sgf(s, (), base=x))
    return SgntTerm(s, (l1, l2, l3, l4, l5, l6))

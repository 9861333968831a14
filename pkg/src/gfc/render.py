"""Deterministic SVG string diagrams for transformation terms.

A term is drawn as a stack of horizontal bands, one per layer, with
the first layer at the bottom.  Within a band every word letter is a
vertical strand: doubled lines by convention (the doubling carries no
meaning and can be switched off), with an upward arrowhead for a
direct-image letter and a downward one for an inverse-image letter.
The layer's cell occupies its slot in the band as one of the eight
basic glyphs: plain strand, cup, cap, merge, split, stub, crossing,
with mirrored variants for inverses.

Strand order on the page is the reverse of display order, so the
letter that is applied first sits leftmost.
"""

from __future__ import annotations

COL = 36.0
BAND = 48.0
MARGIN = 18.0
PAIR = 1.6
HEAD = 12.0

_STYLE = 'fill="none" stroke="black" stroke-width="1"'


def _n(v):
    out = "%.6g" % v
    return "0" if out == "-0" else out


def _esc(text):
    return (str(text).replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;"))


class _Canvas:
    def __init__(self, doubled):
        self.doubled = doubled
        self.body = []

    def strand(self, x0, y0, x1, y1):
        for dx in ((-PAIR, PAIR) if self.doubled else (0.0,)):
            self.body.append('<line x1="%s" y1="%s" x2="%s" y2="%s"/>' % (
                _n(x0 + dx), _n(y0), _n(x1 + dx), _n(y1)))

    def arc(self, x0, y0, cy, x1, y1):
        """Cubic arc between two boundary points, flat at ``cy``."""
        for dx in ((-PAIR, PAIR) if self.doubled else (0.0,)):
            self.body.append(
                '<path d="M %s %s C %s %s %s %s %s %s"/>' % (
                    _n(x0 + dx), _n(y0), _n(x0 + dx), _n(cy),
                    _n(x1 + dx), _n(cy), _n(x1 + dx), _n(y1)))

    def dot(self, x, y):
        self.body.append('<circle cx="%s" cy="%s" r="3"/>' % (_n(x), _n(y)))

    def arrow(self, x, y, up):
        s = -1.0 if up else 1.0
        pts = ((x, y + 5 * s), (x - 3.5, y - 3 * s), (x + 3.5, y - 3 * s))
        self.body.append(
            '<path d="M %s %s L %s %s L %s %s Z" fill="black" stroke="none"/>'
            % tuple(_n(c) for p in pts for c in p))

    def text(self, x, y, s):
        self.body.append(
            '<text x="%s" y="%s" font-size="9" fill="black" stroke="none">'
            '%s</text>' % (_n(x), _n(y), _esc(s)))


def _letter_label(term):
    name = term.map.session.map_name(term.map)
    if name is None:
        name = "id" if term.map.is_identity() else "?"
    return name


def _x_at(word, i, width):
    """Page x of display position ``i``: display order is reversed."""
    inner = width - 2 * MARGIN
    left = MARGIN + (inner - COL * len(word)) / 2.0
    return left + COL * (len(word) - 1 - i + 0.5)


def _context_strand(cv, labels, letter, x0, y0, x1, y1):
    cv.strand(x0, y0, x1, y1)
    cv.arrow((x0 + x1) / 2.0, (y0 + y1) / 2.0, letter.lower)
    if labels:
        cv.text((x0 + x1) / 2.0 + 5, (y0 + y1) / 2.0 - 4,
                _letter_label(letter))


def _port_arrow(cv, letter, x, y, at_bottom):
    cv.arrow(x, y - HEAD if at_bottom else y + HEAD, letter.lower)


def _draw_cell(cv, cell, sx, dx, y0, y1, labels):
    """One glyph; ``sx``/``dx`` are page x's of the cell's own letters."""
    yc = (y0 + y1) / 2.0
    kind = cell.kind
    if kind in ("unit", "counit"):
        cup = (kind == "unit") != cell.inverted
        xs = dx if cup else sx
        if cup:
            cv.arc(xs[0], y1, y0 - 6, xs[1], y1)
        else:
            cv.arc(xs[0], y0, y1 + 6, xs[1], y0)
        for i, x in enumerate(xs):
            letter = (cell.dst_word if cup else cell.src_word).terms[i]
            _port_arrow(cv, letter, x, y1 if cup else y0, not cup)
    elif kind in ("comp_lower", "comp_upper"):
        merge = not cell.inverted
        pair, stem = (sx, dx[0]) if merge else (dx, sx[0])
        ye, yo = (y0, y1) if merge else (y1, y0)
        for x in pair:
            cv.strand(x, ye, stem, yc)
        cv.strand(stem, yc, stem, yo)
        pair_word = cell.src_word if merge else cell.dst_word
        for i, x in enumerate(pair):
            _port_arrow(cv, pair_word.terms[i], x, ye, merge)
        lone = (cell.dst_word if merge else cell.src_word).terms[0]
        _port_arrow(cv, lone, stem, yo, not merge)
    elif kind in ("triv_lower", "triv_upper"):
        if cell.inverted:
            cv.dot(dx[0], yc)
            cv.strand(dx[0], yc - 3, dx[0], y1)
            _port_arrow(cv, cell.dst_word.terms[0], dx[0], y1, False)
        else:
            cv.strand(sx[0], y0, sx[0], yc + 3)
            cv.dot(sx[0], yc)
            _port_arrow(cv, cell.src_word.terms[0], sx[0], y0, True)
    else:
        cv.strand(sx[0], y0, dx[1], y1)
        cv.strand(sx[1], y0, dx[0], y1)
        for i, x in enumerate(sx):
            _port_arrow(cv, cell.src_word.terms[i], x, y0, True)
        for i, x in enumerate(dx):
            _port_arrow(cv, cell.dst_word.terms[i], x, y1, False)
    if labels:
        cv.text(min(sx + dx) - 14, yc + 3, repr(cell))


def _draw_band(cv, layer, y0, y1, width, labels):
    w0, w1 = layer.src_word, layer.dst_word
    p = len(layer.left)
    a = len(layer.cell.src_word)
    b = len(layer.cell.dst_word)
    for i in range(p):
        _context_strand(cv, labels, w0.terms[i],
                        _x_at(w0, i, width), y0, _x_at(w1, i, width), y1)
    for i in range(p + a, len(w0)):
        _context_strand(cv, labels, w0.terms[i],
                        _x_at(w0, i, width), y0,
                        _x_at(w1, i - a + b, width), y1)
    sx = [_x_at(w0, p + i, width) for i in range(a)]
    dx = [_x_at(w1, p + i, width) for i in range(b)]
    _draw_cell(cv, layer.cell, sx, dx, y0, y1, labels)


def render_svg(term, labels=False, doubled=True):
    """Render a transformation term to an SVG 1.1 document string."""
    words = [term.src] + [layer.dst_word for layer in term.layers]
    bands = max(1, len(term.layers))
    width = 2 * MARGIN + COL * max(1, max(len(w) for w in words))
    height = 2 * MARGIN + BAND * bands
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           '<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
           'width="%s" height="%s" viewBox="0 0 %s %s">' % (
               _n(width), _n(height), _n(width), _n(height))]
    cv = _Canvas(doubled)
    if not term.layers:
        y0 = height - MARGIN
        out.append('<g data-layer="0" data-cell="id" %s>' % _STYLE)
        for i, letter in enumerate(term.src.terms):
            x = _x_at(term.src, i, width)
            _context_strand(cv, labels, letter, x, y0, x, MARGIN)
        out.extend(cv.body)
        out.append('</g>')
    for k, layer in enumerate(term.layers):
        y0 = height - MARGIN - BAND * k
        cv.body = []
        _draw_band(cv, layer, y0, y0 - BAND, width, labels)
        out.append('<g data-layer="%d" data-cell="%s" data-inv="%d" %s>' % (
            k, layer.cell.kind, 1 if layer.cell.inverted else 0, _STYLE))
        out.extend(cv.body)
        out.append('</g>')
    out.append('</svg>')
    return "\n".join(out) + "\n"


def render_to_file(term, path, labels=False, doubled=True):
    data = render_svg(term, labels=labels, doubled=doubled)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data)
    return path

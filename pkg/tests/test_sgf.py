"""Tests for functor words: typing, boundaries, splicing."""

from __future__ import annotations

import pytest

from gfc import Session, TermError
from gfc.sgf import Sgf, lower, upper, word


def chain():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    z = s.declare_space("Z")
    f = s.declare_map("f", x, y)
    g = s.declare_map("g", y, z)
    return s, f, g


def test_signed_term_orientation():
    s, f, g = chain()
    assert lower(f).in_space is f.src
    assert lower(f).out_space is f.dst
    assert upper(f).in_space is f.dst
    assert upper(f).out_space is f.src


def test_word_endpoints_read_off_the_display_order():
    s, f, g = chain()
    # rightmost term applied first: g_* f_* : Sh(X) -> Sh(Z)
    w = Sgf(s, (lower(g), lower(f)))
    assert w.src_space is f.src
    assert w.dst_space is g.dst
    zig = Sgf(s, (upper(f), lower(f)))
    assert zig.src_space is f.src and zig.dst_space is f.src


def test_adjacent_terms_must_share_a_boundary():
    s, f, g = chain()
    with pytest.raises(TermError):
        Sgf(s, (lower(f), lower(g)))
    with pytest.raises(TermError):
        Sgf(s, (upper(g), upper(f)))
    # a zigzag through Y is fine
    Sgf(s, (upper(f), lower(f)))


def test_empty_word_needs_a_base():
    s, f, g = chain()
    with pytest.raises(TermError):
        Sgf(s, ())
    e = Sgf(s, (), base=f.src)
    assert e.src_space is f.src and e.dst_space is f.src
    assert Sgf(s, (), base=f.src) != Sgf(s, (), base=f.dst)


def test_boundary_space_walks_the_display():
    s, f, g = chain()
    w = Sgf(s, (lower(g), lower(f)))
    assert w.boundary_space(0) is g.dst
    assert w.boundary_space(1) is f.dst
    assert w.boundary_space(2) is f.src
    with pytest.raises(TermError):
        w.boundary_space(3)


def test_concat_applies_the_right_factor_first():
    s, f, g = chain()
    w = Sgf(s, (lower(g),)).concat(Sgf(s, (lower(f),)))
    assert w.terms == (lower(g), lower(f))
    with pytest.raises(TermError):
        Sgf(s, (lower(f),)).concat(Sgf(s, (lower(g),)))


def test_slice_and_replace_round_trip():
    s, f, g = chain()
    w = Sgf(s, (lower(g), lower(f), upper(f)))
    assert w.slice(1, 3).terms == (lower(f), upper(f))
    empty = w.slice(1, 1)
    assert empty.src_space is f.dst
    again = w.replace(1, 3, w.slice(1, 3))
    assert again == w
    c = f.then(g)
    merged = w.replace(0, 2, Sgf(s, (lower(c),)))
    assert merged.terms == (lower(c), upper(f))


def test_roof_shapes():
    s, f, g = chain()
    assert Sgf(s, (), base=f.src).is_roof_shape()
    assert Sgf(s, (lower(f),)).is_roof_shape()
    assert Sgf(s, (upper(f),)).is_roof_shape()
    assert Sgf(s, (lower(g), upper(g))).is_roof_shape()
    assert not Sgf(s, (upper(f), lower(f))).is_roof_shape()
    assert not Sgf(s, (lower(g), lower(f))).is_roof_shape()


def test_word_helper_and_repr():
    s, f, g = chain()
    w = word(s, (lower(g), lower(f)))
    assert "g_*" in repr(w) and "f_*" in repr(w)
    assert repr(word(s, (), base=f.src)) == "Id(X)"

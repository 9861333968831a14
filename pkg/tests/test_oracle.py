"""Tests for the exact finite-model evaluator."""

from __future__ import annotations

import random

import pytest

from gfc import Session, OracleError
from gfc.oracle import (FamilyShape, FiniteFamilyModel, Mat, apply_word,
                        cell_matrices, eval_sgnt, find_counterexample,
                        replay_witness, sample_model)
from gfc.sgf import Sgf, lower, upper
from gfc.sgnt import BasicCell, Layer, SgntTerm, counit_expand, make_bc


def two_point_session():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    f = s.declare_map("f", x, y)
    model = FiniteFamilyModel(s, {"X": [1, 2], "Y": ["*"]},
                              {"f": {1: "*", 2: "*"}})
    return s, f, model


def test_carrier_of_fibre_product():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    z = s.declare_space("Z")
    f = s.declare_map("f", x, z)
    g = s.declare_map("g", y, z)
    sq = s.pullback(f, g)
    model = FiniteFamilyModel(
        s, {"X": [1, 2, 3], "Y": ["a", "b"], "Z": [0, 1]},
        {"f": {1: 0, 2: 1, 3: 1}, "g": {"a": 0, "b": 1}})
    got = model.carrier(sq.apex)
    expected = [(1, "a"), (2, "b"), (3, "b")]
    assert sorted(got) == sorted(expected)
    for p in got:
        assert model.eval_map(sq.g_tilde, p) in [(1,), (2,), (3,)]


def test_pushforward_dims_sum_over_fibres():
    s, f, model = two_point_session()
    shape = FamilyShape(f.src, {(1,): 2, (2,): 3})
    pushed = apply_word(model, Sgf(s, (lower(f),)), shape)
    assert pushed.dims[("*",)] == 5
    pulled = apply_word(model, Sgf(s, (upper(f),)),
                        FamilyShape(f.dst, {("*",): 4}))
    assert pulled.dims == {(1,): 4, (2,): 4}


def test_empty_fibre_gives_dimension_zero():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    f = s.declare_map("f", x, y)
    model = FiniteFamilyModel(s, {"X": [1], "Y": ["a", "b"]},
                              {"f": {1: "a"}})
    pushed = apply_word(model, Sgf(s, (lower(f),)),
                        FamilyShape(x, {(1,): 2}))
    assert pushed.dims[("b",)] == 0
    assert pushed.dims[("a",)] == 2


def test_unit_and_counit_matrices_frozen():
    s, f, model = two_point_session()
    shape = FamilyShape(f.dst, {("*",): 1})
    unit = cell_matrices(model, BasicCell.unit(f), shape)
    assert unit[("*",)] == Mat.from_rows([[1], [1]])
    xshape = FamilyShape(f.src, {(1,): 1, (2,): 1})
    counit = cell_matrices(model, BasicCell.counit(f), xshape)
    assert counit[(1,)] == Mat.from_rows([[1, 0]])
    assert counit[(2,)] == Mat.from_rows([[0, 1]])


def test_adjunction_triangles_hold_in_the_model():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    f = s.declare_map("f", x, y)
    rng = random.Random(7)
    down = Sgf(s, (lower(f),))
    up = Sgf(s, (upper(f),))
    empty_y = Sgf(s, (), base=y)
    empty_x = Sgf(s, (), base=x)
    tri1 = SgntTerm(s, (
        Layer(empty_y, BasicCell.unit(f), down),
        Layer(down, BasicCell.counit(f), empty_x)))
    tri2 = SgntTerm(s, (
        Layer(up, BasicCell.unit(f), empty_y),
        Layer(empty_x, BasicCell.counit(f), up)))
    for _ in range(20):
        model = sample_model(s, rng)
        if model is None:
            continue
        for term in (tri1, tri2):
            space = term.src.src_space
            shape = FamilyShape(space, {p: rng.randint(0, 3)
                                        for p in model.carrier(space)})
            out = apply_word(model, term.src, shape)
            mats = eval_sgnt(model, term, shape)
            for z in model.carrier(term.src.dst_space):
                assert mats[z] == Mat.identity(out.dims[z])


def test_base_change_cell_is_invertible_in_models():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    z = s.declare_space("Z")
    f = s.declare_map("f", x, z)
    g = s.declare_map("g", y, z)
    sq = s.pullback(f, g)
    rng = random.Random(3)
    for _ in range(10):
        model = sample_model(s, rng)
        if model is None:
            continue
        shape = FamilyShape(x, {p: rng.randint(0, 2) for p in model.carrier(x)})
        mats = cell_matrices(model, BasicCell.bc(s, sq), shape)
        for q, m in mats.items():
            assert m.rows == m.cols
            m.inverse()  # raises if the square failed to be cartesian


def test_counit_expansion_agrees_with_counit():
    s, f, model = two_point_session()
    expanded = counit_expand(s, f)
    direct = SgntTerm.of_cell(BasicCell.counit(f))
    assert expanded.src == direct.src and expanded.dst == direct.dst
    assert find_counterexample(expanded, direct, trials=30, seed=11,
                               models=[model]) is None


def test_projection_formula_discrepancy_is_found():
    """unit-then-counit around f^* f_* f^* differs from the identity."""
    s, f, model = two_point_session()
    up = Sgf(s, (upper(f),))
    empty_x = Sgf(s, (), base=f.src)
    empty_y = Sgf(s, (), base=f.dst)
    word = Sgf(s, (upper(f), lower(f), upper(f)))
    phi = SgntTerm(s, (
        Layer(empty_x, BasicCell.counit(f), up),
        Layer(up, BasicCell.unit(f), empty_y)))
    assert phi.src == word and phi.dst == word
    psi = SgntTerm.identity(word)
    witness = find_counterexample(phi, psi, trials=5, seed=0, models=[model])
    assert witness is not None
    assert witness["element"] == [1]
    assert witness["lhs"]["entries"] == [["1", "0"], ["1", "0"]]
    assert witness["rhs"]["entries"] == [["1", "0"], ["0", "1"]]
    left, right = replay_witness(s, phi, psi, witness)
    assert left != right
    assert left == Mat.from_rows([[1, 0], [1, 0]])


def test_model_validation_rejects_broken_relation():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    p = s.declare_map("p", x, y)
    q = s.declare_map("q", x, y)
    s.declare_word_relation(x, (s.gen_ids["p"],), (s.gen_ids["q"],))
    with pytest.raises(OracleError):
        FiniteFamilyModel(s, {"X": [1], "Y": [0, 1]},
                          {"p": {1: 0}, "q": {1: 1}})
    FiniteFamilyModel(s, {"X": [1], "Y": [0, 1]},
                      {"p": {1: 0}, "q": {1: 0}})


def test_declared_iso_must_be_bijective():
    s = Session()
    x = s.declare_space("X")
    y = s.declare_space("Y")
    s.declare_iso("i", x, y)
    with pytest.raises(OracleError):
        FiniteFamilyModel(s, {"X": [1, 2], "Y": ["a"]},
                          {"i": {1: "a", 2: "a"}})


def test_matrix_inverse_is_exact():
    m = Mat.from_rows([[2, 1], [1, 1]])
    inv = m.inverse()
    assert m.mul(inv) == Mat.identity(2)
    assert inv == Mat.from_rows([[1, -1], [-1, 2]])
    with pytest.raises(OracleError):
        Mat.from_rows([[1, 1], [1, 1]]).inverse()

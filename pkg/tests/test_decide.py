"""Tests for square decompositions and the equality ladder."""

from __future__ import annotations

import json

import pytest

from gfc import Session
from gfc.decide import (SquareDecomposition, Verdict, decide_equal,
                        expand_counits, inverses_square, sgnt0_square,
                        unit_edge, unit_roof_square)
from gfc.errors import DecideError
from gfc.oracle import FiniteFamilyModel, find_counterexample, replay_witness
from gfc.rewrite import roof, staged_roof
from gfc.sgf import Sgf, lower, upper, word
from gfc.sgnt import BasicCell, Layer, SgntTerm
from gfc.structures import GeoStructure


def free_session():
    s = Session()
    y = s.declare_space("Y")
    spaces = [s.declare_space(n) for n in "QPAWV"]
    q, p, f, r, t = (s.declare_map("q", spaces[0], y),
                     s.declare_map("p", spaces[0], spaces[1]),
                     s.declare_map("f", spaces[2], y),
                     s.declare_map("r", spaces[3], y),
                     s.declare_map("t", spaces[3], spaces[4]))
    return s, y, q, p, f, r, t


def forked_model():
    """Two sections of distinct points plus a loose leg, all injective."""
    s = Session()
    y = s.declare_space("Y")
    a = s.declare_space("A")
    b = s.declare_space("B")
    c = s.declare_space("C")
    f = s.declare_map("f", a, y)
    u1 = s.declare_map("u1", b, y)
    u2 = s.declare_map("u2", c, a)
    model = FiniteFamilyModel(
        s, {"Y": ["y", "z"], "A": [1, 2], "B": ["p"], "C": ["q"]},
        {"f": {1: "y", 2: "z"}, "u1": {"p": "y"}, "u2": {"q": 2}})
    return s, f, u1, u2, model


def roof_square_sides(F, f, G):
    """Both composite paths around the square of a whiskered unit."""
    f_t, bottom = unit_roof_square(F, f, G)
    data = roof(F.concat(G))
    lhs = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G).then(bottom)
    rhs = data.to_roof.then(unit_edge(data, f_t))
    return f_t, lhs, rhs


# ----------------------------------------------------------------------
# the unit roof square


def test_unit_roof_square_with_identity_contexts():
    s, y, q, p, f, r, t = free_session()
    e = Sgf(s, (), base=y)
    f_t, bottom = unit_roof_square(e, f, e)
    assert f_t == f
    assert not bottom.layers


def test_unit_roof_square_against_one_inverse_image_letter():
    s, y, q, p, f, r, t = free_session()
    e = Sgf(s, (), base=y)
    G = word(s, (upper(s.declare_map("g", y, t.dst)),))
    f_t, lhs, rhs = roof_square_sides(e, f, G)
    sq = s.pullback(roof(G).cones[0], f)
    assert f_t == sq.g_tilde and f_t.dst is roof(G).apex
    assert find_counterexample(lhs, rhs, trials=12, seed=1) is None


def test_unit_roof_square_commutes_across_word_shapes():
    s, y, q, p, f, r, t = free_session()
    e = Sgf(s, (), base=y)
    F2 = word(s, (lower(p), upper(q)))
    G2 = word(s, (lower(r), upper(t)))
    a2 = s.declare_map("a2", q.src, p.dst)
    b2 = s.declare_map("b2", q.src, q.src)
    shapes = [
        (F2, e), (e, G2), (F2, G2),
        (word(s, (upper(q),)), word(s, (lower(r),))),
        (word(s, (lower(a2), lower(b2), upper(q))), G2),
    ]
    for F, G in shapes:
        f_t, lhs, rhs = roof_square_sides(F, f, G)
        assert lhs.src == rhs.src and lhs.dst == rhs.dst
        assert find_counterexample(lhs, rhs, trials=10, seed=5) is None


def test_unit_roof_middle_block_matches_the_direct_diagram():
    # sliding the unit through three base changes agrees with base
    # changing the roof pair first and uniting the mediating map
    s, y, q, p, f, r, t = free_session()
    w0 = word(s, (upper(q), lower(r)))
    sq_f = s.pullback(f, q)
    sq_g = s.pullback(r, f)
    sq_t = s.pullback(sq_g.f_tilde, sq_f.g_tilde)
    sq_p = s.pullback(r, q)
    c = roof(w0).cones[1]
    f_t = s.pullback(c, f).g_tilde

    lhs = SgntTerm.of_cell(BasicCell.unit(f), left=w0.slice(0, 1),
                           right=w0.slice(1, 2))
    for cell, at in ((BasicCell.bc(s, sq_f), 0), (BasicCell.bc(s, sq_g), 2),
                     (BasicCell.bc(s, sq_t), 1),
                     (BasicCell.comp_lower(sq_t.f_tilde, sq_f.f_tilde), 0),
                     (BasicCell.comp_upper(sq_t.g_tilde, sq_g.g_tilde), 1)):
        w = lhs.dst
        j = at + len(cell.src_word)
        lhs = lhs.then(SgntTerm(s, (Layer(w.slice(0, at), cell,
                                          w.slice(j, len(w))),)))

    rhs = SgntTerm.of_cell(BasicCell.bc(s, sq_p))
    mid = rhs.dst
    rhs = rhs.then(SgntTerm.of_cell(BasicCell.unit(f_t), left=mid.slice(0, 1),
                                    right=mid.slice(1, 2)))
    for cell, at in ((BasicCell.comp_lower(f_t, sq_p.f_tilde), 0),
                     (BasicCell.comp_upper(f_t, sq_p.g_tilde), 1)):
        w = rhs.dst
        j = at + len(cell.src_word)
        rhs = rhs.then(SgntTerm(s, (Layer(w.slice(0, at), cell,
                                          w.slice(j, len(w))),)))

    assert lhs.src == rhs.src and lhs.dst == rhs.dst
    assert find_counterexample(lhs, rhs, trials=15, seed=7) is None


# ----------------------------------------------------------------------
# squares of forward-unit terms


def test_sgnt0_square_of_pure_base_change_content():
    s, y, q, p, f, r, t = free_session()
    w0 = word(s, (lower(p), upper(q), lower(r), upper(t)))
    sq = sgnt0_square(roof(w0).to_roof)
    u, edge = sq.up_unit
    assert u.is_identity() and edge is None and sq.down_unit is None
    lhs, rhs = sq.paths()
    assert lhs.src == rhs.src and lhs.dst == rhs.dst
    assert find_counterexample(lhs, rhs, trials=10, seed=2) is None


def test_sgnt0_square_of_a_single_unit():
    s, y, q, p, f, r, t = free_session()
    F = word(s, (lower(p), upper(q)))
    G = word(s, (lower(r), upper(t)))
    phi = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G)
    sq = sgnt0_square(phi)
    assert sq.up_unit[0] == unit_roof_square(F, f, G)[0]
    lhs, rhs = sq.paths()
    assert find_counterexample(lhs, rhs, trials=10, seed=3) is None


def test_sgnt0_square_composes_two_units():
    s, y, q, p, f, r, t = free_session()
    g2 = s.declare_map("g2", f.src, f.src)
    F = word(s, (lower(p), upper(q)))
    G = word(s, (lower(r), upper(t)))
    phi1 = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G)
    inner = phi1.dst
    phi = phi1.then(SgntTerm.of_cell(BasicCell.unit(g2),
                                     left=inner.slice(0, 3),
                                     right=inner.slice(3, len(inner))))
    sq = sgnt0_square(phi)
    assert not sq.up_unit[0].is_identity()
    lhs, rhs = sq.paths()
    assert find_counterexample(lhs, rhs, trials=10, seed=4) is None


def test_sgnt0_square_expands_counits_first():
    s, y, q, p, f, r, t = free_session()
    a = f.src
    phi = SgntTerm.of_cell(BasicCell.counit(s.declare_map("h", a, a)))
    sq = sgnt0_square(phi)
    lhs, rhs = sq.paths()
    assert find_counterexample(lhs, rhs, trials=10, seed=6) is None


def test_sgnt0_square_refuses_inverted_units():
    s, y, q, p, f, r, t = free_session()
    F = word(s, (lower(p), upper(q)))
    G = word(s, (lower(r), upper(t)))
    phi = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G)
    back = SgntTerm(s, (phi.layers[0].inverse("claimed"),))
    with pytest.raises(DecideError) as exc:
        sgnt0_square(back)
    assert exc.value.hypothesis == "class"


# ----------------------------------------------------------------------
# squares with inverted units


def test_inverses_square_without_inversions_matches_sgnt0_square():
    s, y, q, p, f, r, t = free_session()
    F = word(s, (lower(p), upper(q)))
    G = word(s, (lower(r), upper(t)))
    phi = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G)
    sq0 = sgnt0_square(phi)
    sq1 = inverses_square(phi)
    assert sq1.up_unit[0] == sq0.up_unit[0]
    assert sq1.down_unit[0].is_identity()


def test_inverses_square_single_fraction_swap():
    s, y, q, p, f, r, t = free_session()
    F = word(s, (lower(p), upper(q)))
    G = word(s, (lower(r), upper(t)))
    fwd = SgntTerm.of_cell(BasicCell.unit(f), left=F, right=G)
    phi = fwd.then(SgntTerm(s, (fwd.layers[0].inverse("claimed"),)))
    sq = inverses_square(phi)
    f_t = unit_roof_square(F, f, G)[0]
    assert sq.up_unit[0] == f_t and sq.down_unit[0] == f_t
    lhs, rhs = sq.paths()
    assert lhs.src == rhs.src and lhs.dst == rhs.dst
    assert find_counterexample(lhs, rhs, trials=10, seed=8) is None


def test_inverses_square_rejects_the_two_point_overlap_configuration():
    # both roof legs equal the collapse map, so the pair is far from
    # monic and no acyclicity pair covers it
    s = Session()
    x = s.declare_space("X")
    z = s.declare_space("Z")
    h = s.declare_map("h", z, x)
    pt = s.point()
    pm = s.terminal(x)
    geo = GeoStructure(s, push_gens=(pm, h), pull_gens=(pm,),
                       acyclicity="declared", pairs=())
    fwd = SgntTerm.of_cell(BasicCell.unit(h), left=Sgf(s, (lower(pm),)),
                           right=Sgf(s, (upper(pm),)))
    phi = SgntTerm(s, (fwd.layers[0].inverse("claimed"),))
    with pytest.raises(DecideError) as exc:
        inverses_square(phi, geo)
    assert exc.value.hypothesis == "admissibility"


def test_inverses_square_accepts_the_one_sided_section():
    # against a single inverse image the pair map gains an identity
    # coordinate and certification goes through
    s = Session()
    x = s.declare_space("X")
    z = s.declare_space("Z")
    h = s.declare_map("h", z, x)
    pm = s.terminal(x)
    geo = GeoStructure(s, push_gens=(h,), pull_gens=(pm,),
                       acyclicity="declared", pairs=((s.identity(x), pm),))
    fwd = SgntTerm.of_cell(BasicCell.unit(h), right=Sgf(s, (upper(pm),)))
    phi = SgntTerm(s, (fwd.layers[0].inverse("attested"),))
    sq = inverses_square(phi, geo)
    assert sq.up_unit[0].is_identity()
    lhs, rhs = sq.paths()
    assert find_counterexample(lhs, rhs, trials=10, seed=9) is None


# ----------------------------------------------------------------------
# the equality ladder


def test_decide_equal_requires_shared_endpoints():
    s, y, q, p, f, r, t = free_session()
    geo = GeoStructure(s)
    one = SgntTerm.identity(word(s, (lower(f),)))
    other = SgntTerm.identity(word(s, (lower(r),)))
    with pytest.raises(DecideError):
        decide_equal(one, other, geo)


def test_decide_equal_association_paths():
    s = Session()
    spaces = [s.declare_space(n) for n in "XYZW"]
    f = s.declare_map("f", spaces[0], spaces[1])
    g = s.declare_map("g", spaces[1], spaces[2])
    h = s.declare_map("h", spaces[2], spaces[3])
    left_first = SgntTerm.of_cell(
        BasicCell.comp_lower(g, h),
        right=Sgf(s, (lower(f),))).then(
        SgntTerm.of_cell(BasicCell.comp_lower(f, g.then(h))))
    right_first = SgntTerm.of_cell(
        BasicCell.comp_lower(f, g),
        left=Sgf(s, (lower(h),))).then(
        SgntTerm.of_cell(BasicCell.comp_lower(f.then(g), h)))
    v = decide_equal(left_first, right_first, GeoStructure(s))
    assert v.kind == "equal"
    assert v.proof["rule"] == "composition-trivialisation-uniqueness"


def test_decide_equal_base_changes_into_a_roof_word():
    s, y, q, p, f, r, t = free_session()
    tangle = word(s, (upper(q), lower(f)))
    one = roof(tangle).to_roof
    other = staged_roof(tangle)[1]
    assert ("bc", False) in one.kind_profile()
    v = decide_equal(one, other, GeoStructure(s))
    assert v.kind == "equal"
    assert v.proof["rule"] == "roof-codomain-uniqueness"


def test_decide_equal_between_small_endpoints():
    s, y, q, p, f, r, t = free_session()
    x = f.src
    idm = s.identity(x)
    e = Sgf(s, (), base=x)
    bubble = SgntTerm.of_cell(BasicCell.unit(idm)).then(
        SgntTerm.of_cell(BasicCell.triv_lower(s, x),
                         right=Sgf(s, (upper(idm),)))).then(
        SgntTerm.of_cell(BasicCell.triv_upper(s, x)))
    v = decide_equal(bubble, SgntTerm.identity(e), GeoStructure(s))
    assert v.kind == "equal"
    assert v.proof["rule"] == "small-endpoints-uniqueness"


def insertion_order_terms(s, f, u1, u2):
    W = word(s, (lower(f), upper(f)))
    first = SgntTerm.of_cell(BasicCell.unit(u1), right=W)
    after = first.dst
    one = first.then(SgntTerm.of_cell(BasicCell.unit(u2),
                                      left=after.slice(0, 3),
                                      right=after.slice(3, len(after))))
    second = SgntTerm.of_cell(BasicCell.unit(u2), left=W.slice(0, 1),
                              right=W.slice(1, 2))
    other = second.then(SgntTerm.of_cell(BasicCell.unit(u1),
                                         right=second.dst))
    return one, other


def test_decide_equal_by_the_comparison_square():
    s, f, u1, u2, model = forked_model()
    geo = GeoStructure(s, acyclicity="all-pairs", model=model)
    one, other = insertion_order_terms(s, f, u1, u2)
    v = decide_equal(one, other, geo)
    assert v.kind == "equal"
    assert v.proof["rule"] == "square-uniqueness"
    ups = [sq["up"]["map"] for sq in v.proof["squares"]]
    assert ups[0] == ups[1]


def test_decide_equal_names_the_first_failed_hypothesis():
    s, f, u1, u2, model = forked_model()
    one, other = insertion_order_terms(s, f, u1, u2)
    bare = decide_equal(one, other, GeoStructure(s), trials=6, seed=0)
    assert bare.kind == "unknown"
    assert bare.diagnostics[0]["hypothesis"] == "goodness"
    cls = GeoStructure(s, push_gens=(f, u1, u2), pull_gens=(f, u1, u2))
    named = decide_equal(one, other, cls, trials=6, seed=0)
    assert named.kind == "unknown"
    assert named.diagnostics[0]["hypothesis"] == "admissibility"


def test_decide_equal_two_point_collapse_refuted_with_witness():
    s = Session()
    x = s.declare_space("X")
    f = s.terminal(x)
    model = FiniteFamilyModel(s, {"X": [1, 2]}, {})
    geo = GeoStructure(s, acyclicity="all-pairs", model=model)
    W = word(s, (upper(f), lower(f), upper(f)))
    phi = SgntTerm.of_cell(BasicCell.counit(f),
                           right=Sgf(s, (upper(f),))).then(
        SgntTerm.of_cell(BasicCell.unit(f), left=Sgf(s, (upper(f),))))
    v = decide_equal(phi, SgntTerm.identity(W), geo)
    assert v.kind == "unequal"
    assert v.witness["lhs"]["entries"] == [["1", "0"], ["1", "0"]]
    assert v.witness["rhs"]["entries"] == [["1", "0"], ["0", "1"]]
    assert {d["hypothesis"] for d in v.diagnostics} == {"weak admissibility"}
    lhs, rhs = replay_witness(s, phi, SgntTerm.identity(W), v.witness)
    assert lhs != rhs
    assert json.dumps(v.to_json())


def test_decide_equal_trace_lists_every_rung():
    s, f, u1, u2, model = forked_model()
    one, other = insertion_order_terms(s, f, u1, u2)
    v = decide_equal(one, other, GeoStructure(s), trials=4, seed=1)
    assert v.trace == ("composition-trivialisation-uniqueness",
                       "roof-codomain-uniqueness",
                       "small-endpoints-uniqueness",
                       "square-uniqueness",
                       "counterexample-search")

"""Tests for the catalogue of local equations."""

from __future__ import annotations

import random

from gfc.oracle import find_counterexample
from gfc.rules import rule_catalogue


def test_catalogue_size_and_names():
    rules = rule_catalogue()
    names = [r.name for r in rules]
    assert len(names) == len(set(names))
    assert len(rules) == 38


def test_every_rule_samples_and_instantiates():
    for rule in rule_catalogue():
        for seed in range(3):
            rng = random.Random(sum(map(ord, rule.name)) + seed)
            s, binding = rule.sample(rng)
            lhs, rhs = rule.instantiate(s, **binding)
            assert lhs.src == rhs.src, rule.name
            assert lhs.dst == rhs.dst, rule.name


def test_every_rule_holds_in_random_models():
    for rule in rule_catalogue():
        rng = random.Random(len(rule.name))
        s, binding = rule.sample(rng)
        lhs, rhs = rule.instantiate(s, **binding)
        witness = find_counterexample(lhs, rhs, trials=4, seed=17)
        assert witness is None, rule.name


def test_adjunction_triangles_have_the_expected_shape():
    rules = {r.name: r for r in rule_catalogue()}
    rng = random.Random(0)
    s, binding = rules["triangle-lower"].sample(rng)
    lhs, rhs = rules["triangle-lower"].instantiate(s, **binding)
    prof = lhs.kind_profile()
    assert prof.get(("unit", False)) == 1
    assert prof.get(("counit", False)) == 1
    assert not rhs.layers

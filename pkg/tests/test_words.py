import itertools

import pytest
from hypothesis import given, settings, strategies as st

from cayleyspec.errors import HypothesisNotSatisfied, MissingVariable
from cayleyspec.groups import builtin_group, dihedral_group, make_cyclic, symmetric_group
from cayleyspec.tree import AutomatonGroup
from cayleyspec.words import (gamma_depth_witness, last_entry_action, last_entry_check, last_entry_formula,
                              letter_count, odd_order_witness, substitute, two_group_witness, w_sequence)


def test_first_words():
    assert w_sequence(-1) == ()
    assert w_sequence(0) == (0,)
    assert w_sequence(1) == (0, 0, 1)
    assert w_sequence(2) == (0, 0, 0, 1, 0, 1, 2)
    with pytest.raises(ValueError):
        w_sequence(-2)


def test_lengths_and_letter_counts():
    for n in range(12):
        assert len(w_sequence(n)) == 2 ** (n + 1) - 1
        for i in range(n + 1):
            assert letter_count(n, i) == 2 ** (n - i)
    with pytest.raises(ValueError):
        letter_count(3, 4)


def test_substitute():
    S3 = symmetric_group(3)
    assert substitute((), [], S3) == S3.identity
    assert substitute(w_sequence(1), [1, 2], S3) == S3.prod([1, 1, 2])
    with pytest.raises(MissingVariable):
        substitute(w_sequence(2), [1, 2], S3)


@pytest.mark.parametrize("name", ["Z2", "Z3", "S3", "Z2xZ2"])
def test_last_entry_exhaustive_small(name):
    G = builtin_group(name)
    gamma = AutomatonGroup(G)
    top = 2 if G.order <= 4 else 1
    for n in range(top + 1):
        for g in range(G.order):
            for tup in itertools.product(range(G.order), repeat=n + 1):
                assert last_entry_check(G, g, tup, gamma)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["S3", "D4", "Q8"]), st.data())
def test_last_entry_random(name, data):
    G = builtin_group(name)
    n = data.draw(st.integers(0, 3))
    g = data.draw(st.integers(0, G.order - 1))
    tup = data.draw(st.lists(st.integers(0, G.order - 1), min_size=n + 1, max_size=n + 1))
    assert last_entry_action(G, g, tup) == last_entry_formula(G, g, tup)


def test_odd_order_witness_s3():
    S3 = symmetric_group(3)
    g, h, p = odd_order_witness(S3)
    assert S3.element_order(g) == 3 and not S3.commutes(g, h) and p == 2
    with pytest.raises(HypothesisNotSatisfied):
        odd_order_witness(builtin_group("Q8"))


def test_first_construction_s3():
    S3 = symmetric_group(3)
    r1 = gamma_depth_witness(S3, 1, 1, p=2)
    assert r1.status == "differs"
    assert r1.certified_depth == 3 and r1.machine_depth == 3
    r2 = gamma_depth_witness(S3, 1, 2, p=2)
    assert r2.certified_depth == 5
    with pytest.raises(ValueError):
        gamma_depth_witness(S3, 1, 0)


def test_second_construction_order_sixteen_dihedral():
    D8 = dihedral_group(8)
    g, f, h = two_group_witness(D8)
    c = D8.prod([D8.inv(h), f, h, D8.inv(f)])
    assert not D8.commutes(c, g)
    for n in (3, 4):
        rep = gamma_depth_witness(D8, 2, n)
        assert rep.status in ("differs", "no-difference")
        assert rep.elements["subgroup_class"] == "3"
        if rep.status == "differs":
            assert rep.certified_depth == n + 1
        else:
            assert rep.note


@pytest.mark.parametrize("name", ["D4", "Q8"])
def test_second_construction_class_two_excluded(name):
    with pytest.raises(HypothesisNotSatisfied):
        gamma_depth_witness(builtin_group(name), 2, 3)


def test_witness_rejections():
    with pytest.raises(HypothesisNotSatisfied):
        gamma_depth_witness(make_cyclic(4), 1, 1)
    with pytest.raises(ValueError):
        gamma_depth_witness(symmetric_group(3), 3, 1)
    with pytest.raises(ValueError):
        gamma_depth_witness(dihedral_group(8), 2, 2)

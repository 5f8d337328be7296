import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleyspec.errors import LevelTooLarge
from cayleyspec.groups import builtin_group, make_cyclic, symmetric_group
from cayleyspec.machines import words
from cayleyspec.tree import (AutomatonGroup, classify_fixed_points, depth, fix_count, fix_count_enumerate,
                             fix_measure_profile, fixed_point_character, freeness_report, level_permutation,
                             reduced_words)

Z2 = AutomatonGroup(make_cyclic(2))


def test_level_zero_is_trivial():
    perm = level_permutation(Z2.gen(1), 0).perm
    assert list(perm.images) == [0]


def test_level_one_and_two_for_n2():
    assert list(level_permutation(Z2.gen(0), 1).perm.images) == [0, 1]
    assert list(level_permutation(Z2.gen(1), 1).perm.images) == [1, 0]
    # b acts as the swap on the first letter, then as a (on 0) or b (on 1)
    assert list(level_permutation(Z2.gen(1), 2).perm.images) == [2, 3, 1, 0]


@pytest.mark.parametrize("name", ["Z2", "Z3", "Z6", "S3"])
def test_recursion_equals_action(name):
    Gam = AutomatonGroup(builtin_group(name))
    for g in range(Gam.n):
        for k in range(5 if Gam.n <= 3 else 4):
            a = level_permutation(Gam.gen(g), k, "action").perm
            b = level_permutation(Gam.gen(g), k, "recursion").perm
            assert a == b


def test_tree_compatibility():
    Gam = AutomatonGroup(symmetric_group(3))
    e = Gam.parse("x^2 [120] x^-1 021")
    for k in range(1, 5):
        assert level_permutation(e, k).restrict(6) == level_permutation(e, k - 1)


def test_level_budget():
    with pytest.raises(LevelTooLarge):
        level_permutation(Z2.gen(1), 21)
    with pytest.raises(LevelTooLarge):
        level_permutation(Z2.gen(1), 5, budget=16)


def test_depth_examples():
    assert depth(Z2.identity(), 5) == 0
    for G in (make_cyclic(2), make_cyclic(3), symmetric_group(3)):
        Gam = AutomatonGroup(G)
        for g in range(1, G.order):
            assert depth(Gam.embedded(g), 5) == 1
    for n in range(7):
        assert depth(Z2.conj_power(1, n), 10) == n + 1
    assert depth(Z2.x(), 6) is None


@pytest.mark.parametrize("name", ["Z2", "Z3", "S3", "Z2xZ2", "Q8"])
def test_depth_law_all_builtins(name):
    Gam = AutomatonGroup(builtin_group(name))
    top = 5 if Gam.n <= 6 else 3
    for g in range(1, Gam.n):
        for n in range(top + 1):
            assert depth(Gam.conj_power(g, n), n + 2) == n + 1


def test_fix_count_examples():
    assert [fix_count(Z2.identity(), k) for k in range(6)] == [2**k for k in range(6)]
    assert [fix_count(Z2.x(), k) for k in range(1, 11)] == [2] * 10
    assert [fix_count_enumerate(Z2.x(), k) for k in range(1, 11)] == [2] * 10
    assert [fix_count(Z2.gen(1), k) for k in range(1, 8)] == [0] * 7


def test_fix_profiles_and_character():
    assert fix_measure_profile(Z2.identity(), 4) == [1] * 5
    assert fix_measure_profile(Z2.x(), 5) == [1, 1, Fraction(1, 2), Fraction(1, 4), Fraction(1, 8), Fraction(1, 16)]
    assert fix_measure_profile(Z2.embedded(1), 4)[1:] == [0] * 4
    assert fixed_point_character(Z2.identity(), 3) == 1
    assert fixed_point_character(Z2.x(), 3) == Fraction(1, 4)
    assert fixed_point_character(Z2.gen(1), 1) == 0


def test_parse_matches_constructors():
    Gam = AutomatonGroup(make_cyclic(3))
    assert Gam.parse("x^2 [b] x^-2").word == Gam.conj_power(1, 2).word
    assert Gam.parse("b^-1 a").word == (Gam.gen(1).inverse() * Gam.gen(0)).word
    with pytest.raises(KeyError):
        Gam.parse("q")


def test_identity_word_detected():
    a = Z2.gen(0)
    assert (a * a.inverse()).is_identity()
    assert classify_fixed_points(a * a.inverse(), 4).verdict == "identity"


def test_freeness_z2_ball():
    rep = freeness_report(Z2.generators(), 4, 8)
    assert rep.free_on_ball
    for v in rep.elements:
        assert v.verdict in ("identity", "measure-zero-fixed")
        if v.verdict == "measure-zero-fixed":
            assert v.decay_ok
    assert len(rep.elements) == sum(1 for _ in reduced_words(2, 4))


def test_freeness_z3_ball():
    rep = freeness_report(AutomatonGroup(make_cyclic(3)).generators(), 3, 6)
    assert rep.free_on_ball
    assert "interior-witness" not in rep.counts()


def test_interior_witness_search_s3():
    # The search is run on commutators of x with embedded elements; whatever it finds must be genuine.
    Gam = AutomatonGroup(symmetric_group(3))
    for g in range(1, 6):
        e = Gam.x() * Gam.embedded(g) * Gam.x().inverse() * Gam.embedded(g).inverse()
        v = classify_fixed_points(e, 6)
        if v.verdict == "interior-witness":
            u = v.witness
            for tail in words(6, 2):
                w = u + list(tail)
                assert e(w) == w
        else:
            assert v.decay_ok


def test_fix_fraction_monotone_and_decay_bound():
    Gam = AutomatonGroup(symmetric_group(3))
    for text in ["x", "x 021", "x^2 [120] x^-2 [021]", "120 021^-1"]:
        e = Gam.parse(text)
        prof = fix_measure_profile(e, 8)
        assert all(a >= b for a, b in zip(prof, prof[1:]))
        v = classify_fixed_points(e, 8)
        if v.verdict == "measure-zero-fixed":
            assert all(f <= b for _, f, b in v.decay_checked)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from(["Z2", "Z3", "S3"]), st.lists(st.tuples(st.integers(0, 5), st.sampled_from([1, -1])),
                                                  min_size=1, max_size=5), st.data())
def test_element_state_matches_sequential(name, letters, data):
    Gam = AutomatonGroup(builtin_group(name))
    e = Gam.identity()
    for q, s in letters:
        g = Gam.gen(q % Gam.n)
        e = e * (g if s == 1 else g.inverse())
    k = 3 if Gam.n <= 3 else 2
    for w in words(Gam.n, k):
        assert e(list(w)) == e.act_sequential(list(w))
    for k in range(4):
        if Gam.n**k <= 1296:
            assert fix_count(e, k) == fix_count_enumerate(e, k)
    perm = level_permutation(e, k).perm
    assert sorted(perm.images.tolist()) == list(range(Gam.n**k))

import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cayleyspec.errors import InvalidOrder, NoIdentity, NotAssociative, NotLatinSquare
from cayleyspec.groups import (builtin_group, direct_product, load_group, make_cyclic, make_from_table,
                               nilpotency_class, regular_perm, symmetric_group)

BUILTINS = ["Z1", "Z2", "Z3", "Z4", "Z2xZ2", "S3", "D4", "Q8", "Z6", "D8"]


def test_cyclic_small():
    assert make_cyclic(1).order == 1
    assert make_cyclic(2).table == ((0, 1), (1, 0))
    G = make_cyclic(3)
    assert G.is_abelian and G.order == 3


def test_cyclic_zero_rejected():
    with pytest.raises(InvalidOrder):
        make_cyclic(0)


def test_from_table_s3_and_klein():
    S3 = symmetric_group(3)
    G = make_from_table(S3.labels, S3.table)
    assert not G.is_abelian
    K = make_from_table(["e", "a", "b", "c"], [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]])
    assert K.is_abelian


def test_from_table_errors():
    with pytest.raises(NotLatinSquare):
        make_from_table(["a", "b"], [[0, 1], [1, 1]])
    with pytest.raises(NotLatinSquare):
        make_from_table(["a", "b"], [[0, 1], [1]])
    # latin square without an identity element
    with pytest.raises(NoIdentity):
        make_from_table(["a", "b", "c"], [[1, 0, 2], [0, 2, 1], [2, 1, 0]])
    # loop with identity that is not associative (order 5 Latin square)
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NotAssociative):
        make_from_table(list("abcde"), t)


def test_identity_moved_first():
    G = make_from_table(["b", "a"], [[1, 0], [0, 1]])
    assert G.labels[0] == "a"
    assert G.table == ((0, 1), (1, 0))


def test_regular_perm_examples():
    Z2, Z3 = make_cyclic(2), make_cyclic(3)
    assert regular_perm(Z2, 0).is_identity()
    assert list(regular_perm(Z2, 1).images) == [1, 0]
    assert regular_perm(Z3, 1).cycles() == [(0, 1, 2)]


@pytest.mark.parametrize("name", BUILTINS)
def test_regular_representation_is_homomorphism(name):
    G = builtin_group(name)
    for g, h in itertools.product(range(G.order), repeat=2):
        assert regular_perm(G, g) * regular_perm(G, h) == regular_perm(G, G.mul(g, h))
    assert [regular_perm(G, g).is_identity() for g in range(G.order)] == [g == 0 for g in range(G.order)]


@pytest.mark.parametrize("name", BUILTINS)
def test_builtins_are_groups(name):
    G = builtin_group(name)
    t = G.array
    assert np.array_equal(t[0], np.arange(G.order)) and np.array_equal(t[:, 0], np.arange(G.order))
    for a in range(G.order):
        assert G.mul(a, G.inv(a)) == 0


def test_builtin_orders_and_flags():
    assert builtin_group("D4").order == 8 and not builtin_group("D4").is_abelian
    assert builtin_group("Q8").order == 8 and not builtin_group("Q8").is_abelian
    assert builtin_group("Z2xZ2").is_abelian
    assert direct_product(make_cyclic(2), make_cyclic(3)).order == 6


def test_nilpotency_classes():
    for name, c in [("D4", 2), ("Q8", 2), ("D8", 3), ("Z4", 1)]:
        G = builtin_group(name)
        assert nilpotency_class(G, frozenset(range(G.order))) == c
    S3 = symmetric_group(3)
    assert nilpotency_class(S3, frozenset(range(6))) is None


def test_load_group_json(tmp_path):
    p = tmp_path / "z3.json"
    p.write_text('{"labels": ["0", "1", "2"], "table": [[0,1,2],[1,2,0],[2,0,1]]}')
    G = load_group(p)
    assert G.order == 3 and G.name == "z3"
    assert load_group("S3").order == 6


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 12), st.data())
def test_cyclic_power_and_order(n, data):
    G = make_cyclic(n)
    a = data.draw(st.integers(0, n - 1))
    assert G.power(a, G.element_order(a)) == 0
    assert G.power(a, -1) == G.inv(a)

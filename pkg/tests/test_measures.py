import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from cayleyspec.groups import make_cyclic
from cayleyspec.measures import (cdf, cos_power_class_sum, euler_phi_identity_partial, golden_grid, kns_cdf_series,
                                 kns_measure, kns_tail_bound, level_measure, level_moment, moment,
                                 weak_convergence_report)
from cayleyspec.spectra import atom_value
from cayleyspec.walks import kesten_moments


def test_kns_weights():
    m = kns_measure(2, 3)
    assert [(a.p, a.q, a.weight) for a in m.atoms] == [
        (1, 3, Fraction(1, 7)), (1, 2, Fraction(1, 3)), (2, 3, Fraction(1, 7))]
    assert kns_measure(3, 2).atoms[0].weight == Fraction(1, 2)
    assert all(a.q >= 2 for a in kns_measure(4, 10).atoms)


def test_kns_mass_plus_tail_covers_one():
    for n in (2, 3, 5):
        for Q in (2, 5, 20):
            m = kns_measure(n, Q)
            assert m.mass < 1 <= m.mass + m.tail


def test_tail_bound_decreases():
    vals = [kns_tail_bound(2, Q) for Q in range(2, 30)]
    assert all(a > b for a, b in zip(vals, vals[1:]))


def test_invalid_arguments():
    with pytest.raises(ValueError):
        kns_measure(1, 5)
    with pytest.raises(ValueError):
        moment(kns_measure(2, 4), -1)
    with pytest.raises(ValueError):
        cdf(kns_measure(2, 4), 0.5, view="x")


def test_level_measure_is_probability():
    for n in (2, 3, 6):
        for k in range(6):
            m = level_measure(n, k)
            assert m.mass == 1
            assert (0, 1) in [(a.p, a.q) for a in m.atoms]
    assert level_measure(make_cyclic(3), 2).mass == 1


def test_cdf_examples():
    m = kns_measure(2, 40)
    lo, hi = cdf(m, Fraction(1, 2))
    assert lo <= Fraction(2, 3) <= hi
    assert hi - lo < 1e-9
    # the jump at 1/2 is the atom's weight
    below = cdf(m, Fraction(1, 2) - Fraction(1, 10**6))[0]
    assert lo - below == Fraction(1, 3)
    assert cdf(m, 0.999999, view="lambda")[0] == m.mass
    assert cdf(m, -1.0, view="lambda")[0] == 0


def test_cdf_series_matches_cdf():
    m = kns_measure(3, 25)
    for x in (Fraction(1, 5), Fraction(1, 2), Fraction(7, 9), 0.3141):
        assert kns_cdf_series(3, x, 25) == cdf(m, x)[0]


def test_euler_identity_partial_sums():
    assert euler_phi_identity_partial(2, 2)[0] == Fraction(1, 3)
    assert euler_phi_identity_partial(2, 3)[0] == Fraction(1, 3) + Fraction(2, 7)
    for n in (2, 3, 4, 5):
        partial, tail = euler_phi_identity_partial(n, 60)
        assert partial < 1 <= partial + tail
        assert abs(1 - float(partial)) < 1e-8


def test_class_sums_match_floats():
    for q in range(1, 13):
        for m in range(9):
            exact = cos_power_class_sum(q, m)
            ps = [0] if q == 1 else [p for p in range(1, q) if math.gcd(p, q) == 1]
            approx = sum(atom_value(p, q) ** m for p in ps)
            assert float(exact) == pytest.approx(approx, abs=1e-12)


def test_moments():
    m = kns_measure(2, 40)
    assert moment(m, 1)[0] == 0
    assert float(moment(m, 2)[0]) == pytest.approx(0.25, abs=1e-9)
    assert moment(level_measure(2, 3), 0)[0] == 1
    # a measure that is not closed under the full class falls back to floats
    partial = kns_measure(2, 3)
    partial.atoms.pop()
    value, _ = moment(partial, 2)
    assert isinstance(value, float)


def test_level_moments_decrease_to_walk_moments():
    walk = kesten_moments(make_cyclic(2), 6)
    for j in range(0, 7, 2):
        vals = [level_moment(2, k, j) for k in range(6)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        assert vals[-1] >= walk[j]
    # the top eigenvalue 1 has no partner at -1, so odd level moments are positive
    assert level_moment(2, 3, 3) > 0


def test_level_moment_agrees_with_spectrum():
    for k in range(4):
        for j in range(6):
            assert float(level_moment(3, k, j)) == pytest.approx(float(moment(level_measure(3, k), j)[0]), abs=1e-12)


def test_level_moment_large_powers_exact():
    # large exponents go through object arithmetic
    assert level_moment(2, 2, 40) == moment(level_measure(2, 2), 40)[0]


def test_weak_convergence_golden_grid():
    report = weak_convergence_report(2, 8, golden_grid(5))
    final = [r["error"] for r in report["rows"] if r["level"] == 8]
    assert max(final) < 0.02
    assert report["non_monotone"] == []


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(0, 7), st.fractions(0, 1))
def test_level_cdf_monotone_in_x(n, k, x):
    m = level_measure(n, k)
    assert cdf(m, x)[0] <= cdf(m, min(Fraction(1), x + Fraction(1, 100)))[0]

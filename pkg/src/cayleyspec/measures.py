"""Discrete spectral measures: the KNS limit measure and the level counting measures."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from sympy import divisors, mobius, totient

from .groups import FiniteGroup, make_cyclic
from .spectra import adjacency_matrix, atom_value, closed_form_spectrum


@dataclass(frozen=True)
class Atom:
    """Point mass at cos(p pi / q); the atom at 1 is p=0, q=1."""

    p: int
    q: int
    weight: Fraction

    @property
    def z(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def value(self) -> float:
        return atom_value(self.p, self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "value": self.value,
                "weight": fraction_str(self.weight), "weight_float": float(self.weight)}


@dataclass
class DiscreteMeasure:
    """Atoms plus a rational bound on the mass left out by truncation.

    The same atoms describe the measure on [-1, 1] (position cos(pi z)) and
    on [0, 1] (position z = p/q).
    """

    atoms: list[Atom]
    q_max: int | None = None
    tail: Fraction = Fraction(0)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = [(a.p, a.q) for a in self.atoms]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate atom labels")
        if any(a.weight <= 0 for a in self.atoms):
            raise ValueError("weights must be positive")

    @property
    def mass(self) -> Fraction:
        return sum((a.weight for a in self.atoms), Fraction(0))

    def to_json(self) -> dict:
        return {"q_max": self.q_max, "tail": fraction_str(self.tail), "tail_float": float(self.tail),
                "mass": fraction_str(self.mass), "atoms": [a.to_json() for a in self.atoms], **self.meta}


def fraction_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def kns_tail_bound(n: int, q_max: int) -> Fraction:
    """Upper bound for (n-1)^2 sum_{q > q_max} phi(q)/(n^q - 1), using phi(q) <= q."""
    Q = q_max
    x = Fraction(1, n)
    geometric = x ** (Q + 1) * ((Q + 1) - Q * x) / (1 - x) ** 2   # sum_{q>Q} q x^q
    return (n - 1) ** 2 * Fraction(n ** (Q + 1), n ** (Q + 1) - 1) * geometric


def kns_measure(n: int, q_max: int) -> DiscreteMeasure:
    if n < 2 or q_max < 2:
        raise ValueError("need n >= 2 and q_max >= 2")
    atoms = []
    for q in range(2, q_max + 1):
        w = Fraction((n - 1) ** 2, n**q - 1)
        atoms.extend(Atom(p, q, w) for p in range(1, q) if math.gcd(p, q) == 1)
    atoms.sort(key=lambda a: a.z)
    return DiscreteMeasure(atoms, q_max, kns_tail_bound(n, q_max), {"n": n, "kind": "kns"})


def level_measure(n: int | FiniteGroup, k: int) -> DiscreteMeasure:
    """Eigenvalue frequencies of M_k."""
    if isinstance(n, FiniteGroup):
        n = n.order
    spec = closed_form_spectrum(n, k)
    atoms = [Atom(a.p, a.q, Fraction(a.multiplicity, n**k)) for a in spec.atoms]
    atoms.sort(key=lambda a: a.z)
    return DiscreteMeasure(atoms, k + 1, Fraction(0), {"n": n, "kind": "level", "level": k})


def cdf(m: DiscreteMeasure, x: float | Fraction, view: str = "z") -> tuple[Fraction, Fraction]:
    """Enclosure [lower, upper] of the distribution function at ``x``.

    ``view="z"`` is the measure on [0, 1] (atoms at p/q), ``view="lambda"`` on [-1, 1].
    """
    if view == "z":
        t = Fraction(x)
        lower = sum((a.weight for a in m.atoms if a.z <= t), Fraction(0))
    elif view == "lambda":
        lower = sum((a.weight for a in m.atoms if a.value <= float(x)), Fraction(0))
    else:
        raise ValueError(f"unknown view {view!r}")
    return lower, min(Fraction(1), lower + m.tail)


def phi_x(q: int, x: float | Fraction) -> int:
    """Number of 1 <= p <= x q coprime to q."""
    top = math.floor(Fraction(x) * q)
    return sum(1 for p in range(1, min(top, q) + 1) if math.gcd(p, q) == 1)


def kns_cdf_series(n: int, x: float | Fraction, Q: int) -> Fraction:
    """(n-1)^2 sum_{q=2}^Q phi_x(q) / (n^q - 1)."""
    return (n - 1) ** 2 * sum((Fraction(phi_x(q, x), n**q - 1) for q in range(2, Q + 1)), Fraction(0))


@lru_cache(maxsize=None)
def _full_cos_power_sum(d: int, m: int) -> Fraction:
    """sum_{p=1}^{d-1} cos^m(p pi / d), exactly."""
    # sum over p = 0..2d-1 equals (2d / 2^m) * sum of C(m, j) with 2d | 2j - m
    full = Fraction(2 * d * sum(math.comb(m, j) for j in range(m + 1) if (2 * j - m) % (2 * d) == 0), 2**m)
    return (full - 1 - (-1) ** m) / 2


@lru_cache(maxsize=None)
def cos_power_class_sum(q: int, m: int) -> Fraction:
    """sum over 1 <= p < q, gcd(p, q) = 1 of cos^m(p pi / q), exactly (q = 1 gives cos 0 = 1)."""
    if q == 1:
        return Fraction(1)
    return sum((int(mobius(q // e)) * _full_cos_power_sum(e, m) for e in divisors(q) if e > 1), Fraction(0))


def moment(m: DiscreteMeasure, j: int) -> tuple[Fraction | float, Fraction]:
    """Truncated j-th moment and an error bar (the tail mass, since |x| <= 1).

    Exact whenever every q present carries all its coprime p with one common weight.
    """
    if j < 0:
        raise ValueError("order must be non-negative")
    by_q: dict[int, list[Atom]] = {}
    for a in m.atoms:
        by_q.setdefault(a.q, []).append(a)
    exact = True
    total = Fraction(0)
    for q, atoms in by_q.items():
        full = 1 if q == 1 else int(totient(q))
        if len(atoms) != full or len({a.weight for a in atoms}) != 1:
            exact = False
            break
        total += atoms[0].weight * cos_power_class_sum(q, j)
    if not exact:
        return float(sum(float(a.weight) * a.value**j for a in m.atoms)), m.tail
    return total, m.tail


def level_moment(G: FiniteGroup | int, k: int, j: int) -> Fraction:
    """tr(M_k^j) / n^k, exactly."""
    if isinstance(G, int):
        G = make_cyclic(G)
    n = G.order
    if j * math.log2(2 * n) + k * math.log2(n) > 60:
        A = adjacency_matrix(G, k).dense().astype(object)
        power = np.identity(A.shape[0], dtype=object)
        for _ in range(j):
            power = power.dot(A)
        trace = int(sum(power[i, i] for i in range(A.shape[0])))
    else:
        A = adjacency_matrix(G, k).matrix
        power = sp.identity(A.shape[0], dtype=np.int64, format="csr")
        for _ in range(j):
            power = power @ A
        trace = int(power.diagonal().sum())
    return Fraction(trace, (2 * n) ** j * n**k)


def euler_phi_identity_partial(n: int, Q: int) -> tuple[Fraction, Fraction]:
    """(n-1)^2 sum_{q=2}^Q phi(q)/(n^q - 1) and a bound on the rest of the series."""
    if n < 2:
        raise ValueError("need n >= 2")
    partial = (n - 1) ** 2 * sum((Fraction(int(totient(q)), n**q - 1) for q in range(2, Q + 1)), Fraction(0))
    return partial, kns_tail_bound(n, max(Q, 1))


@dataclass
class ConvergenceRow:
    level: int
    x: float
    level_cdf: Fraction
    limit_low: Fraction
    limit_high: Fraction

    @property
    def error(self) -> float:
        """Distance from the level value to the limit enclosure."""
        if self.level_cdf < self.limit_low:
            return float(self.limit_low - self.level_cdf)
        if self.level_cdf > self.limit_high:
            return float(self.level_cdf - self.limit_high)
        return 0.0


def golden_grid(size: int) -> list[float]:
    """Points frac(j / golden ratio), j = 1..size, sorted: far from rationals with small q."""
    g = (math.sqrt(5) - 1) / 2
    return sorted((j * g) % 1.0 for j in range(1, size + 1))


def weak_convergence_report(n: int, k_max: int, grid: list[float], q_max: int = 40) -> dict:
    """|F_{sigma_k}(x) - F_sigma(x)| on the z-scale for every grid point and level."""
    limit = kns_measure(n, q_max)
    rows = []
    for k in range(k_max + 1):
        lm = level_measure(n, k)
        for x in grid:
            lo, hi = cdf(limit, x)
            rows.append(ConvergenceRow(k, x, cdf(lm, x)[0], lo, hi))
    anomalies = []
    for x in grid:
        errs = [r.error for r in rows if r.x == x]
        for k in range(1, len(errs)):
            if errs[k] > errs[k - 1] + 1e-15:
                anomalies.append({"x": x, "level": k})
    return {
        "n": n,
        "k_max": k_max,
        "rows": [{"level": r.level, "x": r.x, "level_cdf": fraction_str(r.level_cdf),
                  "limit_low": fraction_str(r.limit_low), "limit_high": fraction_str(r.limit_high),
                  "error": r.error} for r in rows],
        "non_monotone": anomalies,
    }

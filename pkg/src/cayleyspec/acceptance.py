"""The reproduction suite: one check per acceptance criterion."""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .groups import builtin_group, make_cyclic, symmetric_group
from .measures import euler_phi_identity_partial, kns_measure, level_moment, moment
from .spectra import (adjacency_matrix, closed_form_spectrum, generator_level_perms,
                      match_spectrum, numeric_spectrum, verify_sum_nonidentity)
from .tree import AutomatonGroup, depth, fix_count, freeness_report
from .walks import kesten_moments
from .words import gamma_depth_witness, last_entry_check, letter_count
from .zeta import exponent_verdict, finite_zeta_log, limit_zeta_log, schreier_multigraph


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.key:>3} {self.title}: {self.detail} ({self.seconds:.1f}s)"

    def to_json(self) -> dict:
        return {"criterion": self.key, "title": self.title, "passed": self.passed,
                "detail": self.detail, "seconds": round(self.seconds, 3)}


def spectrum_theorem() -> tuple[bool, str]:
    cases = [(make_cyclic(2), 6), (make_cyclic(3), 6), (symmetric_group(3), 4)]
    start = time.perf_counter()
    for G, k_max in cases:
        for k in range(k_max + 1):
            ok, why = match_spectrum(numeric_spectrum(adjacency_matrix(G, k), G.order),
                                     closed_form_spectrum(G.order, k), tol=1e-8)
            if not ok:
                return False, f"{G.name} k={k}: {why}"
    elapsed = time.perf_counter() - start
    return elapsed < 60, f"Z2, Z3 up to k=6 and S3 up to k=4 match; {elapsed:.1f}s (limit 60s)"


def multiplicity_sum() -> tuple[bool, str]:
    start = time.perf_counter()
    bad = [(n, k) for n in range(2, 7) for k in range(9) if closed_form_spectrum(n, k).total != n**k]
    elapsed = time.perf_counter() - start
    return not bad and elapsed < 1, f"{'all sums equal n^k' if not bad else bad}; {elapsed:.3f}s"


def euler_identity() -> tuple[bool, str]:
    worst = max(abs(1 - float(euler_phi_identity_partial(n, 60)[0])) for n in (2, 3, 4, 5))
    return worst < 1e-8, f"max |1 - partial sum| = {worst:.2e} for n in 2..5"


def kns_equals_kesten() -> tuple[bool, str]:
    parts = []
    for name in ("Z2", "Z3", "Z4", "Z2xZ2"):
        G = builtin_group(name)
        walk = kesten_moments(G, 10)
        K = kns_measure(G.order, 40)
        gap = max(abs(moment(K, m)[0] - walk[m]) for m in range(11))
        if gap > K.tail:
            return False, f"{name}: gap {float(gap):.2e} exceeds tail {float(K.tail):.2e}"
        parts.append(name)
    G = make_cyclic(2)
    p2 = kesten_moments(G, 2)[2]
    k2 = moment(kns_measure(2, 40), 2)[0]
    ok = p2 == Fraction(1, 4) and abs(float(k2) - 0.25) < 1e-6
    return ok, f"{', '.join(parts)} within tail bound; p_2 = {p2}, |KNS_2 - 1/4| = {abs(float(k2) - 0.25):.1e}"


def average_fix_fraction(n: int, k: int, m: int) -> Fraction:
    """(1/|S|^m) sum over words of length m in the generators and inverses of |Fix_k| / n^k."""
    G = make_cyclic(n)
    perms = generator_level_perms(G, k)
    inverses = [np.argsort(p) for p in perms]
    letters = list(perms) + inverses
    size = perms.shape[1]
    total = 0
    for word in itertools.product(range(len(letters)), repeat=m):
        img = np.arange(size)
        for a in word:
            img = letters[a][img]
        total += int(np.count_nonzero(img == np.arange(size)))
    return Fraction(total, len(letters) ** m * size)


def level_moment_identity() -> tuple[bool, str]:
    for k in range(5):
        for m in range(5):
            lm = level_moment(2, k, m)
            af = average_fix_fraction(2, k, m)
            if lm != af:
                return False, f"k={k}, m={m}: {lm} != {af}"
    return True, "tr(M_k^m)/2^k equals the average fixed fraction for k, m <= 4"


def freeness() -> tuple[bool, str]:
    Gam = AutomatonGroup(make_cyclic(2))
    rep = freeness_report(Gam.generators(), 4, 8)
    bad = [v.element for v in rep.elements if v.verdict != "identity" and
           (v.verdict != "measure-zero-fixed" or not v.decay_ok)]
    fixes = [fix_count(Gam.x(), k) for k in range(1, 11)]
    ok = not bad and fixes == [2] * 10
    counts = rep.counts()
    return ok, (f"{counts.get('measure-zero-fixed', 0)} elements measure-zero-fixed with decay certified, "
                f"{counts.get('identity', 0)} trivial words skipped; fix_count(x, 1..10) = {sorted(set(fixes))}"
                + (f"; failures {bad[:3]}" if bad else ""))


def depth_law() -> tuple[bool, str]:
    for G in (make_cyclic(2), make_cyclic(3), symmetric_group(3)):
        Gam = AutomatonGroup(G)
        for g in range(1, G.order):
            for n in range(6):
                d = depth(Gam.conj_power(g, n), n + 2)
                if d != n + 1:
                    return False, f"{G.name}, g={G.labels[g]}, n={n}: depth {d}"
    return True, "depth(x^n g x^-n) = n+1 for n <= 5, all g != 1 in Z2, Z3, S3"


def sum_lemma() -> tuple[bool, str]:
    for n in (2, 3):
        for k in range(5):
            if not verify_sum_nonidentity(make_cyclic(n), k):
                return False, f"n={n}, k={k}"
    return True, "exact matrix identity for n in {2,3}, k <= 4"


def zeta_oracle() -> tuple[bool, str]:
    G = make_cyclic(2)
    graphs = [schreier_multigraph(G, k) for k in (1, 2)]
    verdict = exponent_verdict(graphs, 8)
    return verdict["adopted"] == "vertex", (f"log-series equals path counts on X_1, X_2 for r <= 8 with exponent "
                                            f"|E|-|V| (agreement: {verdict['agrees']})")


def zeta_limit() -> tuple[bool, str]:
    G = make_cyclic(2)
    X = schreier_multigraph(G, 8)
    finite = finite_zeta_log(X, 6)
    limit = limit_zeta_log(kns_measure(2, 40), 2, 6, normalization="edge")
    gaps = [abs(float(a / X.num_edges - b)) for a, b in zip(finite.coefficients, limit.coefficients)]
    worst = max(gaps)
    return worst < 1e-3, ("max |coef/|E(X_8)| - limit coef| over r <= 6 is "
                          f"{worst:.4f} (per r: {', '.join(f'{g:.4f}' for g in gaps)}); tolerance 1e-3")


def last_entry_and_words() -> tuple[bool, str]:
    if any(letter_count(n, i) != 2 ** (n - i) for n in range(11) for i in range(n + 1)):
        return False, "letter counts"
    Z2 = make_cyclic(2)
    gz = AutomatonGroup(Z2)
    for n in range(4):
        for g in range(2):
            for tup in itertools.product(range(2), repeat=n + 1):
                if not last_entry_check(Z2, g, tup, gz):
                    return False, f"Z2 last entry g={g}, tuple={tup}"
    S3 = symmetric_group(3)
    gs = AutomatonGroup(S3)
    rng = random.Random(20240601)
    for _ in range(50):
        n = rng.randint(0, 2)
        g = rng.randrange(S3.order)
        tup = [rng.randrange(S3.order) for _ in range(n + 1)]
        if not last_entry_check(S3, g, tup, gs):
            return False, f"S3 last entry g={g}, tuple={tup}"
    rep = gamma_depth_witness(S3, 1, 1, p=2)
    ok = rep.status == "differs" and rep.certified_depth == 3
    return ok, f"letter counts n <= 10, last-entry checks pass; gamma_1 in S3 certifies depth {rep.certified_depth}"


def density() -> tuple[bool, str]:
    vals = sorted(closed_form_spectrum(2, 8).values())
    gap = max(b - a for a, b in zip(vals, vals[1:]))
    return gap < 0.1, f"max gap {gap:.4f} between consecutive atoms of Sp(M_8), n=2"


CRITERIA: list[tuple[str, str, Callable[[], tuple[bool, str]]]] = [
    ("1", "spectrum theorem vs eigensolver", spectrum_theorem),
    ("2", "multiplicities sum to n^k", multiplicity_sum),
    ("3", "Euler totient identity", euler_identity),
    ("4", "KNS moments equal walk return probabilities", kns_equals_kesten),
    ("5", "level moments equal average fixed fractions", level_moment_identity),
    ("6", "freeness and fixed points of x", freeness),
    ("7", "depth of x^n g x^-n", depth_law),
    ("8", "sum over distinct generator pairs", sum_lemma),
    ("9a", "zeta determinant formula vs path counts", zeta_oracle),
    ("9b", "limit zeta vs normalised finite zeta at level 8", zeta_limit),
    ("10", "word sequence and last-entry formula", last_entry_and_words),
    ("11", "spectrum density", density),
]


def run_check(key: str) -> CheckResult:
    for k, title, fn in CRITERIA:
        if k == key:
            start = time.perf_counter()
            passed, detail = fn()
            return CheckResult(k, title, bool(passed), detail, time.perf_counter() - start)
    raise KeyError(f"no criterion {key!r}")


def run_all() -> list[CheckResult]:
    return [run_check(k) for k, _, _ in CRITERIA]

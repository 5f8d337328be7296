"""Exact random walks on the lamplighter-type group G wr Z."""

from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .groups import FiniteGroup

WALK_BUDGET = 14


@dataclass(frozen=True)
class WreathElement:
    """(lamps, shift) with lamps a sorted tuple of (position, non-identity element)."""

    shift: int = 0
    lamps: tuple[tuple[int, int], ...] = ()

    @staticmethod
    def make(shift: int, lamps: dict[int, int], G: FiniteGroup) -> WreathElement:
        e = G.identity
        return WreathElement(shift, tuple(sorted((i, g) for i, g in lamps.items() if g != e)))

    def is_identity(self) -> bool:
        return self.shift == 0 and not self.lamps


def wreath_multiply(a: WreathElement, b: WreathElement, G: FiniteGroup) -> WreathElement:
    """(f1, m1)(f2, m2) = (f1 * shift^m1(f2), m1 + m2) with (shift^m f)(i) = f(i - m)."""
    lamps = dict(a.lamps)
    for i, g in b.lamps:
        j = i + a.shift
        lamps[j] = G.mul(lamps.get(j, G.identity), g)
    return WreathElement.make(a.shift + b.shift, lamps, G)


def wreath_inverse(a: WreathElement, G: FiniteGroup) -> WreathElement:
    return WreathElement.make(-a.shift, {i - a.shift: G.inv(g) for i, g in a.lamps}, G)


def step_distribution(G: FiniteGroup) -> list[tuple[WreathElement, Fraction]]:
    """The generators t g_i and g_i t^-1, each with probability 1/(2n)."""
    p = Fraction(1, 2 * G.order)
    steps = [WreathElement.make(1, {1: g}, G) for g in range(G.order)]
    steps += [WreathElement.make(-1, {0: g}, G) for g in range(G.order)]
    return [(s, p) for s in steps]


def walk_distribution(G: FiniteGroup, m: int, prune: bool = False) -> dict[WreathElement, Fraction]:
    """Distribution after m steps. With ``prune`` only states that can still return
    to the identity within the remaining steps are kept (for return probabilities)."""
    n = G.order
    steps = [s for s, _ in step_distribution(G)]
    counts: dict[WreathElement, int] = {WreathElement(): 1}
    for done in range(m):
        left = m - done - 1
        nxt: dict[WreathElement, int] = defaultdict(int)
        for el, c in counts.items():
            for s in steps:
                w = wreath_multiply(el, s, G)
                if prune and (abs(w.shift) > left or len(w.lamps) > left or (w.shift - left) % 2):
                    continue
                nxt[w] += c
        counts = dict(nxt)
    total = (2 * n) ** m
    return {el: Fraction(c, total) for el, c in sorted(counts.items(), key=lambda kv: (kv[0].shift, kv[0].lamps))}


def return_probability(G: FiniteGroup, m: int, budget: int | None = None) -> Fraction:
    cap = WALK_BUDGET if budget is None else budget
    if m > cap:
        raise BudgetExceeded(f"{m} steps exceeds the walk budget {cap}")
    if m % 2:
        return Fraction(0)
    return walk_distribution(G, m, prune=True).get(WreathElement(), Fraction(0))


def kesten_moments(G: FiniteGroup, m_max: int, budget: int | None = None) -> list[Fraction]:
    return [return_probability(G, m, budget) for m in range(m_max + 1)]


def monte_carlo_return(G: FiniteGroup, m: int, samples: int, seed: int = 0) -> float:
    """Approximate p_m(1) from simulated walks (not exact)."""
    rng = random.Random(seed)
    steps = [s for s, _ in step_distribution(G)]
    hits = 0
    for _ in range(samples):
        el = WreathElement()
        for _ in range(m):
            el = wreath_multiply(el, rng.choice(steps), G)
        hits += el.is_identity()
    return hits / samples

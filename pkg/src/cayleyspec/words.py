"""The word sequence w_n and the depth witnesses built from conjugates x^m g x^-m."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from sympy import primefactors

from .errors import HypothesisNotSatisfied, MissingVariable
from .groups import FiniteGroup, is_power_of_two, nilpotency_class
from .tree import AutomatonGroup, depth


@lru_cache(maxsize=None)
def w_sequence(n: int) -> tuple[int, ...]:
    """w_{-1} is empty, w_0 = t0 and w_{n+1} = w_n(t0, t0 t1, ..., t0...tn) t0 t1 ... t_{n+1}.

    Letters are variable indices.
    """
    if n < -1:
        raise ValueError("n must be at least -1")
    if n == -1:
        return ()
    if n == 0:
        return (0,)
    prev = w_sequence(n - 1)
    out: list[int] = []
    for i in prev:
        out.extend(range(i + 1))
    out.extend(range(n + 1))
    return tuple(out)


def letter_count(n: int, i: int) -> int:
    if not 0 <= i <= n:
        raise ValueError(f"need 0 <= i <= n, got i={i}, n={n}")
    return w_sequence(n).count(i)


def substitute(w: Sequence[int], values: Sequence[int], G: FiniteGroup) -> int:
    """Evaluate the word in G with t_i = values[i]."""
    for i in w:
        if i >= len(values):
            raise MissingVariable(f"no value for t{i}")
    return G.prod([values[i] for i in w])


def last_entry_formula(G: FiniteGroup, g: int, tup: Sequence[int]) -> int:
    """(g^((-1)^n))^(w_{n-1}(g_0..g_{n-1})) g_n for a tuple of length n+1."""
    n = len(tup) - 1
    base = g if n % 2 == 0 else G.inv(g)
    b = substitute(w_sequence(n - 1), tup[:n], G)
    return G.mul(G.conj(base, b), tup[n])


def last_entry_action(G: FiniteGroup, g: int, tup: Sequence[int], gamma: AutomatonGroup | None = None) -> int:
    gamma = gamma or AutomatonGroup(G)
    n = len(tup) - 1
    return gamma.conj_power(g, n).act_sequential(list(tup))[-1]


def last_entry_check(G: FiniteGroup, g: int, tup: Sequence[int], gamma: AutomatonGroup | None = None) -> bool:
    return last_entry_action(G, g, tup, gamma) == last_entry_formula(G, g, tup)


@dataclass
class WitnessReport:
    theorem: int
    n: int
    status: str                       # "differs", "no-difference" or "hypothesis-not-satisfied"
    elements: dict[str, str] = field(default_factory=dict)
    words: list[list[str]] = field(default_factory=list)
    last_letters: list[str] = field(default_factory=list)
    certified_depth: int | None = None
    machine_depth: int | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "theorem": self.theorem, "n": self.n, "status": self.status, "elements": self.elements,
            "witness_words": self.words, "last_letters": self.last_letters,
            "certified_depth": self.certified_depth, "machine_depth": self.machine_depth, "note": self.note,
        }


def odd_order_witness(G: FiniteGroup, p: int | None = None) -> tuple[int, int, int]:
    """(g, h, p): g non-central of odd order, h of least order not commuting with g, p | ord(h)."""
    for g in range(G.order):
        if G.element_order(g) % 2 == 1 and not G.is_central(g):
            others = [h for h in range(G.order) if not G.commutes(g, h)]
            h = min(others, key=lambda e: (G.element_order(e), e))
            primes = primefactors(G.element_order(h))
            if p is None:
                return g, h, primes[0]
            if p in primes:
                return g, h, p
    raise HypothesisNotSatisfied(f"{G.name or 'group'} has no non-central element of odd order"
                                 + ("" if p is None else f" with a suitable element of order divisible by {p}"))


def two_group_witness(G: FiniteGroup) -> tuple[int, int, int]:
    """(g, f, h) inside a 2-subgroup with h^-1 f h f^-1 not commuting with g."""
    two = [a for a in range(G.order) if is_power_of_two(G.element_order(a))]
    for g in two:
        for f in two:
            for h in two:
                c = G.prod([G.inv(h), f, h, G.inv(f)])
                if G.commutes(c, g):
                    continue
                if is_power_of_two(len(G.generated_subgroup([g, f, h]))):
                    return g, f, h
    raise HypothesisNotSatisfied(
        f"{G.name or 'group'} has no 2-subgroup of nilpotency class above 2; the embedding question is open "
        "for direct products of an abelian group with a 2-group of class 2 (e.g. D4, Q8)")


def gamma_depth_witness(G: FiniteGroup, theorem: int, n: int, p: int | None = None,
                        machine_budget: int = 2000) -> WitnessReport:
    """Act with the theorem's gamma_n on its witness words and compare last letters.

    The machine depth is also computed when |G|^(depth - 1) is within ``machine_budget``,
    since the minimal machine of such an element can have that many states.
    """
    if G.is_abelian:
        raise HypothesisNotSatisfied(f"{G.name or 'group'} is abelian")
    gamma = AutomatonGroup(G)
    lab = G.labels
    if theorem == 1:
        g, h, p = odd_order_witness(G, p)
        if n < 1:
            raise ValueError("n must be positive")
        N = p**n
        v = G.mul(g, G.inv(h))
        conj = gamma.conj_power(h, N)
        el = conj * gamma.embedded(v) * conj
        word = [G.identity] * (N + 1)
        image = el.act_sequential(word)
        differs = image[-1] != word[-1]
        report = WitnessReport(1, n, "differs" if differs else "no-difference",
                               {"g": lab[g], "h": lab[h], "v": lab[v], "p": str(p)},
                               [[lab[a] for a in word]], [lab[word[-1]], lab[image[-1]]])
        expected = N + 1
    elif theorem == 2:
        if n < 3:
            raise ValueError("the witness words need n >= 3")
        g, f, h = two_group_witness(G)
        el = gamma.conj_power(g, n) * gamma.embedded(h) * gamma.conj_power(G.inv(g), n)
        w1 = [G.identity] * (n + 1)
        w1[n - 2] = f
        w2 = list(w1)
        w2[0] = h
        a1 = last_entry_action(G, g, w1, gamma)
        a2 = last_entry_action(G, g, w2, gamma)
        differs = a1 != a2
        sub = sorted(G.generated_subgroup([g, f, h]))
        report = WitnessReport(2, n, "differs" if differs else "no-difference",
                               {"g": lab[g], "f": lab[f], "h": lab[h],
                                "subgroup_order": str(len(sub)),
                                "subgroup_class": str(nilpotency_class(G, frozenset(sub)))},
                               [[lab[a] for a in w1], [lab[a] for a in w2]], [lab[a1], lab[a2]])
        if not differs:
            report.note = "h^(2^(n-1)) != 1 at this n; the argument only covers n with h^(2^(n-1)) = 1"
        expected = n + 1
    else:
        raise ValueError("theorem must be 1 or 2")
    if report.status == "differs":
        report.certified_depth = expected
    if G.order ** (expected - 1) <= machine_budget:
        report.machine_depth = depth(el, expected + 1)
    return report

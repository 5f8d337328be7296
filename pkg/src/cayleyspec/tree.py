"""Elements of automata groups as words in machine states, and their action on tree levels."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from .errors import LevelTooLarge
from .groups import FiniteGroup, Permutation
from .machines import (
    MachineState,
    MealyMachine,
    act,
    act_all,
    compose,
    diagonal_reachable_identity,
    diagonal_states,
    identity_machine,
    identity_states,
    invert,
    reset_inverse_machine,
)

LEVEL_BUDGET = 2**20


@lru_cache(maxsize=None)
def _inverse_machine(M: MealyMachine) -> MealyMachine:
    return invert(M)


def check_budget(n: int, k: int, budget: int | None = None) -> None:
    if k < 0:
        raise ValueError(f"level must be non-negative, got {k}")
    cap = LEVEL_BUDGET if budget is None else budget
    if n**k > cap:
        raise LevelTooLarge(f"{n}^{k} = {n**k} words exceeds the level budget {cap}")


@dataclass(frozen=True, eq=False)
class TreeElement:
    """Product of generator states and their inverses.

    ``word[0]`` is applied last (function composition, left action).
    """

    machine: MealyMachine
    word: tuple[tuple[int, int], ...] = ()
    name: str = field(default="", compare=False)

    def __post_init__(self):
        for q, e in self.word:
            if e not in (1, -1) or not 0 <= q < self.machine.num_states:
                raise ValueError(f"bad letter {(q, e)}")

    @property
    def n(self) -> int:
        return self.machine.alphabet_size

    @cached_property
    def state(self) -> MachineState:
        """Single (minimised) machine state computing this element."""
        if not self.word:
            return MachineState(identity_machine(self.n), 0)
        inv = _inverse_machine(self.machine)
        factors = [MachineState(self.machine if e == 1 else inv, q) for q, e in self.word]
        return compose(factors)

    def __mul__(self, other: TreeElement) -> TreeElement:
        if other.machine is not self.machine:
            raise ValueError("elements over different machines")
        return TreeElement(self.machine, _reduce(self.word + other.word))

    def inverse(self) -> TreeElement:
        return TreeElement(self.machine, tuple((q, -e) for q, e in reversed(self.word)))

    def __pow__(self, k: int) -> TreeElement:
        base = self if k >= 0 else self.inverse()
        out = TreeElement(self.machine)
        for _ in range(abs(k)):
            out = out * base
        return out

    def __call__(self, w: Sequence[int]) -> list[int]:
        return act(self.state, w)

    def act_sequential(self, w: Sequence[int]) -> list[int]:
        """Apply the letters one at a time, rightmost first (oracle for ``state``)."""
        inv = _inverse_machine(self.machine)
        out = list(w)
        for q, e in reversed(self.word):
            out = act(MachineState(self.machine if e == 1 else inv, q), out)
        return out

    def is_identity(self) -> bool:
        s = self.state
        return s.index in identity_states(s.machine)

    def label(self) -> str:
        if self.name:
            return self.name
        if not self.word:
            return "1"
        return " ".join(self.machine.labels[q] + ("" if e == 1 else "^-1") for q, e in self.word)

    def __repr__(self) -> str:
        return f"TreeElement({self.label()})"


def _reduce(word: tuple[tuple[int, int], ...]) -> tuple[tuple[int, int], ...]:
    out: list[tuple[int, int]] = []
    for q, e in word:
        if out and out[-1] == (q, -e):
            out.pop()
        else:
            out.append((q, e))
    return tuple(out)


class AutomatonGroup:
    """The group generated by the reset machine of ``G`` (equal to the one of its Cayley machine).

    Generators are the reset-machine states; ``x`` is the state of the identity.
    """

    def __init__(self, G: FiniteGroup):
        self.G = G
        self.machine = reset_inverse_machine(G)

    @property
    def n(self) -> int:
        return self.G.order

    def gen(self, g: int) -> TreeElement:
        return TreeElement(self.machine, ((g, 1),))

    def generators(self) -> list[TreeElement]:
        return [self.gen(g) for g in range(self.n)]

    def identity(self) -> TreeElement:
        return TreeElement(self.machine)

    def x(self) -> TreeElement:
        return self.gen(self.G.identity)

    def embedded(self, g: int) -> TreeElement:
        """Copy of ``g`` inside the automaton group: x times the Cayley-machine state of g."""
        return TreeElement(self.machine, _reduce(((0, 1), (g, -1))))

    def conj_power(self, g: int, m: int) -> TreeElement:
        """``x^m g x^-m``."""
        x = self.x()
        return (x**m) * self.embedded(g) * (x ** (-m))

    _TOKEN = re.compile(r"^(\[(?P<emb>[^\]]+)\]|(?P<gen>[^\^\[\]]+))(\^(?P<exp>-?\d+))?$")

    def parse(self, text: str) -> TreeElement:
        """Parse e.g. ``"x^2 [b] x^-2 a^-1"``: bare labels are generators, ``x`` is the
        identity generator and ``[g]`` is the embedded copy of ``g``."""
        out = self.identity()
        for tok in text.split():
            m = self._TOKEN.match(tok)
            if not m:
                raise ValueError(f"cannot parse token {tok!r}")
            if m.group("emb") is not None:
                el = self.embedded(self.G.index_of(m.group("emb")))
            else:
                lab = m.group("gen")
                el = self.x() if lab == "x" else self.gen(self.G.index_of(lab))
            exp = int(m.group("exp")) if m.group("exp") else 1
            out = out * (el**exp)
        return TreeElement(out.machine, out.word, name=text)


@dataclass(frozen=True)
class LevelAction:
    level: int
    perm: Permutation

    def restrict(self, n: int) -> LevelAction:
        """Action on level ``k-1`` obtained by dropping the last letter."""
        if self.level == 0:
            raise ValueError("level 0 has no parent level")
        images = self.perm.images[:: n] // n
        return LevelAction(self.level - 1, Permutation(images))


def state_level_perms(M: MealyMachine, k: int) -> np.ndarray:
    """Row q = permutation of level k induced by state q, via the wreath recursion
    ``q = λ_q (q·a_1, ..., q·a_n)``."""
    nq, n = M.transition.shape
    perms = np.zeros((nq, 1), dtype=np.int64)
    for j in range(k):
        m = n**j
        new = np.empty((nq, n * m), dtype=np.int64)
        for a in range(n):
            new[:, a * m:(a + 1) * m] = M.output[:, a][:, None] * m + perms[M.transition[:, a]]
        perms = new
    return perms


def level_permutation(e: TreeElement, k: int, method: str = "action", budget: int | None = None) -> LevelAction:
    check_budget(e.n, k, budget)
    s = e.state
    if method == "action":
        images = act_all(s, k)
    elif method == "recursion":
        images = state_level_perms(s.machine, k)[s.index]
    else:
        raise ValueError(f"unknown method {method!r}")
    return LevelAction(k, Permutation(images))


def depth(e: TreeElement, k_max: int) -> int | None:
    """Least d <= k_max such that every residual after d letters is trivial; None if it exceeds k_max."""
    s = e.state
    M = s.machine
    ids = identity_states(M)
    current = {s.index}
    for d in range(k_max + 1):
        if current <= ids:
            return d
        current = {int(t) for q in current for t in M.transition[q]}
    return None


def fix_count(e: TreeElement, k: int) -> int:
    """|Fix_k(e)| by counting length-k paths through letters the machine writes back unchanged."""
    if k < 0:
        raise ValueError("level must be non-negative")
    s = e.state
    M = s.machine
    n = M.alphabet_size
    diag = [[int(M.transition[q, a]) for a in range(n) if M.output[q, a] == a] for q in range(M.num_states)]
    vec = {s.index: 1}
    for _ in range(k):
        nxt: dict[int, int] = {}
        for q, c in vec.items():
            for t in diag[q]:
                nxt[t] = nxt.get(t, 0) + c
        vec = nxt
        if not vec:
            return 0
    return sum(vec.values())


def fix_count_enumerate(e: TreeElement, k: int, budget: int | None = None) -> int:
    check_budget(e.n, k, budget)
    images = act_all(e.state, k)
    return int(np.count_nonzero(images == np.arange(len(images))))


def fix_measure_profile(e: TreeElement, k_max: int) -> list[Fraction]:
    n = e.n
    return [Fraction(fix_count(e, k), n**k) for k in range(k_max + 1)]


def fixed_point_character(e: TreeElement, k: int) -> Fraction:
    return Fraction(fix_count(e, k), e.n**k)


def first_moving_level(s: MachineState) -> int | None:
    """Least p such that state ``s`` moves some word of length p (None for the identity)."""
    M = s.machine
    ident = np.arange(M.alphabet_size)
    dist = {s.index: 1}
    frontier = [s.index]
    while frontier:
        nxt = []
        for q in frontier:
            if not np.array_equal(M.output[q], ident):
                return dist[q]
            for a in range(M.alphabet_size):
                if M.output[q, a] == a:
                    t = int(M.transition[q, a])
                    if t not in dist:
                        dist[t] = dist[q] + 1
                        nxt.append(t)
        frontier = nxt
    return None


@dataclass
class FixedPointVerdict:
    element: str
    verdict: str                      # "identity", "measure-zero-fixed" or "interior-witness"
    witness: list[int] | None = None
    period: int | None = None         # p in |Fix_{pk}| <= (n^p - 1)^k
    decay_checked: list[tuple[int, int, int]] = field(default_factory=list)  # (k, |Fix_pk|, bound)
    decay_ok: bool | None = None

    def to_json(self) -> dict:
        return {
            "element": self.element,
            "verdict": self.verdict,
            "witness": self.witness,
            "p": self.period,
            "decay": [{"k": k, "fix": f, "bound": b} for k, f, b in self.decay_checked],
            "decay_ok": self.decay_ok,
        }


@dataclass
class FreenessReport:
    word_len_max: int
    k_max: int
    elements: list[FixedPointVerdict]

    @property
    def free_on_ball(self) -> bool:
        return all(v.verdict != "interior-witness" and v.decay_ok is not False for v in self.elements)

    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for v in self.elements:
            out[v.verdict] = out.get(v.verdict, 0) + 1
        return out

    def to_json(self) -> dict:
        return {
            "ball": {"word_len_max": self.word_len_max, "k_max": self.k_max},
            "verdict": "free-on-ball" if self.free_on_ball else "not-free",
            "counts": self.counts(),
            "elements": [v.to_json() for v in self.elements],
        }


def classify_fixed_points(e: TreeElement, k_max: int) -> FixedPointVerdict:
    s = e.state
    if e.is_identity():
        return FixedPointVerdict(e.label(), "identity")
    u = diagonal_reachable_identity(s)
    if u is not None:
        return FixedPointVerdict(e.label(), "interior-witness", witness=u)
    ids = identity_states(s.machine)
    p = 1
    for q in diagonal_states(s):
        if q in ids:  # unreachable here: the search above found no trivial residual
            continue
        lvl = first_moving_level(MachineState(s.machine, q))
        p = max(p, lvl)
    n = e.n
    checks = []
    for j in range(max(1, k_max // p) + 1):
        checks.append((j, fix_count(e, p * j), (n**p - 1) ** j))
    ok = all(f <= b for _, f, b in checks)
    return FixedPointVerdict(e.label(), "measure-zero-fixed", period=p, decay_checked=checks, decay_ok=ok)


def reduced_words(num_generators: int, max_len: int):
    """Freely reduced words over generators and inverses, shortest first."""
    letters = [(i, e) for i in range(num_generators) for e in (1, -1)]
    for length in range(1, max_len + 1):
        for w in itertools.product(letters, repeat=length):
            if all(w[i + 1] != (w[i][0], -w[i][1]) for i in range(length - 1)):
                yield w


def freeness_report(generators: Sequence[TreeElement], word_len_max: int, k_max: int) -> FreenessReport:
    out = []
    if not generators:
        return FreenessReport(word_len_max, k_max, out)
    M = generators[0].machine
    for w in reduced_words(len(generators), word_len_max):
        el = TreeElement(M)
        for i, e in w:
            el = el * (generators[i] if e == 1 else generators[i].inverse())
        v = classify_fixed_points(el, k_max)
        v.element = " ".join(generators[i].label() + ("" if e == 1 else "^-1") for i, e in w)
        out.append(v)
    return FreenessReport(word_len_max, k_max, out)

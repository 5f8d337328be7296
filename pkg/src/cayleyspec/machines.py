"""Invertible Mealy machines acting on words over ``range(n)``.

Words are sequences of letter indices. A state ``q`` reads letter ``a``,
writes ``output[q, a]`` and moves to ``transition[q, a]``.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import AlphabetMismatch, NotInvertible
from .groups import FiniteGroup


class MealyMachine:
    """Invertible letter-to-letter transducer (immutable)."""

    def __init__(self, transition, output, labels: Sequence[str] | None = None):
        tr = np.array(transition, dtype=np.int64, ndmin=2)
        out = np.array(output, dtype=np.int64, ndmin=2)
        if tr.shape != out.shape:
            raise ValueError("transition and output tables differ in shape")
        nq, n = tr.shape
        if n == 0 or nq == 0:
            raise ValueError("machine needs at least one state and one letter")
        if tr.min() < 0 or tr.max() >= nq:
            raise ValueError("transition target out of range")
        if out.min() < 0 or out.max() >= n:
            raise ValueError("output letter out of range")
        bad = np.flatnonzero((np.sort(out, axis=1) != np.arange(n)).any(axis=1))
        if len(bad):
            raise NotInvertible(f"state {int(bad[0])} does not permute the alphabet")
        tr.flags.writeable = False
        out.flags.writeable = False
        self.transition = tr
        self.output = out
        self.labels = tuple(labels) if labels is not None else tuple(str(q) for q in range(nq))
        if len(self.labels) != nq:
            raise ValueError("wrong number of state labels")

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.transition.shape[1]

    def state(self, q: int) -> MachineState:
        return MachineState(self, q)

    def to_json(self) -> dict:
        return {
            "states": self.num_states,
            "alphabet": self.alphabet_size,
            "labels": list(self.labels),
            "transition": self.transition.tolist(),
            "output": self.output.tolist(),
        }

    def __repr__(self) -> str:
        return f"MealyMachine(states={self.num_states}, alphabet={self.alphabet_size})"


@dataclass(frozen=True)
class MachineState:
    machine: MealyMachine
    index: int

    def __post_init__(self):
        if not 0 <= self.index < self.machine.num_states:
            raise IndexError(f"state {self.index} out of range")

    def __call__(self, word: Sequence[int]) -> list[int]:
        return act(self, word)


def identity_machine(n: int) -> MealyMachine:
    return MealyMachine([[0] * n], [list(range(n))], labels=["id"])


def cayley_machine(G: FiniteGroup) -> MealyMachine:
    """State g0 on input g moves to g0*g and writes g0*g."""
    t = G.array
    return MealyMachine(t, t, labels=G.labels)


def reset_inverse_machine(G: FiniteGroup) -> MealyMachine:
    """Reset machine: state g0 on input g moves to g and writes g0^-1 * g."""
    n = G.order
    tr = np.tile(np.arange(n), (n, 1))
    inv = np.asarray(G.inverse)
    out = G.array[inv]  # out[g0, g] = g0^-1 g
    return MealyMachine(tr, out, labels=G.labels)


def act(s: MachineState, word: Sequence[int]) -> list[int]:
    M = s.machine
    q = s.index
    out = []
    for a in word:
        out.append(int(M.output[q, a]))
        q = int(M.transition[q, a])
    return out


def run(s: MachineState, word: Sequence[int]) -> int:
    """State reached after reading ``word``."""
    q = s.index
    tr = s.machine.transition
    for a in word:
        q = int(tr[q, a])
    return q


def act_all(s: MachineState, k: int) -> np.ndarray:
    """Images of all ``n**k`` words, encoded base n with the first letter most significant."""
    M = s.machine
    n = M.alphabet_size
    size = n**k
    idx = np.arange(size, dtype=np.int64)
    states = np.full(size, s.index, dtype=np.int64)
    image = np.zeros(size, dtype=np.int64)
    for pos in range(k):
        letters = (idx // n ** (k - 1 - pos)) % n
        image = image * n + M.output[states, letters]
        states = M.transition[states, letters]
    return image


def invert(M: MealyMachine) -> MealyMachine:
    """State q of the result computes the inverse tree map of state q of ``M``."""
    nq, n = M.transition.shape
    inv_out = np.empty_like(M.output)
    rows = np.arange(nq)[:, None]
    inv_out[rows, M.output] = np.arange(n)[None, :]
    inv_tr = M.transition[rows, inv_out]
    return MealyMachine(inv_tr, inv_out, labels=[f"{lab}^-1" for lab in M.labels])


def product(M1: MealyMachine, M2: MealyMachine) -> MealyMachine:
    """State ``q1 * |Q2| + q2`` computes ``M1_q1 ∘ M2_q2`` (M2 reads first)."""
    if M1.alphabet_size != M2.alphabet_size:
        raise AlphabetMismatch(f"alphabets of size {M1.alphabet_size} and {M2.alphabet_size}")
    n1, n2 = M1.num_states, M2.num_states
    q1 = np.repeat(np.arange(n1), n2)
    q2 = np.tile(np.arange(n2), n1)
    mid = M2.output[q2]                       # (n1*n2, n)
    nxt2 = M2.transition[q2]
    out = M1.output[q1[:, None], mid]
    nxt1 = M1.transition[q1[:, None], mid]
    labels = [f"{M1.labels[a]}*{M2.labels[b]}" for a, b in zip(q1, q2)]
    return MealyMachine(nxt1 * n2 + nxt2, out, labels=labels)


def _bfs_codes(start: int, successors) -> np.ndarray:
    """Codes reachable from ``start``; ``successors`` maps a code array to an (m, n) array."""
    seen = np.array([start], dtype=np.int64)
    frontier = seen
    while len(frontier):
        nxt = np.unique(successors(frontier))
        frontier = nxt[~np.isin(nxt, seen, assume_unique=True)]
        seen = np.union1d(seen, frontier)
    # start first, the rest in increasing order
    return np.concatenate([[start], seen[seen != start]])


def _renumber(order: np.ndarray, codes: np.ndarray) -> np.ndarray:
    """Position of each entry of ``codes`` inside ``order``."""
    perm = np.argsort(order, kind="stable")
    return perm[np.searchsorted(order[perm], codes)]


def _pair_product(outer: MachineState, inner: MachineState) -> MachineState:
    """Reachable part of ``outer ∘ inner``."""
    M1, M2 = outer.machine, inner.machine
    n2 = M2.num_states

    def step(codes):
        q1, q2 = np.divmod(codes, n2)
        mid = M2.output[q2]
        return M1.transition[q1[:, None], mid] * n2 + M2.transition[q2]

    order = _bfs_codes(outer.index * n2 + inner.index, step)
    q1, q2 = np.divmod(order, n2)
    mid = M2.output[q2]
    out = M1.output[q1[:, None], mid]
    tr = _renumber(order, step(order))
    return MachineState(MealyMachine(tr, out), 0)


def compose(states: Sequence[MachineState], minimal: bool = True) -> MachineState:
    """Single machine state computing ``s_0 ∘ s_1 ∘ ... ∘ s_{L-1}`` (the last one reads first).

    Factors are folded in from the right; only reachable state pairs are
    built, and with ``minimal`` each partial product is minimised so that
    long words stay small.
    """
    if not states:
        raise ValueError("need at least one state")
    n = states[0].machine.alphabet_size
    for s in states:
        if s.machine.alphabet_size != n:
            raise AlphabetMismatch("all factors must share the alphabet")
    acc = reachable(states[-1])
    if minimal:
        acc = minimal_state(acc)
    for s in reversed(states[:-1]):
        acc = _pair_product(s, acc)
        if minimal:
            acc = minimal_state(acc)
    return acc


def minimal_state(s: MachineState) -> MachineState:
    """Minimal machine equivalent to ``s`` restricted to its reachable part."""
    r = reachable(s)
    M, cls = minimize(r.machine)
    return MachineState(M, int(cls[r.index]))


def reachable(s: MachineState) -> MachineState:
    """Restrict to states reachable from ``s``; the start becomes state 0."""
    M = s.machine
    order = _bfs_codes(s.index, lambda q: M.transition[q])
    tr = _renumber(order, M.transition[order])
    return MachineState(MealyMachine(tr, M.output[order], labels=[M.labels[q] for q in order]), 0)


def identity_states(M: MealyMachine) -> frozenset[int]:
    """States computing the identity map: the greatest set of states that
    write their input letter and only move into the set."""
    ident = np.arange(M.alphabet_size)
    alive = (M.output == ident).all(axis=1)
    while True:
        keep = alive & alive[M.transition].all(axis=1)
        if np.array_equal(keep, alive):
            break
        alive = keep
    return frozenset(int(q) for q in np.flatnonzero(alive))


def _row_classes(cols: np.ndarray) -> np.ndarray:
    """Dense labels of equal rows, built column by column with 1-d uniques."""
    code = np.zeros(cols.shape[0], dtype=np.int64)
    for c in cols.T:
        _, code = np.unique(code * (int(c.max()) + 1) + c, return_inverse=True)
        code = code.reshape(-1)
    return code


def minimize(M: MealyMachine) -> tuple[MealyMachine, np.ndarray]:
    """Moore partition refinement; returns the quotient machine and the class of each state."""
    cls = _row_classes(M.output)   # initial classes by level-1 output map
    count = int(cls.max()) + 1
    while True:
        new = _row_classes(np.concatenate([cls[:, None], cls[M.transition]], axis=1))
        new_count = int(new.max()) + 1
        cls = new
        if new_count == count:
            break
        count = new_count
    rep = np.unique(cls, return_index=True)[1]   # first state of each class
    tr = cls[M.transition[rep]]
    out = M.output[rep]
    return MealyMachine(tr, out, labels=[M.labels[q] for q in rep]), cls


def diagonal_reachable_identity(s: MachineState) -> list[int] | None:
    """Shortest word ``u`` fixed by ``s`` after which the residual state is the identity.

    Such a ``u`` means the fixed-point set contains the whole cylinder ``u A^ω``.
    """
    M = s.machine
    ids = identity_states(M)
    if s.index in ids:
        return []
    parent: dict[int, tuple[int, int]] = {}
    seen = {s.index}
    queue = deque([s.index])
    while queue:
        q = queue.popleft()
        for a in range(M.alphabet_size):
            if M.output[q, a] != a:
                continue
            t = int(M.transition[q, a])
            if t in seen:
                continue
            seen.add(t)
            parent[t] = (q, a)
            if t in ids:
                word = []
                cur = t
                while cur != s.index:
                    cur, letter = parent[cur]
                    word.append(letter)
                return word[::-1]
            queue.append(t)
    return None


def diagonal_states(s: MachineState) -> list[int]:
    """States reachable from ``s`` along letters that ``s`` leaves unchanged (BFS order)."""
    M = s.machine
    seen = {s.index}
    order = [s.index]
    i = 0
    while i < len(order):
        q = order[i]
        i += 1
        for a in range(M.alphabet_size):
            if M.output[q, a] == a:
                t = int(M.transition[q, a])
                if t not in seen:
                    seen.add(t)
                    order.append(t)
    return order


def words(n: int, k: int) -> Iterable[tuple[int, ...]]:
    """All words of length ``k`` in base-n order (first letter most significant)."""
    return itertools.product(range(n), repeat=k)

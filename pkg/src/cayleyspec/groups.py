"""Finite groups given by multiplication tables, plus a few standard instances."""

from __future__ import annotations

import itertools
import json
import string
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import InvalidOrder, NoIdentity, NotAssociative, NotLatinSquare


class Permutation:
    """Bijection of ``range(len(images))``; ``images[i]`` is the image of ``i``.

    Composition follows function notation: ``(p * q)[i] == p[q[i]]``.
    """

    __slots__ = ("images",)

    def __init__(self, images):
        arr = np.asarray(images, dtype=np.int64)
        if arr.ndim != 1:
            raise ValueError("permutation images must be one-dimensional")
        seen = np.zeros(len(arr), dtype=bool)
        if len(arr) and (arr.min() < 0 or arr.max() >= len(arr)):
            raise ValueError("permutation image out of range")
        seen[arr] = True
        if not seen.all():
            raise ValueError("images do not form a bijection")
        arr.flags.writeable = False
        self.images = arr

    @classmethod
    def identity(cls, size: int) -> Permutation:
        return cls(np.arange(size))

    def __len__(self) -> int:
        return len(self.images)

    def __getitem__(self, i):
        return self.images[i]

    def __mul__(self, other: Permutation) -> Permutation:
        if len(self) != len(other):
            raise ValueError("size mismatch")
        return Permutation(self.images[other.images])

    def inverse(self) -> Permutation:
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images))
        return Permutation(inv)

    def is_identity(self) -> bool:
        return bool(np.array_equal(self.images, np.arange(len(self.images))))

    def fixed_points(self) -> int:
        return int(np.count_nonzero(self.images == np.arange(len(self.images))))

    def matrix(self) -> np.ndarray:
        """0/1 matrix with a 1 at (images[j], j), i.e. column j is sent to row images[j]."""
        m = len(self.images)
        out = np.zeros((m, m), dtype=np.int64)
        out[self.images, np.arange(m)] = 1
        return out

    def cycles(self) -> list[tuple[int, ...]]:
        done = set()
        out = []
        for start in range(len(self.images)):
            if start in done:
                continue
            cyc = [start]
            done.add(start)
            j = int(self.images[start])
            while j != start:
                cyc.append(j)
                done.add(j)
                j = int(self.images[j])
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash(self.images.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.images.tolist()})"


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """A validated finite group. Index 0 is always the identity.

    ``table[i][j]`` is the index of ``g_i * g_j``.
    """

    labels: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    name: str = ""

    @property
    def order(self) -> int:
        return len(self.labels)

    @property
    def identity(self) -> int:
        return 0

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        return tuple(row.index(0) for row in self.table)

    @cached_property
    def is_abelian(self) -> bool:
        t = np.asarray(self.table)
        return bool(np.array_equal(t, t.T))

    @cached_property
    def array(self) -> np.ndarray:
        a = np.asarray(self.table, dtype=np.int64)
        a.flags.writeable = False
        return a

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, elems: Sequence[int]) -> int:
        acc = 0
        for e in elems:
            acc = self.table[acc][e]
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        acc = 0
        for _ in range(k % self.element_order(a)):
            acc = self.table[acc][a]
        return acc

    def conj(self, a: int, b: int) -> int:
        """``a^b = b^-1 a b``."""
        return self.prod([self.inverse[b], a, b])

    def commutes(self, a: int, b: int) -> bool:
        return self.table[a][b] == self.table[b][a]

    def element_order(self, a: int) -> int:
        k, acc = 1, a
        while acc != 0:
            acc = self.table[acc][a]
            k += 1
        return k

    def is_central(self, a: int) -> bool:
        return all(self.commutes(a, b) for b in range(self.order))

    def generated_subgroup(self, gens: Sequence[int]) -> frozenset[int]:
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for h in frontier:
                for g in gens:
                    p = self.table[h][g]
                    if p not in seen:
                        seen.add(p)
                        nxt.append(p)
            frontier = nxt
        return frozenset(seen)

    def index_of(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"no element labelled {label!r} in {self.name or 'group'}") from None

    def to_json(self) -> dict:
        return {"name": self.name, "labels": list(self.labels), "table": [list(r) for r in self.table]}

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


def regular_perm(G: FiniteGroup, g: int) -> Permutation:
    """Left regular representation: ``i -> index of g * g_i``."""
    if not 0 <= g < G.order:
        raise IndexError(f"element index {g} out of range for order {G.order}")
    return Permutation(G.table[g])


def make_from_table(labels: Sequence[str], table: Sequence[Sequence[int]], name: str = "") -> FiniteGroup:
    """Validate a multiplication table and return it with the identity moved to index 0."""
    n = len(table)
    if n == 0:
        raise InvalidOrder("empty table")
    if len(labels) != n:
        raise ValueError(f"{len(labels)} labels for a {n}x{n} table")
    if len(set(labels)) != n:
        raise ValueError("labels must be distinct")
    try:
        t = np.asarray(table, dtype=np.int64)
    except ValueError:
        raise NotLatinSquare("table rows have unequal lengths") from None
    if t.shape != (n, n):
        raise NotLatinSquare("table is not square")
    if t.min() < 0 or t.max() >= n:
        raise NotLatinSquare("table entries out of range")
    full = np.arange(n)
    for i in range(n):
        if not np.array_equal(np.sort(t[i]), full):
            raise NotLatinSquare(f"row {i} repeats an entry")
        if not np.array_equal(np.sort(t[:, i]), full):
            raise NotLatinSquare(f"column {i} repeats an entry")
    ids = [e for e in range(n) if np.array_equal(t[e], full) and np.array_equal(t[:, e], full)]
    if not ids:
        raise NoIdentity("no two-sided identity")
    # (ab)c == a(bc) for all triples, vectorised over c
    for a in range(n):
        lhs = t[t[a]]          # lhs[b, c] = (ab)c
        rhs = t[a][t]          # rhs[b, c] = a(bc)
        if not np.array_equal(lhs, rhs):
            raise NotAssociative(f"associativity fails with first factor {labels[a]!r}")
    e = ids[0]
    order = [e] + [i for i in range(n) if i != e]
    pos = {old: new for new, old in enumerate(order)}
    new_table = tuple(tuple(pos[int(t[a, b])] for b in order) for a in order)
    return FiniteGroup(tuple(str(labels[i]) for i in order), new_table, name)


def _letters(n: int) -> list[str]:
    if n <= 26:
        return list(string.ascii_lowercase[:n])
    return [f"g{i}" for i in range(n)]


def make_cyclic(n: int) -> FiniteGroup:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidOrder(f"cyclic group order must be a positive integer, got {n!r}")
    n = int(n)
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return make_from_table(_letters(n), table, name=f"Z{n}")


def direct_product(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    pairs = list(itertools.product(range(G.order), range(H.order)))
    idx = {p: i for i, p in enumerate(pairs)}
    table = [[idx[(G.mul(a1, a2), H.mul(b1, b2))] for (a2, b2) in pairs] for (a1, b1) in pairs]
    labels = [f"({G.labels[a]},{H.labels[b]})" for a, b in pairs]
    return make_from_table(labels, table, name=f"{G.name}x{H.name}")


def symmetric_group(m: int) -> FiniteGroup:
    """S_m acting on {0..m-1}; (p*q)(i) = p(q(i))."""
    perms = list(itertools.permutations(range(m)))
    idx = {p: i for i, p in enumerate(perms)}
    table = [[idx[tuple(p[q[i]] for i in range(m))] for q in perms] for p in perms]
    labels = ["".join(str(x) for x in p) for p in perms]
    return make_from_table(labels, table, name=f"S{m}")


def dihedral_group(m: int) -> FiniteGroup:
    """Symmetries of the regular m-gon (order 2m): r^i s^j with s r s = r^-1."""
    if m < 1:
        raise InvalidOrder("dihedral parameter must be positive")
    elems = [(i, j) for j in range(2) for i in range(m)]
    idx = {e: k for k, e in enumerate(elems)}

    def mul(x, y):
        (i1, j1), (i2, j2) = x, y
        return ((i1 + (i2 if j1 == 0 else -i2)) % m, (j1 + j2) % 2)

    table = [[idx[mul(x, y)] for y in elems] for x in elems]
    labels = [("r%d" % i if i else "e") if j == 0 else "r%ds" % i for (i, j) in elems]
    return make_from_table(labels, table, name=f"D{m}")


def quaternion_group() -> FiniteGroup:
    names = ["1", "-1", "i", "-i", "j", "-j", "k", "-k"]
    # unit quaternions as (sign, basis) with basis in 1,i,j,k
    basis_mul = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }

    def split(name):
        return (-1, name[1:]) if name.startswith("-") else (1, name)

    def join(sign, b):
        return b if sign == 1 else "-" + b

    table = []
    for a in names:
        sa, ba = split(a)
        row = []
        for b in names:
            sb, bb = split(b)
            s, c = basis_mul[(ba, bb)]
            row.append(names.index(join(sa * sb * s, c)))
        table.append(row)
    return make_from_table(names, table, name="Q8")


def builtin_group(name: str) -> FiniteGroup:
    """Look up a built-in group: ``Z<n>``, ``S<m>``, ``D<m>``, ``Q8``, or ``x``-joined products."""
    parts = name.split("x")
    if len(parts) > 1:
        G = builtin_group(parts[0])
        for p in parts[1:]:
            G = direct_product(G, builtin_group(p))
        return G
    if name == "Q8":
        return quaternion_group()
    if len(name) >= 2 and name[1:].isdigit():
        k = int(name[1:])
        if name[0] == "Z":
            return make_cyclic(k)
        if name[0] == "S" and 1 <= k <= 5:
            return symmetric_group(k)
        if name[0] == "D":
            return dihedral_group(k)
    raise KeyError(f"unknown builtin group {name!r}")


def load_group(source: str | Path) -> FiniteGroup:
    """Builtin name, or path to a JSON file with ``labels`` and ``table``."""
    p = Path(source)
    if p.suffix == ".json" or p.exists():
        data = json.loads(p.read_text())
        return make_from_table(data["labels"], data["table"], name=data.get("name", p.stem))
    return builtin_group(str(source))


def is_power_of_two(m: int) -> bool:
    return m > 0 and m & (m - 1) == 0




def nilpotency_class(G: FiniteGroup, elems: frozenset[int]) -> int | None:
    """Nilpotency class of the subgroup ``elems`` (None if not nilpotent)."""
    sub = sorted(elems)
    current = frozenset(sub)
    c = 0
    while len(current) > 1:
        comms = {G.prod([G.inv(a), G.inv(b), a, b]) for a in current for b in sub}
        nxt = G.generated_subgroup(sorted(comms))
        if nxt == current:
            return None
        current = nxt
        c += 1
    return c


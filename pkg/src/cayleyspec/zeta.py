"""Ihara zeta log-series of regular multigraphs and of the limit Schreier graph."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import scipy.sparse as sp

from .groups import FiniteGroup
from .measures import DiscreteMeasure, fraction_str, moment
from .spectra import generator_level_perms


@dataclass(frozen=True)
class RegularMultigraph:
    """Undirected multigraph; a loop counts twice towards the degree."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def adjacency(self) -> sp.csr_matrix:
        u = np.array([e[0] for e in self.edges], dtype=np.int64)
        v = np.array([e[1] for e in self.edges], dtype=np.int64)
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        V = self.num_vertices
        return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(V, V))

    @property
    def degree(self) -> int:
        deg = np.asarray(self.adjacency().sum(axis=1)).ravel()
        if len(set(deg.tolist())) != 1:
            raise ValueError("graph is not regular")
        return int(deg[0])

    def darts(self) -> list[tuple[int, int]]:
        """Directed edges: dart 2e runs u->v along edge e, dart 2e+1 is its reverse."""
        out = []
        for u, v in self.edges:
            out.append((u, v))
            out.append((v, u))
        return out


def schreier_multigraph(G: FiniteGroup, k: int) -> RegularMultigraph:
    """One edge {w, g(w)} per generator g and level-k word w."""
    perms = generator_level_perms(G, k)
    edges = tuple((int(w), int(p[w])) for p in perms for w in range(len(p)))
    return RegularMultigraph(perms.shape[1], edges)


@dataclass
class LogZetaSeries:
    """Coefficients a_1..a_R of ln zeta(t) = sum a_r t^r, with optional per-coefficient error bars."""

    coefficients: list[Fraction]
    errors: list[Fraction] | None = None
    meta: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.coefficients)

    def scaled(self, factor: Fraction) -> LogZetaSeries:
        errs = None if self.errors is None else [e * abs(factor) for e in self.errors]
        return LogZetaSeries([c * factor for c in self.coefficients], errs, dict(self.meta))

    def to_json(self) -> dict:
        out = {"order": self.order, **self.meta, "coefficients": [
            {"r": r, "value": fraction_str(c), "float": float(c)} for r, c in enumerate(self.coefficients, 1)]}
        if self.errors is not None:
            for row, e in zip(out["coefficients"], self.errors):
                row["error"] = float(e)
        return out


def _traces(A: sp.csr_matrix, top: int) -> list[int]:
    """tr(A^i) for i = 0..top as Python integers."""
    out = [A.shape[0]]
    P = sp.identity(A.shape[0], dtype=np.int64, format="csr")
    for _ in range(top):
        P = P @ A
        out.append(int(P.diagonal().sum()))
    return out


def finite_zeta_log(X: RegularMultigraph, R: int, exponent: str = "vertex") -> LogZetaSeries:
    """ln zeta_X from the determinant formula

        zeta_X(t)^-1 = (1 - t^2)^e det(I - tA + (d - 1) t^2 I),

    with e = |E| - |V| (``exponent="vertex"``) or e = (d - 2)|E| / 2 (``"edge"``).
    """
    d = X.degree
    V, E = X.num_vertices, X.num_edges
    if exponent == "vertex":
        e = Fraction(E - V)
    elif exponent == "edge":
        e = Fraction((d - 2) * E, 2)
    else:
        raise ValueError(f"unknown exponent convention {exponent!r}")
    coeffs = [Fraction(0)] * (R + 1)
    for s in range(1, R // 2 + 1):
        coeffs[2 * s] += e / s
    tr = _traces(X.adjacency(), R)
    # -ln det(I - Y) = sum_m tr(Y^m)/m with Y = tA - (d-1)t^2 I
    for m in range(1, R + 1):
        for j in range(0, m + 1):
            r = m + j
            if r > R:
                break
            coeffs[r] += Fraction(math.comb(m, j) * (-(d - 1)) ** j * tr[m - j], m)
    return LogZetaSeries(coeffs[1:], meta={"exponent_convention": exponent, "exponent": fraction_str(e),
                                           "vertices": V, "edges": E, "degree": d})


def nonbacktracking_matrix(X: RegularMultigraph) -> sp.csr_matrix:
    darts = X.darts()
    by_tail: dict[int, list[int]] = {}
    for i, (u, _) in enumerate(darts):
        by_tail.setdefault(u, []).append(i)
    rows, cols = [], []
    for i, (_, v) in enumerate(darts):
        for j in by_tail.get(v, []):
            if j != i ^ 1:
                rows.append(i)
                cols.append(j)
    D = len(darts)
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(D, D))


def path_count_oracle(X: RegularMultigraph, r: int) -> int:
    """Number of closed, non-backtracking, tail-less dart cycles of length r: tr(B^r)."""
    if r < 1:
        raise ValueError("r must be positive")
    B = nonbacktracking_matrix(X)
    P = B
    for _ in range(r - 1):
        P = P @ B
    return int(P.diagonal().sum())


def path_count_enumerate(X: RegularMultigraph, r: int) -> int:
    """Brute-force depth-first count of the same cycles (oracle for the oracle)."""
    darts = X.darts()
    by_tail: dict[int, list[int]] = {}
    for i, (u, _) in enumerate(darts):
        by_tail.setdefault(u, []).append(i)
    count = 0

    def extend(first: int, last: int, length: int):
        nonlocal count
        if length == r:
            if darts[last][1] == darts[first][0] and first != last ^ 1:
                count += 1
            return
        for nxt in by_tail.get(darts[last][1], []):
            if nxt != last ^ 1:
                extend(first, nxt, length + 1)

    for d0 in range(len(darts)):
        extend(d0, d0, 1)
    return count


def oracle_series(X: RegularMultigraph, R: int) -> LogZetaSeries:
    return LogZetaSeries([Fraction(path_count_oracle(X, r), r) for r in range(1, R + 1)],
                         meta={"source": "non-backtracking trace"})


def exponent_verdict(graphs: list[RegularMultigraph], R: int) -> dict:
    """Which exponent convention reproduces the path counts on the given graphs."""
    out = {}
    for conv in ("vertex", "edge"):
        out[conv] = all(finite_zeta_log(X, R, conv).coefficients == oracle_series(X, R).coefficients
                        for X in graphs)
    adopted = "vertex" if out["vertex"] else ("edge" if out["edge"] else None)
    return {"agrees": out, "adopted": adopted}


def limit_zeta_log(m: DiscreteMeasure, n: int, R: int, normalization: str = "vertex") -> LogZetaSeries:
    """ln zeta of the limit graph from the spectral measure (degree d = 2n):

        -((d-2)/2) ln(1 - t^2) - integral ln(1 - t d lam + (d-1) t^2) dmu(lam).

    This is the limit of ln zeta_{X_k} / |V(X_k)|. With ``normalization="edge"``
    the series is divided by |E|/|V| = n, giving the limit of ln zeta_{X_k} / |E(X_k)|.
    """
    d = 2 * n
    moments = [moment(m, j) for j in range(R + 1)]
    vals = [Fraction(v) if isinstance(v, Fraction) else Fraction(v) for v, _ in moments]
    tail = moments[0][1]
    coeffs = [Fraction(0)] * (R + 1)
    weight = [Fraction(0)] * (R + 1)
    for s in range(1, R // 2 + 1):
        coeffs[2 * s] += Fraction(d - 2, 2) / s
    for mm in range(1, R + 1):
        for j in range(0, mm + 1):
            r = mm + j
            if r > R:
                break
            c = Fraction(math.comb(mm, j) * d ** (mm - j) * (-(d - 1)) ** j, mm)
            coeffs[r] += c * vals[mm - j]
            weight[r] += abs(c)
    errors = [w * tail for w in weight[1:]]
    series = LogZetaSeries(coeffs[1:], errors, meta={"normalization": normalization, "n": n})
    if normalization == "vertex":
        return series
    if normalization == "edge":
        out = series.scaled(Fraction(1, n))
        out.meta["normalization"] = "edge"
        return out
    raise ValueError(f"unknown normalization {normalization!r}")

"""Schreier-graph matrices of the reset-machine generators and their spectra."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
import sympy

from .errors import NoConvergence, PoleInRecursion
from .groups import FiniteGroup
from .machines import reset_inverse_machine
from .tree import check_budget, state_level_perms

DENSE_BUDGET = 4096
JACOBI_MAX_DIM = 256
LAM, MU = sympy.symbols("lam mu")


@dataclass(frozen=True)
class LevelMatrix:
    level: int
    matrix: sp.csr_matrix   # integer entries

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dense(self) -> np.ndarray:
        return self.matrix.toarray()

    def rows(self) -> list[list[tuple[int, int]]]:
        m = self.matrix.tocsr()
        return [list(zip(m.indices[m.indptr[i]:m.indptr[i + 1]].tolist(),
                         m.data[m.indptr[i]:m.indptr[i + 1]].tolist()))
                for i in range(self.dim)]

    def __eq__(self, other) -> bool:
        if not isinstance(other, LevelMatrix) or other.matrix.shape != self.matrix.shape:
            return False
        return (self.matrix != other.matrix).nnz == 0


def generator_level_perms(G: FiniteGroup, k: int, budget: int | None = None) -> np.ndarray:
    """Row i = level-k permutation of the i-th reset-machine generator."""
    check_budget(G.order, k, budget)
    return state_level_perms(reset_inverse_machine(G), k)


def perm_matrix(images: np.ndarray) -> sp.csr_matrix:
    """Sparse matrix with a 1 at (images[w], w)."""
    size = len(images)
    return sp.csr_matrix((np.ones(size, dtype=np.int64), (images, np.arange(size))), shape=(size, size))


def adjacency_matrix(G: FiniteGroup, k: int, budget: int | None = None) -> LevelMatrix:
    perms = generator_level_perms(G, k, budget)
    size = perms.shape[1]
    A = sp.csr_matrix((size, size), dtype=np.int64)
    for p in perms:
        P = perm_matrix(p)
        A = A + P + P.T
    return LevelMatrix(k, A.tocsr())


def garbage_matrix(n: int, k: int) -> LevelMatrix:
    """S_0 = n-1 and S_k = T ⊗ I_{n^(k-1)} with T the all-ones matrix minus the identity."""
    if k < 0:
        raise ValueError("level must be non-negative")
    if k == 0:
        return LevelMatrix(0, sp.csr_matrix(np.array([[n - 1]], dtype=np.int64)))
    T = sp.csr_matrix(np.ones((n, n), dtype=np.int64) - np.eye(n, dtype=np.int64))
    return LevelMatrix(k, sp.kron(T, sp.identity(n ** (k - 1), dtype=np.int64, format="csr"), format="csr"))


def verify_sum_nonidentity(G: FiniteGroup, k: int) -> bool:
    """Check sum over i != j of P_i P_j^T against n S_k."""
    perms = generator_level_perms(G, k)
    mats = [perm_matrix(p) for p in perms]
    size = perms.shape[1]
    lhs = sp.csr_matrix((size, size), dtype=np.int64)
    for i, Pi in enumerate(mats):
        for j, Pj in enumerate(mats):
            if i != j:
                lhs = lhs + Pi @ Pj.T
    rhs = G.order * garbage_matrix(G.order, k).matrix
    return (lhs != rhs).nnz == 0


# --- determinant recursion -------------------------------------------------

def f_sequence(n: int, k: int, lam: complex, mu: complex) -> list[complex]:
    """F_1..F_k with F_1 = mu - lam and F_{i+1} = -(lam + (n-1) mu) - n^2 / F_i."""
    out = []
    f = mu - lam
    for i in range(1, k + 1):
        if i > 1:
            if out[-1] == 0:
                raise PoleInRecursion(f"F_{i - 1} vanishes at lam={lam}, mu={mu}")
            f = -(lam + (n - 1) * mu) - n * n / out[-1]
        out.append(f)
    return out


def phi_eval(n: int, k: int, lam: float, mu: float) -> float:
    """Phi_k(lam, mu) from the continued-fraction product; PoleInRecursion if some F_i is 0."""
    val = 2 * n - lam - (n - 1) * mu
    fs = f_sequence(n, k, lam, mu)
    if fs and fs[-1] == 0:
        return 0.0
    sign = math.copysign(1.0, val)
    log_abs = math.log(abs(val)) if val else -math.inf
    for i, f in enumerate(fs, start=1):
        e = (n - 1) * n ** (k - i)
        if f < 0 and e % 2:
            sign = -sign
        log_abs += e * math.log(abs(f))
    if log_abs > 700:
        return sign * math.inf
    return sign * math.exp(log_abs)


def pq_polynomials(n: int, k: int) -> tuple[sympy.Poly, sympy.Poly]:
    """P_k and Q_k with P_1 = mu - lam, Q_1 = 1 and P_{i+1} = -(lam + (n-1)mu) P_i - n^2 Q_i, Q_{i+1} = P_i."""
    if k < 1:
        raise ValueError("k must be at least 1")
    P = sympy.Poly(MU - LAM, LAM, MU)
    Q = sympy.Poly(1, LAM, MU)
    s = sympy.Poly(LAM + (n - 1) * MU, LAM, MU)
    for _ in range(k - 1):
        P, Q = -s * P - n * n * Q, P
    return P, Q


def phi_polynomial_eval(n: int, k: int, lam, mu):
    """Phi_k as (2n - lam - (n-1)mu) P_k^(n-1) prod_{i<k} P_i^((n-1)^2 n^(k-1-i)) (pole free)."""
    val = 2 * n - lam - (n - 1) * mu
    if k == 0:
        return val
    ps = [mu - lam]
    for _ in range(k - 1):
        prev = ps[-2] if len(ps) > 1 else 1
        ps.append(-(lam + (n - 1) * mu) * ps[-1] - n * n * prev)
    val *= ps[-1] ** (n - 1)
    for i in range(1, k):
        val *= ps[i - 1] ** ((n - 1) ** 2 * n ** (k - 1 - i))
    return val


def phi_determinant(G: FiniteGroup, k: int, lam, mu) -> complex:
    """det(A_k - lam I - mu S_k) computed directly (oracle for the recursion)."""
    A = adjacency_matrix(G, k).dense().astype(complex)
    S = garbage_matrix(G.order, k).dense()
    return complex(np.linalg.det(A - lam * np.eye(len(A)) - mu * S))


def next_point(n: int, lam, mu):
    """(lam', mu') in Phi_{k+1}(lam, mu) = (mu - lam)^((n-1) n^k) Phi_k(lam', mu')."""
    d = mu - lam
    lam2 = (-lam * lam + (n - 1) * mu * mu + (2 - n) * lam * mu + n * (n - 1)) / d
    return lam2, -n / d


# --- closed form spectrum --------------------------------------------------

def multiplicity(n: int, k: int, q: int) -> int:
    """Multiplicity of cos(p pi / q) (gcd(p, q) = 1, 2 <= q) in the spectrum of M_k."""
    if q < 2 or q > k + 1:
        return 0
    total = (n - 1) ** 2 * sum(n ** (k - q * i) for i in range(1, k // q + 1))
    if (k + 1) % q == 0:
        total += n - 1
    return total


def multiplicity_geometric(n: int, k: int, q: int) -> Fraction:
    """Same count through the summed geometric series."""
    r = Fraction(1, n**q)
    series = (1 - r ** (k // q + 1)) / (1 - r) - 1
    return n**k * (n - 1) ** 2 * series + (n - 1) * (1 if (k + 1) % q == 0 else 0)


def atom_value(p: int, q: int) -> float:
    """cos(p pi / q), exact at the points where the float rounding would show."""
    r = Fraction(p, q) % 2
    exact = {Fraction(0): 1.0, Fraction(1, 3): 0.5, Fraction(1, 2): 0.0, Fraction(2, 3): -0.5,
             Fraction(1): -1.0, Fraction(4, 3): -0.5, Fraction(3, 2): 0.0, Fraction(5, 3): 0.5}
    return exact.get(r, math.cos(math.pi * p / q))


@dataclass(frozen=True)
class SpectrumAtom:
    p: int
    q: int
    multiplicity: int

    @property
    def value(self) -> float:
        return atom_value(self.p, self.q)

    def to_json(self) -> dict:
        return {"p": self.p, "q": self.q, "value": self.value, "multiplicity": self.multiplicity}


@dataclass(frozen=True)
class SpectrumAtomList:
    """Spectrum of M_k; the top eigenvalue 1 is stored as p=0, q=1."""

    n: int
    level: int
    atoms: tuple[SpectrumAtom, ...]

    @property
    def total(self) -> int:
        return sum(a.multiplicity for a in self.atoms)

    def values(self) -> list[float]:
        return [a.value for a in self.atoms]

    def to_json(self) -> dict:
        return {"n": self.n, "level": self.level, "total": self.total,
                "atoms": [a.to_json() for a in self.atoms]}


def closed_form_spectrum(n: int, k: int) -> SpectrumAtomList:
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    atoms = [SpectrumAtom(0, 1, 1)]
    if n > 1:
        for q in range(2, k + 2):
            m = multiplicity(n, k, q)
            for p in range(1, q):
                if math.gcd(p, q) == 1:
                    atoms.append(SpectrumAtom(p, q, m))
    atoms.sort(key=lambda a: (-a.value, a.q))
    return SpectrumAtomList(n, k, tuple(atoms))


# --- numeric eigensolver ---------------------------------------------------

def jacobi_eigenvalues(A: np.ndarray, threshold: float = 1e-13, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a symmetric matrix by cyclic Jacobi with round-robin (parallel) ordering.

    Each round rotates n/2 disjoint index pairs at once, so the sweep order is fixed
    and the result deterministic.
    """
    A = np.array(A, dtype=float)
    d = A.shape[0]
    if d == 0:
        return np.zeros(0)
    if not np.allclose(A, A.T):
        raise ValueError("matrix is not symmetric")
    pad = d % 2
    if pad:
        A = np.pad(A, ((0, 1), (0, 1)))
    m = A.shape[0]
    scale = max(np.linalg.norm(A), 1.0)
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= threshold * scale:
            break
        order = list(range(m))
        for _ in range(m - 1):
            P = np.array(order[: m // 2])
            Q = np.array(order[m // 2:][::-1])
            apq = A[P, Q]
            app = A[P, P]
            aqq = A[Q, Q]
            nz = np.abs(apq) > 1e-300
            tau = np.where(nz, (aqq - app) / np.where(nz, 2 * apq, 1.0), 0.0)
            t = np.where(nz, np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.hypot(1.0, tau)), 0.0)
            c = 1 / np.sqrt(1 + t * t)
            s = t * c
            Ap = A[P, :].copy()
            Aq = A[Q, :].copy()
            A[P, :] = c[:, None] * Ap - s[:, None] * Aq
            A[Q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap = A[:, P].copy()
            Aq = A[:, Q].copy()
            A[:, P] = Ap * c - Aq * s
            A[:, Q] = Ap * s + Aq * c
            order = [order[0], order[-1]] + order[1:-1]
    else:
        raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
    ev = np.diag(A)
    if pad:
        ev = ev[:-1]   # the padded row never couples, its diagonal stays 0
    return np.sort(ev)


def cluster(values: np.ndarray, tol: float) -> list[tuple[float, int]]:
    out: list[list] = []
    for v in np.sort(values):
        if out and v - out[-1][2] <= tol:
            out[-1][1] += 1
            out[-1][2] = v
            out[-1][0] += (v - out[-1][0]) / out[-1][1]
        else:
            out.append([float(v), 1, float(v)])
    return [(c[0], c[1]) for c in out]


def numeric_spectrum(A: LevelMatrix, n: int, tol: float = 1e-8, method: str = "auto",
                     dense_budget: int = DENSE_BUDGET) -> list[tuple[float, int]]:
    """Eigenvalues of A / (2n) grouped into (value, multiplicity) clusters.

    ``auto`` uses the Jacobi solver up to dimension JACOBI_MAX_DIM and LAPACK above.
    """
    if A.dim > dense_budget:
        raise ValueError(f"dimension {A.dim} exceeds the dense budget {dense_budget}")
    M = A.dense() / (2 * n)
    if method == "auto":
        method = "jacobi" if A.dim <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        ev = jacobi_eigenvalues(M)
    elif method == "lapack":
        ev = np.linalg.eigvalsh(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    return cluster(ev, tol)


def match_spectrum(numeric: list[tuple[float, int]], exact: SpectrumAtomList, tol: float = 1e-8) -> tuple[bool, str]:
    """Check that clusters and atoms are in bijection with equal multiplicities."""
    remaining = list(exact.atoms)
    for value, mult in numeric:
        hits = [a for a in remaining if abs(a.value - value) <= tol]
        if len(hits) != 1:
            return False, f"eigenvalue {value:.12f} matches {len(hits)} atoms"
        a = hits[0]
        if a.multiplicity != mult:
            return False, f"cos({a.p}pi/{a.q}): multiplicity {mult}, expected {a.multiplicity}"
        remaining.remove(a)
    if remaining:
        return False, f"{len(remaining)} atoms without eigenvalue"
    return True, f"{len(numeric)} atoms matched"

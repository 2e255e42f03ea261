"""
Monomial Galerkin coefficients H_{m,k} = <x^m Phi(x - k), Phi(x)>.

Writing both factors with the two-scale relation, substituting y = 2x and
shifting the origin to the second translate gives, for every m,

    H_{m,k} = 2^-(m+1) sum_{l1,l2} a_l1 a_l2 sum_{r=0}^{m} C(m,r) l2^(m-r) H_{r, 2k+l1-l2}

The r = m term holds the unknowns; lower r are already known, so the tables
are built one order at a time. Order zero is homogeneous and is fixed by
sum_k H_{0,k} = 1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from .connection import _symmetric_fold, nullspace_exact, refinement_operator
from .scaling import RefinementMask


class SingularMomentSystem(ArithmeticError):
    pass


@dataclass(frozen=True)
class MomentTable:
    N: int
    m_max: int
    H: np.ndarray  # shape (m_max + 1, 2K + 1), column k + K, K = 2N - 3
    exact: tuple | None = None  # rational rows when built exactly

    @property
    def half_width(self) -> int:
        return 2 * self.N - 3

    def __getitem__(self, mk: tuple[int, int]) -> float:
        m, k = mk
        K = self.half_width
        if abs(k) > K:
            return 0.0
        return float(self.H[m, k + K])


def _weighted_operator(mask: RefinementMask, p: int) -> list[list[Fraction]]:
    """T_p[k, n] = sum over 2k + l1 - l2 = n of a_l1 a_l2 l2^p, |k|, |n| <= 2N-3."""
    K = 2 * mask.N - 3
    ks = [l for l in mask.ks if mask[l] != 0]
    size = 2 * K + 1
    out = [[Fraction(0)] * size for _ in range(size)]
    for i, k in enumerate(range(-K, K + 1)):
        for l1 in ks:
            for l2 in ks:
                n = 2 * k + l1 - l2
                if abs(n) <= K:
                    out[i][n + K] += mask[l1] * mask[l2] * Fraction(l2) ** p
    return out


def _solve_exact(M: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    n = len(M)
    A = [list(M[i]) + [b[i]] for i in range(n)]
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c] != 0), None)
        if p is None:
            raise SingularMomentSystem(f"moment system is singular at column {c}")
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [v / piv for v in A[c]]
        for i in range(n):
            if i != c and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[c])]
    return [A[i][n] for i in range(n)]


def compute_moments(mask: RefinementMask, m_max: int = 10, exact: bool = True) -> MomentTable:
    """Build H_{m,k} for 0 <= m <= m_max and |k| <= 2N-3.

    ``exact=True`` keeps everything rational (the systems are small). The
    float path solves each order with LU and refuses condition numbers above
    1e12.
    """
    if m_max < 0:
        raise ValueError("m_max must be non-negative")
    N = mask.N
    K = 2 * N - 3
    size = 2 * K + 1
    T = [_weighted_operator(mask, p) for p in range(m_max + 1)]

    # order zero: symmetric null vector of T/2 - I, normalised to unit sum
    folded = _symmetric_fold(refinement_operator(mask), K)
    M0 = [[folded[i][j] / 2 - (1 if i == j else 0) for j in range(K + 1)] for i in range(K + 1)]
    basis = nullspace_exact(M0)
    if len(basis) != 1:
        raise SingularMomentSystem(f"order-0 system has {len(basis)} null directions")
    half = basis[0]
    total = half[0] + 2 * sum(half[1:])
    half = [v / total for v in half]
    rows: list[list[Fraction]] = [[half[abs(k)] for k in range(-K, K + 1)]]

    if exact:
        for m in range(1, m_max + 1):
            scale = Fraction(1, 2 ** (m + 1))
            M = [[(1 if i == j else 0) - scale * T[0][i][j] for j in range(size)] for i in range(size)]
            b = [Fraction(0)] * size
            for r in range(m):
                c = comb(m, r)
                Tp = T[m - r]
                Hr = rows[r]
                for i in range(size):
                    b[i] += scale * c * sum(Tp[i][n] * Hr[n] for n in range(size) if Tp[i][n])
            rows.append(_solve_exact(M, b))
        H = np.array([[float(v) for v in row] for row in rows])
        return MomentTable(N, m_max, H, tuple(tuple(r) for r in rows))

    Tf = [np.array(t, dtype=float) for t in T]
    H = np.zeros((m_max + 1, size))
    H[0] = [float(v) for v in rows[0]]
    for m in range(1, m_max + 1):
        scale = 2.0 ** -(m + 1)
        M = np.eye(size) - scale * Tf[0]
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularMomentSystem(f"order-{m} system is ill-conditioned (cond {cond:.3g})")
        b = sum(scale * comb(m, r) * (Tf[m - r] @ H[r]) for r in range(m))
        H[m] = np.linalg.solve(M, b)
    return MomentTable(N, m_max, H)


def shift_moment(table: MomentTable, m: int, k1: int, k2: int) -> float:
    """<x^m Phi(x - k1), Phi(x - k2)> via the binomial shift to translate k2."""
    if m > table.m_max or m < 0:
        raise ValueError(f"moment order {m} outside table range 0..{table.m_max}")
    d = k1 - k2
    if abs(d) >= 2 * table.N - 2:
        return 0.0
    if k2 == 0:
        return table[m, k1]
    return sum(comb(m, r) * float(k2) ** (m - r) * table[r, d] for r in range(m + 1))


def gram_coefficient(table: MomentTable, k1: int, k2: int) -> float:
    """Overlap <Phi(. - k1), Phi(. - k2)> = H_{0, k1-k2} (any resolution)."""
    return table[0, k1 - k2]


def gram_window(table: MomentTable, size: int) -> np.ndarray:
    """Gram matrix on ``size`` consecutive translates."""
    out = np.zeros((size, size))
    K = table.half_width
    for d in range(-K, K + 1):
        if abs(d) < size:
            out += np.diag(np.full(size - abs(d), table[0, d]), d)
    return out

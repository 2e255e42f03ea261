"""
Second-derivative connection coefficients L_k = <Phi'', Phi(. - k)>.

Substituting the two-scale relation into the integral gives a homogeneous
system ``L_k = 2 sum_{l1,l2} a_l1 a_l2 L_{2k+l2-l1}``. Its one-dimensional
null space is fixed by the normalisation ``sum_k k^2 L_k = 2`` that follows
from reproducing x^2 with integer translates.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .scaling import RefinementMask

log = logging.getLogger(__name__)


class ConnectionError_(ArithmeticError):
    """The refinement system did not have a one-dimensional null space."""


@dataclass(frozen=True)
class ConnectionTable:
    N: int
    L: dict[int, Fraction | float]  # k -> L_k for |k| <= 2N-3

    @property
    def half_width(self) -> int:
        return 2 * self.N - 3

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.L.values())

    def __getitem__(self, k: int):
        return self.L.get(k, Fraction(0) if self.exact else 0.0)

    def as_float(self) -> np.ndarray:
        """L_k as floats, indexed from k = -(2N-3)."""
        K = self.half_width
        return np.array([float(self[k]) for k in range(-K, K + 1)])


def autocorrelation(mask: RefinementMask) -> dict[int, Fraction]:
    """R(p) = sum_l a_{l+p} a_l."""
    ks = list(mask.ks)
    out: dict[int, Fraction] = {}
    for p in range(-2 * mask.N + 2, 2 * mask.N - 1):
        out[p] = sum((mask[l + p] * mask[l] for l in ks), Fraction(0))
    return out


def refinement_operator(mask: RefinementMask) -> list[list[Fraction]]:
    """Matrix T with (T v)_k = sum_{l1,l2} a_l1 a_l2 v_{2k+l2-l1}, |k| <= 2N-3.

    Entries are T[k, n] = R(2k - n) with R the mask autocorrelation; rows and
    columns run over k = -(2N-3)..2N-3.
    """
    K = 2 * mask.N - 3
    R = autocorrelation(mask)
    idx = range(-K, K + 1)
    return [[R.get(2 * k - n, Fraction(0)) for n in idx] for k in idx]


def _symmetric_fold(T: list[list[Fraction]], K: int, parity: int = 1) -> list[list[Fraction]]:
    # restrict to unknowns v_0..v_K with v_{-n} = parity * v_n
    out = []
    for k in range(K + 1):
        row = []
        for n in range(K + 1):
            v = T[k + K][n + K]
            if n:
                v += parity * T[k + K][-n + K]
            row.append(v)
        out.append(row)
    return out


def nullspace_exact(M: list[list[Fraction]]) -> list[list[Fraction]]:
    """Basis of the right null space of a rational matrix by Gauss-Jordan."""
    A = [list(r) for r in M]
    rows, cols = len(A), len(A[0])
    pivots = []
    r = 0
    for c in range(cols):
        p = next((i for i in range(r, rows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        A[r] = [v / piv for v in A[r]]
        for i in range(rows):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * cols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -A[i][f]
        basis.append(v)
    return basis


def nullspace_float(M: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Null directions of M: right singular vectors with sigma < tol * sigma_max."""
    _, s, vt = np.linalg.svd(M)
    return vt[s < tol * max(s[0], 1.0)]


def _normalise(half: list, scale_fn) -> list:
    # sum over both signs of k: sum_k k^2 L_k = 2 sum_{k>0} k^2 L_k
    total = scale_fn(half)
    if total == 0:
        raise ConnectionError_("null vector has zero second moment; cannot normalise")
    return [v * 2 / total for v in half]


def compute_connection(mask: RefinementMask, exact: bool = True) -> ConnectionTable:
    """Solve for L_k, |k| <= 2N-3, with sum_k k^2 L_k = 2.

    With ``exact=True`` (the default) the solve is carried out in rational
    arithmetic; otherwise the null space is found from an SVD.
    """
    N = mask.N
    K = 2 * N - 3
    T = _symmetric_fold(refinement_operator(mask), K)
    second_moment = lambda h: 2 * sum(k * k * h[k] for k in range(1, K + 1))

    if exact:
        M = [[2 * T[i][j] - (1 if i == j else 0) for j in range(K + 1)] for i in range(K + 1)]
        basis = nullspace_exact(M)
        if len(basis) != 1:
            raise ConnectionError_(
                f"homogeneous connection system for N={N} has a {len(basis)}-dimensional null space"
            )
        half = _normalise(basis[0], second_moment)
    else:
        M = 2 * np.array(T, dtype=float) - np.eye(K + 1)
        null = nullspace_float(M)
        if len(null) != 1:
            raise ConnectionError_(
                f"homogeneous connection system for N={N} has {len(null)} null directions"
            )
        half = _normalise(list(null[0]), second_moment)

    L = {k: half[abs(k)] for k in range(-K, K + 1)}
    return ConnectionTable(N, L)


def connection_residual(mask: RefinementMask, table: ConnectionTable) -> np.ndarray:
    """Residual of the refinement system, one entry per k = -(2N-3)..2N-3."""
    T = np.array(refinement_operator(mask), dtype=float)
    L = table.as_float()
    return L - 2 * T @ L


def stiffness_window(table: ConnectionTable, size: int) -> np.ndarray:
    """Toeplitz matrix [L_{k2-k1}] on ``size`` consecutive translates."""
    out = np.zeros((size, size))
    K = table.half_width
    for d in range(-K, K + 1):
        if abs(d) < size:
            out += np.diag(np.full(size - abs(d), float(table[d])), d)
    return out

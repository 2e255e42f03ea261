"""
Symmetric-definite generalized eigensolver for A c = E B c.

B = G G^T is factored, the standard problem G^-1 A G^-T y = E y is solved
densely, and c = G^-T y is mapped back. Each requested pair is then polished
by inverse iteration on the banded pencil A - E B; the energy is re-read as a
Rayleigh quotient whose kinetic part is formed from coefficient differences,
which removes the ~1e-11 jitter a dense solve leaves at j = 7.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .assembly import SpectralProblem

CLUSTER_GAP = 1e-9


class IndefiniteGramError(np.linalg.LinAlgError):
    def __init__(self, pivot: int, msg: str = ""):
        self.pivot = pivot
        super().__init__(msg or f"Gram matrix is not positive definite (leading minor {pivot})")


class EigenSolverError(np.linalg.LinAlgError):
    pass


@dataclass
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, B-orthonormal
    residuals: np.ndarray
    norms: np.ndarray | None = None  # c^T B c per pair

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def vector(self, state: int) -> np.ndarray:
        return self.eigenvectors[:, state]


def cholesky_lower(B: np.ndarray) -> np.ndarray:
    """Lower factor of B, raising :class:`IndefiniteGramError` with the failing pivot."""
    try:
        return sla.cholesky(B, lower=True, check_finite=True)
    except np.linalg.LinAlgError as exc:
        m = re.search(r"(\d+)", str(exc))
        raise IndefiniteGramError(int(m.group(1)) if m else -1) from exc


def _to_banded(M: np.ndarray, bw: int) -> np.ndarray:
    n = M.shape[0]
    ab = np.zeros((2 * bw + 1, n))
    for d in range(-bw, bw + 1):
        diag = np.diagonal(M, d)
        if d >= 0:
            ab[bw - d, d:] = diag
        else:
            ab[bw - d, : n + d] = diag
    return ab


def sign_fix(v: np.ndarray, rel: float = 1e-6) -> np.ndarray:
    """Flip ``v`` so its first extremum scanning outward from the centre is positive.

    The scan runs to the right of the middle sample. An extremum is a local
    maximum of |v| exceeding ``rel`` times the global maximum.
    """
    a = np.abs(v)
    floor = rel * a.max() if a.size else 0.0
    mid = (len(v) - 1) // 2
    for i in range(mid, len(v)):
        left = a[i - 1] if i > 0 else -np.inf
        right = a[i + 1] if i + 1 < len(v) else -np.inf
        if a[i] > floor and a[i] >= left and a[i] >= right:
            return -v if v[i] < 0 else v
    i = int(np.argmax(a))
    return -v if v[i] < 0 else v


def _b_orthonormalise(V: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = V.copy()
    for i in range(out.shape[1]):
        for k in range(i):
            out[:, i] -= (out[:, k] @ B @ out[:, i]) * out[:, k]
        out[:, i] /= np.sqrt(out[:, i] @ B @ out[:, i])
    return out


def _clusters(w: np.ndarray, gap: float) -> list[list[int]]:
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] < gap * max(1.0, abs(w[i])):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def inverse_iteration(problem: SpectralProblem, c: np.ndarray, sweeps: int = 2) -> tuple[float, np.ndarray]:
    """Polish an approximate eigenvector by shifted inverse iteration on the band."""
    A, B = problem.A, problem.B
    bw = problem.bandwidth
    Bb = _to_banded(B, bw)
    rho = problem.energy(c)
    for _ in range(sweeps):
        ab = _to_banded(A, bw) - rho * Bb
        try:
            y = sla.solve_banded((bw, bw), ab, B @ c, check_finite=False)
        except np.linalg.LinAlgError:
            break  # shift hit an eigenvalue exactly: c is already converged
        nrm = np.sqrt(y @ B @ y)
        if not np.isfinite(nrm) or nrm == 0:
            break
        c = y / nrm
        if c @ B @ y < 0:
            c = -c
        rho = problem.energy(c)
    return rho, c


def solve_generalized(problem: SpectralProblem, n_states: int = 1, refine: bool = True) -> Spectrum:
    """Lowest ``n_states`` eigenpairs of A c = E B c, B-orthonormal and sign-fixed."""
    n = problem.dimension
    if not 1 <= n_states <= n:
        raise ValueError(f"n_states must lie in 1..{n}, got {n_states}")
    A, B = problem.A, problem.B
    G = cholesky_lower(B)
    X = sla.solve_triangular(G, A, lower=True)
    C = sla.solve_triangular(G, X.T, lower=True)
    C = 0.5 * (C + C.T)
    try:
        w, Y = sla.eigh(C, subset_by_index=[0, n_states - 1])
    except np.linalg.LinAlgError as exc:
        raise EigenSolverError(f"dense symmetric eigensolver failed: {exc}") from exc
    V = sla.solve_triangular(G.T, Y, lower=False)

    w = w.copy()
    groups = _clusters(w, CLUSTER_GAP)
    for g in groups:
        if len(g) > 1:
            V[:, g] = _b_orthonormalise(V[:, g], B)
            for i in g:
                w[i] = problem.energy(V[:, i])
        elif refine:
            i = g[0]
            w[i], V[:, i] = inverse_iteration(problem, V[:, i])
        else:
            V[:, g] = _b_orthonormalise(V[:, g], B)

    order = np.argsort(w, kind="stable")
    w, V = w[order], V[:, order]
    for i in range(V.shape[1]):
        V[:, i] = sign_fix(V[:, i])
    BV = B @ V
    residuals = np.linalg.norm(A @ V - BV * w, axis=0)
    return Spectrum(w, V, residuals, np.einsum("ij,ij->j", V, BV))


def b_orthonormality_error(spec: Spectrum, B: np.ndarray) -> float:
    V = spec.eigenvectors
    return float(np.abs(V.T @ B @ V - np.eye(V.shape[1])).max())

"""
Assembly of the Galerkin eigenproblem A c = E B c on the truncated index set.

At resolution j the kinetic block is -2^(2j) L_{k2-k1}, the monomial x^m
contributes 2^(-jm) <x^m Phi(. - k1), Phi(. - k2)>, and the Gram block is
H_{0, k1-k2}. Translates whose support leaves [-R, R] are dropped.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .connection import ConnectionTable
from .moments import MomentTable
from .scaling import check_order


@dataclass(frozen=True)
class PolynomialPotential:
    """V(x) = sum_m coeffs[m] x^m."""

    coeffs: dict[int, float]

    def __post_init__(self):
        clean = {}
        for m, c in self.coeffs.items():
            if int(m) != m or m < 0:
                raise ValueError(f"monomial degree must be a non-negative integer, got {m!r}")
            c = float(c)
            if not np.isfinite(c):
                raise ValueError(f"coefficient of x^{m} is not finite")
            if c != 0.0:
                clean[int(m)] = c
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def sextic(cls, a: float, b: float, c: float) -> PolynomialPotential:
        return cls({2: a, 4: b, 6: c})

    @classmethod
    def decatic(cls, a: float, b: float, c: float, d: float, e: float) -> PolynomialPotential:
        return cls({2: a, 4: b, 6: c, 8: d, 10: e})

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=0)

    def confining(self) -> bool:
        deg = self.degree
        return deg > 0 and deg % 2 == 0 and self.coeffs[deg] > 0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for m, c in self.coeffs.items():
            out = out + c * x**m
        return out

    def shifted(self, c0: float) -> PolynomialPotential:
        coeffs = dict(self.coeffs)
        coeffs[0] = coeffs.get(0, 0.0) + c0
        return PolynomialPotential(coeffs)

    def label(self) -> str:
        return " + ".join(f"{c:g}*x^{m}" for m, c in self.coeffs.items()) or "0"


@dataclass(frozen=True)
class Discretization:
    j: int
    R: int
    N: int
    k_min: int
    k_max: int

    @property
    def dimension(self) -> int:
        return self.k_max - self.k_min + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def domain(self) -> tuple[float, float]:
        return -float(self.R), float(self.R)


def make_discretization(j: int, R: int = 6, N: int = 4) -> Discretization:
    """Translates k with supp Phi(2^j x - k) inside [-R, R]."""
    N = check_order(N)
    if int(j) != j or j < 0:
        raise ValueError(f"resolution level must be a non-negative integer, got {j!r}")
    if isinstance(R, float):
        if not R.is_integer():
            raise ValueError(f"domain half-width must be an integer, got {R}")
        R = int(R)
    if R <= 0:
        raise ValueError("domain half-width must be positive")
    j = int(j)
    k_max = R * 2**j - N + 1
    k_min = -k_max
    if k_max < k_min:
        raise ValueError(f"domain [-{R}, {R}] too small for N={N} at level j={j}")
    return Discretization(j, R, N, k_min, k_max)


@dataclass
class SpectralProblem:
    """Dense pair (A, B) plus what is needed to re-evaluate energies stably.

    ``kinetic_taps`` holds L_d for d >= 1 so the kinetic energy of a
    coefficient vector can be formed from differences instead of from the
    large, nearly cancelling entries of A.
    """

    A: np.ndarray
    B: np.ndarray
    disc: Discretization
    V: np.ndarray | None = field(default=None, repr=False)
    kinetic_taps: dict[int, float] = field(default_factory=dict, repr=False)
    potential: PolynomialPotential | None = field(default=None, repr=False)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @property
    def bandwidth(self) -> int:
        return 2 * self.disc.N - 3

    def kinetic_energy(self, c: np.ndarray) -> float:
        """c^T K c using sum_d L_d = 0: 4^j sum_{d>0} L_d sum_i (c_{i+d} - c_i)^2."""
        total = 0.0
        for d, Ld in self.kinetic_taps.items():
            if d < len(c):
                diff = c[d:] - c[:-d]
                # pad the truncated ends: translates outside the index set carry zero
                total += Ld * (diff @ diff + c[:d] @ c[:d] + c[-d:] @ c[-d:])
        return 4.0**self.disc.j * total

    def energy(self, c: np.ndarray) -> float:
        """Rayleigh quotient (c^T A c) / (c^T B c) with the kinetic part in difference form."""
        if self.V is None or not self.kinetic_taps:
            return float(c @ self.A @ c) / float(c @ self.B @ c)
        return (self.kinetic_energy(c) + float(c @ self.V @ c)) / float(c @ self.B @ c)


def _band(values_by_offset: dict[int, np.ndarray], n: int) -> np.ndarray:
    out = np.zeros((n, n))
    for d, v in values_by_offset.items():
        if abs(d) < n:
            idx = np.arange(n - abs(d))
            if d >= 0:
                out[idx + d, idx] = v
            else:
                out[idx, idx - d] = v
    return out


def kinetic_matrix(disc: Discretization, L: ConnectionTable) -> np.ndarray:
    """-2^(2j) L_{k2-k1}; Toeplitz and banded."""
    n = disc.dimension
    scale = -(4.0**disc.j)
    K = L.half_width
    return _band({d: np.full(n - abs(d), scale * float(L[d])) for d in range(-K, K + 1) if abs(d) < n}, n)


def potential_matrix(pot: PolynomialPotential, disc: Discretization, M: MomentTable) -> np.ndarray:
    """sum_m c_m 2^(-jm) H_{m,k1,k2}, row k1, column k2.

    Only k1 >= k2 is evaluated; the upper triangle is its mirror image so the
    result is exactly symmetric.
    """
    n = disc.dimension
    ks = disc.indices.astype(float)
    out = np.zeros((n, n))
    for d in range(min(M.half_width, n - 1) + 1):
        i2 = np.arange(n - d)
        k2 = ks[i2]
        acc = np.zeros(n - d)
        for m, c in pot.coeffs.items():
            term = np.zeros(n - d)
            for r in range(m + 1):
                term += comb(m, r) * k2 ** (m - r) * M[r, d]
            acc += c * 2.0 ** (-disc.j * m) * term
        out[i2 + d, i2] = acc
        out[i2, i2 + d] = acc
    return out


def gram_matrix(disc: Discretization, M: MomentTable) -> np.ndarray:
    n = disc.dimension
    K = M.half_width
    return _band({d: np.full(n - abs(d), M[0, d]) for d in range(-K, K + 1) if abs(d) < n}, n)


def assemble(
    pot: PolynomialPotential, disc: Discretization, L: ConnectionTable, M: MomentTable
) -> SpectralProblem:
    if L.N != disc.N or M.N != disc.N:
        raise ValueError(f"tables built for N={L.N}/{M.N} but discretization uses N={disc.N}")
    if pot.degree > M.m_max:
        raise ValueError(f"potential degree {pot.degree} exceeds moment table m_max={M.m_max}")
    if not pot.confining():
        warnings.warn(f"potential {pot.label()} is not confining; bound states may be truncation artefacts")
    V = potential_matrix(pot, disc, M)
    A = kinetic_matrix(disc, L) + V
    B = gram_matrix(disc, M)
    taps = {d: float(L[d]) for d in range(1, L.half_width + 1)}
    return SpectralProblem(A, B, disc, V, taps, pot)

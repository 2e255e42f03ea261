"""
Deslauriers-Dubuc interpolating scaling functions.

The refinement mask is built from Lagrange basis polynomials evaluated at 1/2,
and the scaling function is sampled on dyadic grids by the cascade algorithm.
Everything here is exact: the mask is held as :class:`fractions.Fraction`
values and dyadic samples are stored as integer numerators over a common
denominator, so float conversion only happens when asked for.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import lcm

import numpy as np

SUPPORTED_ORDERS = (2, 4, 6, 8)


def check_order(N: int) -> int:
    if isinstance(N, bool) or not isinstance(N, (int, np.integer)):
        raise ValueError(f"scale order must be an integer, got {N!r}")
    N = int(N)
    if N < 2 or N % 2:
        raise ValueError(f"scale order must be a positive even integer, got {N}")
    return N


def lagrange_at_half(nodes: list[int], i: int) -> Fraction:
    """Lagrange basis polynomial for node ``i`` on ``nodes``, evaluated at 1/2."""
    x = Fraction(1, 2)
    val = Fraction(1)
    for n in nodes:
        if n != i:
            val *= (x - n) / (i - n)
    return val


@dataclass(frozen=True)
class RefinementMask:
    """Two-scale coefficients a_k, k = -N+1..N-1, of an order-N DD function."""

    N: int
    coeffs: dict[int, Fraction]

    @property
    def support(self) -> tuple[int, int]:
        return -self.N + 1, self.N - 1

    @property
    def ks(self) -> range:
        return range(-self.N + 1, self.N)

    def __getitem__(self, k: int) -> Fraction:
        return self.coeffs.get(k, Fraction(0))

    def as_float(self) -> np.ndarray:
        """Coefficients as a float array indexed from k = -N+1."""
        return np.array([float(self[k]) for k in self.ks])

    @cached_property
    def common_denominator(self) -> int:
        return lcm(*(c.denominator for c in self.coeffs.values()))

    def integer_taps(self) -> dict[int, int]:
        """a_k * D as integers, D being :attr:`common_denominator`."""
        D = self.common_denominator
        return {k: int(c * D) for k, c in self.coeffs.items() if c}


def build_mask(N: int = 4) -> RefinementMask:
    """Return the order-N Deslauriers-Dubuc refinement mask.

    a_0 = 1, a_{2i} = 0 otherwise, and a_{1-2i} = l_i(1/2) with l_i the
    Lagrange basis on the nodes -N/2+1, ..., N/2.
    """
    N = check_order(N)
    nodes = list(range(-N // 2 + 1, N // 2 + 1))
    coeffs = {k: Fraction(0) for k in range(-N + 1, N)}
    coeffs[0] = Fraction(1)
    for i in nodes:
        coeffs[1 - 2 * i] = lagrange_at_half(nodes, i)
    return RefinementMask(N, coeffs)


@dataclass(frozen=True)
class DyadicSamples:
    """Exact values of Phi at k / 2**depth across the support.

    ``numerators[n]`` belongs to the point ``x = (n - offset) / 2**depth`` and
    the value there is ``numerators[n] / denominator``.
    """

    N: int
    depth: int
    numerators: np.ndarray = field(repr=False)  # object dtype, Python ints
    denominator: int

    @property
    def step(self) -> float:
        return 2.0 ** -self.depth

    @property
    def offset(self) -> int:
        return (self.N - 1) << self.depth

    @cached_property
    def grid(self) -> np.ndarray:
        n = np.arange(len(self.numerators)) - self.offset
        return n * self.step

    @cached_property
    def values(self) -> np.ndarray:
        D = self.denominator
        return np.array([int(p) / D for p in self.numerators], dtype=float)

    def exact(self, n: int) -> Fraction:
        """Phi(n / 2**depth) as a Fraction; zero outside the support."""
        idx = n + self.offset
        if idx < 0 or idx >= len(self.numerators):
            return Fraction(0)
        return Fraction(int(self.numerators[idx]), self.denominator)

    def at(self, x: Fraction | int) -> Fraction:
        """Phi(x) for a dyadic rational ``x`` representable at this depth."""
        x = Fraction(x) * (1 << self.depth)
        if x.denominator != 1:
            raise ValueError(f"{x / (1 << self.depth)} is not on the depth-{self.depth} grid")
        return self.exact(int(x))

    def __call__(self, x) -> np.ndarray:
        """Float lookup at grid points (x must lie on the grid or outside support)."""
        x = np.asarray(x, dtype=float)
        n = np.rint(x * (1 << self.depth)).astype(np.int64) + self.offset
        inside = (n >= 0) & (n < len(self.numerators))
        out = np.zeros(x.shape)
        out[inside] = self.values[n[inside]]
        return out


def eval_phi_dyadic(mask: RefinementMask, depth: int) -> DyadicSamples:
    """Sample Phi on the dyadic grid 2**-depth Z by the cascade algorithm.

    Seeds the integers with the Kronecker sequence and applies
    ``v_{d+1}[n] = sum_k a_k v_d[n - k 2**d]`` ``depth`` times.
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    N = mask.N
    taps = mask.integer_taps()
    D = mask.common_denominator
    vals = np.zeros(2 * N - 1, dtype=object)
    vals[:] = 0
    vals[N - 1] = 1
    denom = 1
    for d in range(depth):
        # coarse position p sits at index p + off_f so fine and coarse share indexing
        off_c = (N - 1) << d
        off_f = (N - 1) << (d + 1)
        size = 2 * off_f + 1
        coarse = np.zeros(size, dtype=object)
        coarse[:] = 0
        coarse[off_f - off_c: off_f + off_c + 1] = vals
        nxt = np.zeros(size, dtype=object)
        nxt[:] = 0
        for k, t in taps.items():
            shift = k << d
            if shift >= 0:
                nxt[shift:] += t * coarse[: size - shift]
            else:
                nxt[: size + shift] += t * coarse[-shift:]
        vals = nxt
        denom *= D
    return DyadicSamples(N, depth, vals, denom)

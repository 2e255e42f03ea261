"""
Independent references: a finite-difference Dirichlet solver, the closed-form
quasi-exactly-solvable sextic ground state, and tabulated reference energies.

The finite-difference spectrum uses the three-point Laplacian on nested grids
(n, 2n, 4n intervals) and two Richardson steps, which removes the h^2 and h^4
error terms. It is far less accurate than the Galerkin solver and is meant to
catch gross errors, not to confirm the last digits.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .assembly import PolynomialPotential

DATA_FILE = "reference_cases.csv"
FORMAT_VERSION = 1


class OracleError(RuntimeError):
    pass


@dataclass(frozen=True)
class FDSpectrum:
    eigenvalues: np.ndarray  # Richardson-extrapolated
    error_estimate: np.ndarray
    raw: tuple[np.ndarray, np.ndarray, np.ndarray]  # n, 2n, 4n


def _fd_levels(pot: PolynomialPotential, lo: float, hi: float, n: int, k: int, vectors: bool = False):
    h = (hi - lo) / n
    x = lo + h * np.arange(1, n)
    d = 2.0 / h**2 + pot(x)
    e = np.full(n - 2, -1.0 / h**2)
    try:
        if vectors:
            w, v = eigh_tridiagonal(d, e, select="i", select_range=(0, k - 1))
            return x, w, v
        return eigh_tridiagonal(d, e, eigvals_only=True, select="i", select_range=(0, k - 1))
    except np.linalg.LinAlgError as exc:
        raise OracleError(f"tridiagonal eigensolve failed: {exc}") from exc


def numerov_solve(
    pot: PolynomialPotential,
    domain: tuple[float, float] = (-6.0, 6.0),
    n_points: int = 4000,
    n_states: int = 1,
) -> FDSpectrum:
    """Lowest eigenvalues of -psi'' + V psi = E psi with psi = 0 at both ends.

    ``n_points`` is the number of intervals of the coarsest grid; the solve is
    repeated with 2 and 4 times as many and combined by Richardson
    extrapolation. The error estimate is the size of the last correction plus a
    rounding allowance that grows like eps / h^2.
    """
    if n_points < 1000:
        raise ValueError("n_points must be at least 1000")
    lo, hi = map(float, domain)
    E1, E2, E4 = (_fd_levels(pot, lo, hi, n_points * f, n_states) for f in (1, 2, 4))
    R12 = (4 * E2 - E1) / 3
    R24 = (4 * E4 - E2) / 3
    R = (16 * R24 - R12) / 15
    h = (hi - lo) / (4 * n_points)
    rounding = 50 * np.finfo(float).eps * (4 / h**2 + np.abs(R))
    return FDSpectrum(R, np.abs(R - R24) + rounding, (E1, E2, E4))


def fd_eigenfunction(
    pot: PolynomialPotential, state: int, domain: tuple[float, float], n_points: int
) -> tuple[np.ndarray, np.ndarray]:
    """Richardson-combined FD eigenfunction on the grid of ``n_points`` intervals.

    Solves on n and 2n intervals, normalises each with the trapezoid rule,
    aligns signs and combines the shared nodes as (4 psi_2n - psi_n) / 3.
    Returns interior nodes and values.
    """
    lo, hi = map(float, domain)
    out = []
    for n in (n_points, 2 * n_points):
        x, _, v = _fd_levels(pot, lo, hi, n, state + 1, vectors=True)
        psi = v[:, state]
        psi = psi / np.sqrt(np.sum(psi**2) * (hi - lo) / n)
        out.append((x, psi))
    (x1, p1), (_, p2) = out
    p2 = p2[1::2]
    if p1 @ p2 < 0:
        p2 = -p2
    return x1, (4 * p2 - p1) / 3


def qes_ground_profile(b: float, c: float, grid, energy: float | None = None, tol: float = 1e-8) -> np.ndarray:
    """Unnormalised ground state exp(-sqrt(c) x^4 / 4 - b x^2 / (4 sqrt(c))).

    It solves -psi'' + V psi = E psi for V = a x^2 + b x^4 + c x^6 with
    a = b^2 / (4c) - 3 sqrt(c) and E = b / (2 sqrt(c)). Before returning, the
    equation is checked at every grid point with a five-point second
    difference; a relative residual above ``tol`` raises :class:`OracleError`.
    ``energy`` overrides the energy used in that check.
    """
    if c <= 0:
        raise ValueError("sextic coefficient must be positive")
    rc = np.sqrt(c)
    a = b * b / (4 * c) - 3 * rc
    E = b / (2 * rc) if energy is None else float(energy)
    V = PolynomialPotential.sextic(a, b, c)

    def psi(x):
        x2 = x * x  # exactly even in x, unlike a vectorised x**4
        return np.exp(-rc * x2 * x2 / 4 - b * x2 / (4 * rc))

    x = np.asarray(grid, dtype=float)
    h = 1e-3
    d2 = (-psi(x + 2 * h) + 16 * psi(x + h) - 30 * psi(x) + 16 * psi(x - h) - psi(x - 2 * h)) / (12 * h * h)
    vals = psi(x)
    resid = -d2 + (V(x) - E) * vals
    scale = np.max(np.abs(vals) * (1 + np.abs(V(x)) + abs(E)))
    worst = float(np.max(np.abs(resid))) / scale
    if worst > tol:
        raise OracleError(
            f"QES profile (b={b}, c={c}) fails the Schrodinger residual check: {worst:.3e} > {tol:.1e}"
        )
    return vals


@dataclass(frozen=True)
class ReferenceCase:
    label: str
    potential: PolynomialPotential
    state: int
    reference_energy: float
    source: str
    group: str
    row: int
    tolerance: float | None = None


def _parse_coeffs(text: str) -> PolynomialPotential:
    coeffs = {}
    for item in text.split():
        m, v = item.split(":")
        coeffs[int(m)] = float(v)
    return PolynomialPotential(coeffs)


def reference_suite(group: str | None = None, source: str | None = None) -> list[ReferenceCase]:
    """Reference energies, optionally filtered by group and source."""
    text = resources.files(__package__).joinpath("data", DATA_FILE).read_text()
    lines = text.splitlines()
    header = [l for l in lines if l.startswith("#")]
    if not any(f"format_version={FORMAT_VERSION}" in l for l in header):
        raise OracleError(f"{DATA_FILE}: unrecognised format version")
    rows = csv.DictReader(l for l in lines if l and not l.startswith("#"))
    cases = []
    for r in rows:
        case = ReferenceCase(
            label=r["label"],
            potential=_parse_coeffs(r["coeffs"]),
            state=int(r["state"]),
            reference_energy=float(r["energy"]),
            source=r["source"],
            group=r["group"],
            row=int(r["row"]),
            tolerance=float(r["tolerance"]) if r["tolerance"] else None,
        )
        if not np.isfinite(case.reference_energy):
            raise OracleError(f"{case.label}: non-finite reference energy")
        if (group is None or case.group == group) and (source is None or case.source == source):
            cases.append(case)
    return cases

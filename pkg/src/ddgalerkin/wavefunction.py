"""
Eigenfunction reconstruction psi(x) = sum_k c_k 2^(j/2) Phi(2^j x - k) on dyadic grids.

On the grid 2^-d Z with d >= j, Phi is only needed at multiples of 2^-(d-j),
so sampling is an upsample-and-convolve of the coefficient vector.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.integrate import trapezoid

from .assembly import Discretization
from .eigen import Spectrum, sign_fix
from .scaling import DyadicSamples


@dataclass(frozen=True)
class SampledWavefunction:
    grid: np.ndarray
    values: np.ndarray
    norm_certificate: float
    depth: int
    state: int = 0
    energy: float = float("nan")
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def step(self) -> float:
        return 2.0 ** -self.depth

    def trapezoid_norm(self) -> float:
        return float(trapezoid(self.values**2, self.grid))


def _phi_stride(samples: DyadicSamples, q: int) -> np.ndarray:
    if samples.depth < q:
        raise ValueError(f"need Phi samples at depth >= {q}, got {samples.depth}")
    stride = 1 << (samples.depth - q)
    return samples.values[::stride]


def reconstruct(
    spec: Spectrum,
    state: int,
    disc: Discretization,
    samples: DyadicSamples,
    depth: int = 10,
) -> SampledWavefunction:
    if depth < disc.j:
        raise ValueError(f"sampling depth {depth} is below the resolution level j={disc.j}")
    if not 0 <= state < len(spec):
        raise ValueError(f"state {state} not among the {len(spec)} computed eigenpairs")
    if samples.N != disc.N:
        raise ValueError("Phi samples and discretization use different orders")
    q = depth - disc.j
    phi = _phi_stride(samples, q)  # Phi at (i - (N-1)2^q) / 2^q
    up = 1 << q
    c = spec.vector(state)

    R = disc.R
    n_lo = -R << depth
    n_hi = R << depth
    # sum_k c_k phi[n - k up + (N-1)up]; the leftmost translate k_min puts its
    # support start at n = (k_min - N + 1) up = n_lo
    spikes = np.zeros((len(c) - 1) * up + 1)
    spikes[::up] = c
    full = np.convolve(spikes, phi)
    start = (disc.k_min - disc.N + 1) * up
    n = np.arange(n_lo, n_hi + 1)
    idx = n - start
    vals = np.zeros(len(n))
    ok = (idx >= 0) & (idx < len(full))
    vals[ok] = full[idx[ok]]
    vals *= 2.0 ** (disc.j / 2)

    vals = sign_fix(vals)
    cert = abs(float(spec.norms[state]) - 1.0) if spec.norms is not None else float("nan")
    return SampledWavefunction(
        grid=n * 2.0**-depth,
        values=vals,
        norm_certificate=cert,
        depth=depth,
        state=state,
        energy=float(spec.eigenvalues[state]),
    )


@dataclass(frozen=True)
class Deviation:
    max_abs: float
    series: np.ndarray
    flipped: bool


def deviation(f: SampledWavefunction | np.ndarray, g: SampledWavefunction | np.ndarray) -> Deviation:
    """Pointwise |f - g| after flipping g globally if the two anti-align."""
    if isinstance(f, SampledWavefunction) and isinstance(g, SampledWavefunction):
        if f.grid.shape != g.grid.shape or not np.array_equal(f.grid, g.grid):
            raise ValueError("wavefunctions are sampled on different grids")
    fv = f.values if isinstance(f, SampledWavefunction) else np.asarray(f, dtype=float)
    gv = g.values if isinstance(g, SampledWavefunction) else np.asarray(g, dtype=float)
    if fv.shape != gv.shape:
        raise ValueError(f"grid mismatch: {fv.shape} vs {gv.shape}")
    flipped = bool(fv @ gv < 0)
    if flipped:
        gv = -gv
    series = np.abs(fv - gv)
    return Deviation(float(series.max(initial=0.0)), series, flipped)


def normalise_samples(grid: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Scale samples to unit trapezoid norm and apply the outward-extremum sign rule."""
    values = np.asarray(values, dtype=float)
    return sign_fix(values / np.sqrt(trapezoid(values**2, grid)))


def sign_changes(values: np.ndarray, rel: float = 1e-7) -> int:
    """Number of sign changes, ignoring samples below ``rel`` * max |values|."""
    v = values[np.abs(values) > rel * np.abs(values).max()]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def write_csv(
    path: str | Path,
    wf: SampledWavefunction,
    oracle: np.ndarray | None = None,
    meta: dict | None = None,
) -> Path:
    """One row per grid point: x, psi[, psi_oracle, abs_dev]; '#' metadata lines first."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    info = {"state": wf.state, "energy": f"{wf.energy:.17g}", "depth": wf.depth}
    info.update(meta or {})
    with path.open("w", newline="") as fh:
        for k, v in info.items():
            fh.write(f"# {k}={v}\n")
        w = csv.writer(fh)
        if oracle is None:
            w.writerow(["x", "psi"])
            for x, p in zip(wf.grid, wf.values):
                w.writerow([f"{x:.17g}", f"{p:.17g}"])
        else:
            dev = deviation(wf.values, oracle)
            o = -oracle if dev.flipped else oracle
            w.writerow(["x", "psi", "psi_oracle", "abs_dev"])
            for x, p, q, e in zip(wf.grid, wf.values, o, dev.series):
                w.writerow([f"{x:.17g}", f"{p:.17g}", f"{q:.17g}", f"{e:.17g}"])
    return path


def read_csv(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    meta, rows = {}, []
    with Path(path).open() as fh:
        lines = fh.read().splitlines()
    for l in lines:
        if l.startswith("#"):
            k, _, v = l[1:].strip().partition("=")
            meta[k] = v
        else:
            rows.append(l)
    reader = csv.reader(rows)
    header = next(reader)
    data = np.array([[float(v) for v in r] for r in reader])
    return meta, {h: data[:, i] for i, h in enumerate(header)}

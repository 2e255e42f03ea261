"""
Command-line front end.

    ddgalerkin solve --potential sextic --coeffs 1 1 1 --j 7 --n-states 3
    ddgalerkin convergence --potential sextic --coeffs 10 10 10 --j-range 3 7
    ddgalerkin tables --N 4
    ddgalerkin compare --group sextic decatic
    ddgalerkin wavefunction --potential sextic --coeffs -11/4 1 1 --oracle qes

Exit status: 0 success, 2 invalid input, 3 numerical failure, 4 a compare
case outside its tolerance.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import cache
from .assembly import PolynomialPotential
from .oracle import OracleError, fd_eigenfunction, qes_ground_profile, reference_suite
from .pipeline import solve_potential
from .scaling import eval_phi_dyadic
from .wavefunction import deviation, normalise_samples, reconstruct, write_csv

log = logging.getLogger("ddgalerkin")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC, EXIT_TOLERANCE = 0, 2, 3, 4

# gate tolerances for `compare`, keyed by (source, group); exact and SCM
# references gate only at the level they were matched to. Level-7 Galerkin
# values carry ~1e-11 of solver rounding and are shown for information.
REFERENCE_J = 7
GROUPS = ("qes_alpha", "qes_exact", "sextic", "decatic")
COMPARE_TOL = {
    ("exact", "qes_alpha"): 1e-11,
    ("exact", "qes_exact"): 3e-11,
    ("scm", "sextic"): 2e-11,
    ("scm_band", "decatic"): 2e-9,
    ("galerkin_j3", "qes_alpha"): 1e-5,
    ("galerkin_j5", "qes_alpha"): 1e-8,
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    potential: str = "sextic"
    coeffs: list = field(default_factory=lambda: [1.0, 1.0, 1.0])
    N: int = 4
    j: int = 7
    j_range: list | None = None
    R: int = 6
    n_states: int = 1
    depth: int = 10
    outdir: str | None = None
    oracle: str = "none"  # none | qes | fd | auto
    workers: int = 1
    group: list | None = None
    cache_dir: str | None = None
    no_cache: bool = False

    def validate(self) -> RunConfig:
        if self.potential not in ("sextic", "decatic", "general"):
            raise ConfigError(f"unknown potential form {self.potential!r}")
        if self.n_states < 1:
            raise ConfigError("n_states must be at least 1")
        if self.j_range is not None:
            js = list(self.j_range)
            if not js or any(b <= a for a, b in zip(js, js[1:])):
                raise ConfigError("j-range must be non-empty and strictly ascending")
        if self.oracle not in ("none", "qes", "fd", "auto"):
            raise ConfigError(f"unknown oracle {self.oracle!r}")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        self.build_potential()
        return self

    def build_potential(self) -> PolynomialPotential:
        try:
            if self.potential == "general":
                coeffs = {}
                for item in self.coeffs:
                    m, v = str(item).split(":")
                    coeffs[int(m)] = _number(v)
                return PolynomialPotential(coeffs)
            vals = [_number(v) for v in self.coeffs]
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"bad coefficient list {self.coeffs!r}: {exc}") from exc
        if self.potential == "sextic":
            if len(vals) != 3:
                raise ConfigError("sextic potential takes 3 coefficients a b c")
            return PolynomialPotential.sextic(*vals)
        if len(vals) != 5:
            raise ConfigError("decatic potential takes 5 coefficients a b c d e")
        return PolynomialPotential.decatic(*vals)


def _number(text) -> float:
    v = float(Fraction(str(text)))
    if not np.isfinite(v):
        raise ValueError(f"non-finite coefficient {text!r}")
    return v


def _tables(cfg: RunConfig, m_max: int = 10):
    return cache.get_tables(cfg.N, m_max, cfg.cache_dir, use_cache=not cfg.no_cache)


def _out(cfg: RunConfig) -> Path | None:
    if cfg.outdir is None:
        return None
    p = Path(cfg.outdir)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def _emit_json(path: Path | None, name: str, doc: dict) -> None:
    if path is not None:
        (path / name).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


# ---------------------------------------------------------------- solve


def cmd_solve(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    pot = cfg.build_potential()
    tables = _tables(cfg, max(10, pot.degree))
    sol = solve_potential(pot, cfg.j, cfg.n_states, cfg.R, cfg.N, tables)
    sp = sol.spectrum
    print(f"V(x) = {pot.label()}   N={cfg.N} j={cfg.j} R={cfg.R} dim={sol.disc.dimension}", file=stdout)
    print(f"{'n':>3}  {'E_n':>22}  {'residual':>10}", file=stdout)
    for i, (e, r) in enumerate(zip(sp.eigenvalues, sp.residuals)):
        print(f"{i:>3}  {e:22.13f}  {r:10.2e}", file=stdout)
    print("timings: " + ", ".join(f"{k} {v:.2f}s" for k, v in sol.timings.items()), file=stdout)
    summary = {
        "potential": {str(m): c for m, c in pot.coeffs.items()},
        "N": cfg.N,
        "j": cfg.j,
        "R": cfg.R,
        "energies": [_fmt(e) for e in sp.eigenvalues],
        "residuals": [_fmt(r) for r in sp.residuals],
        "timings": {k: round(v, 4) for k, v in sol.timings.items()},
    }
    out = _out(cfg)
    _emit_json(out, "summary.json", summary)
    if out is not None and cfg.oracle != "none":
        _write_wavefunctions(cfg, sol, tables, out, stdout)
    return EXIT_OK


# ---------------------------------------------------------- convergence


def cmd_convergence(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    js = list(cfg.j_range or [])
    if len(js) < 2:
        raise ConfigError("convergence needs a j-range of at least two levels")
    pot = cfg.build_potential()
    tables = _tables(cfg, max(10, pot.degree))

    def one(j):
        return solve_potential(pot, j, cfg.n_states, cfg.R, cfg.N, tables)

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        sols = list(pool.map(one, js))
    E = np.array([s.energies for s in sols])  # (levels, states)
    dE = E[:-1] - E[1:]
    print(f"V(x) = {pot.label()}   N={cfg.N} R={cfg.R}", file=stdout)
    print(f"{'j':>3}  {'E_0^j':>22}  {'dE_j':>10}", file=stdout)
    for i, j in enumerate(js):
        d = f"{dE[i - 1, 0]:10.2e}" if i else " " * 10
        print(f"{j:>3}  {E[i, 0]:22.15f}  {d}", file=stdout)
    mags = np.abs(dE[:, 0])
    monotone = bool(np.all(mags[1:] < mags[:-1]))
    if not monotone:
        print("warning: |dE_j| is not monotonically decreasing", file=stdout)
    out = _out(cfg)
    if out is not None:
        with (out / "convergence.csv").open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["j"] + [f"E{n}" for n in range(E.shape[1])] + [f"dE{n}" for n in range(E.shape[1])])
            for i, j in enumerate(js):
                d = [_fmt(v) for v in dE[i - 1]] if i else [""] * E.shape[1]
                w.writerow([j] + [_fmt(v) for v in E[i]] + d)
        _emit_json(out, "convergence.json", {"j": js, "E": [[_fmt(v) for v in r] for r in E], "monotone": monotone})
    return EXIT_OK


# --------------------------------------------------------------- tables


def sci_paren(v: float, digits: int = 5) -> str:
    """Format like 8.00968(-1), i.e. mantissa(exponent)."""
    if v == 0:
        return "0"
    mant, exp = f"{v:.{digits}e}".split("e")
    exp = int(exp)
    return mant if exp == 0 else f"{mant}({exp})"


def cmd_tables(cfg: RunConfig, m_max: int = 10, stdout=None) -> int:
    stdout = stdout or sys.stdout
    bundle = cache.build_bundle(cfg.N, m_max)
    N = cfg.N
    K = 2 * N - 3
    ks = list(range(-N + 1, 1))
    print(f"Refinement mask a_k (= a_-k), N={N}", file=stdout)
    print("k    " + "".join(f"{k:>14}" for k in ks), file=stdout)
    print("a_k  " + "".join(f"{str(bundle.mask[k]):>14}" for k in ks), file=stdout)
    print(file=stdout)
    ks = list(range(-K, 1))
    print(f"Connection coefficients L_k (= L_-k), N={N}", file=stdout)
    print("k    " + "".join(f"{k:>14}" for k in ks), file=stdout)
    print("L_k  " + "".join(f"{str(bundle.connection[k]):>14}" for k in ks), file=stdout)
    print(file=stdout)
    print(f"Moment coefficients H_(m,k), N={N}; u(-n) means u x 10^-n", file=stdout)
    print("m     " + "".join(f"{k:>14}" for k in ks), file=stdout)
    for m in range(m_max + 1):
        row = "".join(f"{sci_paren(bundle.moments[m, k]):>14}" for k in ks)
        print(f"H_{m:<3} {row}", file=stdout)
    if not cfg.no_cache:
        try:
            path = cache.store(bundle, cache.bundle_path(N, m_max, cfg.cache_dir))
            log.info("wrote %s", path)
        except OSError as exc:
            log.warning("could not write table cache: %s", exc)
    return EXIT_OK


# -------------------------------------------------------------- compare


def cmd_compare(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    wanted = set(cfg.group or GROUPS)
    cases = [c for c in reference_suite() if c.group in wanted]
    sources = {"exact", "scm", "scm_band", f"galerkin_j{cfg.j}"}
    cases = [c for c in cases if c.source in sources]
    if not cases:
        raise ConfigError(f"no reference cases for groups {sorted(wanted)} at j={cfg.j}")
    tables = _tables(cfg)

    keys = []
    for c in cases:
        key = tuple(sorted(c.potential.coeffs.items()))
        if key not in keys:
            keys.append(key)
    n_states = {k: 1 + max(c.state for c in cases if tuple(sorted(c.potential.coeffs.items())) == k) for k in keys}

    def one(key):
        pot = PolynomialPotential(dict(key))
        return solve_potential(pot, cfg.j, n_states[key], cfg.R, cfg.N, tables).energies

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        energies = dict(zip(keys, pool.map(one, keys)))

    breaches = 0
    rows = []
    print(f"{'case':<22} {'E':>22} {'reference':>22} {'difference':>11} {'tol':>8}  status", file=stdout)
    for c in cases:
        E = float(energies[tuple(sorted(c.potential.coeffs.items()))][c.state])
        diff = c.reference_energy - E
        tol = COMPARE_TOL.get((c.source, c.group))
        if c.source in ("exact", "scm", "scm_band") and cfg.j != REFERENCE_J:
            tol = None
        if c.source == "scm_band":
            # SCM energy is reference +- band; bound |E - E_SCM| by |E - ref| + band
            score = abs(diff) + c.tolerance
        else:
            score = abs(diff)
        status = "info" if tol is None else ("ok" if score <= tol else "FAIL")
        breaches += status == "FAIL"
        tol_s = f"{tol:8.0e}" if tol is not None else " " * 8
        print(f"{c.label:<22} {E:22.16f} {c.reference_energy:22.16f} {diff:11.2e} {tol_s}  {status}", file=stdout)
        rows.append({"label": c.label, "E": _fmt(E), "reference": _fmt(c.reference_energy), "difference": _fmt(diff),
                     "score": _fmt(score), "tolerance": tol, "status": status})
    print(f"{breaches} tolerance breach(es) in {len(cases)} cases", file=stdout)
    _emit_json(_out(cfg), "compare.json", {"j": cfg.j, "cases": rows, "breaches": breaches})
    return EXIT_TOLERANCE if breaches else EXIT_OK


# --------------------------------------------------------- wavefunction


def _qes_parameters(pot: PolynomialPotential) -> tuple[float, float] | None:
    c = pot.coeffs
    if set(c) - {2, 4, 6} or c.get(6, 0) <= 0:
        return None
    a, b, cc = c.get(2, 0.0), c.get(4, 0.0), c[6]
    if abs(a - (b * b / (4 * cc) - 3 * np.sqrt(cc))) > 1e-12 * max(1.0, abs(a)):
        return None
    return b, cc


def _write_wavefunctions(cfg: RunConfig, sol, tables, out: Path, stdout) -> dict[int, float]:
    samples = eval_phi_dyadic(tables.mask, max(cfg.depth - cfg.j, 0))
    pot = sol.potential
    meta = {
        "potential": json.dumps({str(m): c for m, c in pot.coeffs.items()}),
        "j": cfg.j,
        "N": cfg.N,
        "R": cfg.R,
    }
    devs = {}
    for state in range(cfg.n_states):
        wf = reconstruct(sol.spectrum, state, sol.disc, samples, cfg.depth)
        ref = None
        mode = cfg.oracle
        qes = _qes_parameters(pot)
        if mode == "auto":
            mode = "qes" if (state == 0 and qes) else "fd"
        if mode == "qes":
            if qes is None or state != 0:
                raise ConfigError("the QES oracle covers only the ground state of a constrained sextic")
            ref = normalise_samples(wf.grid, qes_ground_profile(*qes, wf.grid))
        elif mode == "fd":
            n = 2 * cfg.R << cfg.depth
            x, psi = fd_eigenfunction(pot, state, (-cfg.R, cfg.R), n)
            ref = np.zeros_like(wf.values)
            ref[1:-1] = psi
            ref = normalise_samples(wf.grid, ref)
        path = write_csv(out / f"psi_{state}.csv", wf, ref, meta)
        line = f"state {state}: E={wf.energy:.13f} -> {path}"
        if ref is not None:
            devs[state] = deviation(wf.values, ref).max_abs
            line += f"  max|psi - psi_{mode}| = {devs[state]:.3e}"
        print(line, file=stdout)
    return devs


def cmd_wavefunction(cfg: RunConfig, stdout=None) -> int:
    stdout = stdout or sys.stdout
    pot = cfg.build_potential()
    tables = _tables(cfg, max(10, pot.degree))
    sol = solve_potential(pot, cfg.j, cfg.n_states, cfg.R, cfg.N, tables)
    out = _out(cfg) or Path(".")
    _write_wavefunctions(cfg, sol, tables, out, stdout)
    return EXIT_OK


# ----------------------------------------------------------------- main


COMMANDS = {
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "tables": cmd_tables,
    "compare": cmd_compare,
    "wavefunction": cmd_wavefunction,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ddgalerkin", description="Interpolating-wavelet Galerkin Schrodinger solver")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="JSON file with RunConfig keys; flags override it")
        s.add_argument("--potential", choices=["sextic", "decatic", "general"])
        s.add_argument(
            "--coeffs",
            nargs="+",
            help="a b c (sextic), a b c d e (decatic) or m:c pairs (general); "
            "comma-separated works too, e.g. --coeffs=-11/4,1,1",
        )
        s.add_argument("--N", type=int)
        s.add_argument("--j", type=int)
        s.add_argument("--j-range", type=int, nargs=2, metavar=("J_LO", "J_HI"))
        s.add_argument("--R", type=int)
        s.add_argument("--n-states", type=int)
        s.add_argument("--depth", type=int)
        s.add_argument("--outdir")
        s.add_argument("--oracle", choices=["none", "qes", "fd", "auto"])
        s.add_argument("--workers", type=int)
        s.add_argument("--group", nargs="+", choices=GROUPS, help="reference groups for compare")
        s.add_argument("--cache-dir")
        s.add_argument("--no-cache", action="store_true", default=None)
    return p


def make_config(args: argparse.Namespace) -> RunConfig:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    for f in fields(RunConfig):
        v = getattr(args, f.name, None)
        if v is not None:
            data[f.name] = v
    if isinstance(data.get("coeffs"), (list, str)):
        items = data["coeffs"] if isinstance(data["coeffs"], list) else [data["coeffs"]]
        data["coeffs"] = [t for item in items for t in str(item).replace(",", " ").split()]
    if "j_range" in data and data["j_range"] is not None:
        lo, hi = data["j_range"][0], data["j_range"][-1]
        data["j_range"] = list(range(int(lo), int(hi) + 1))
    try:
        cfg = RunConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg.validate()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg)
    except (np.linalg.LinAlgError, ArithmeticError, OracleError) as exc:
        # LinAlgError subclasses ValueError, so it has to be caught first
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

"""End-to-end solve: tables -> discretization -> assembly -> eigenpairs."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .assembly import Discretization, PolynomialPotential, SpectralProblem, assemble, make_discretization
from .cache import TableBundle, get_tables
from .eigen import Spectrum, solve_generalized


@dataclass
class Solution:
    potential: PolynomialPotential
    disc: Discretization
    problem: SpectralProblem
    spectrum: Spectrum
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def energies(self):
        return self.spectrum.eigenvalues


def solve_potential(
    pot: PolynomialPotential,
    j: int = 7,
    n_states: int = 1,
    R: int = 6,
    N: int = 4,
    tables: TableBundle | None = None,
    refine: bool = True,
) -> Solution:
    t0 = time.perf_counter()
    if tables is None:
        tables = get_tables(N, max(10, pot.degree))
    elif tables.N != N:
        raise ValueError(f"tables built for N={tables.N}, requested N={N}")
    t1 = time.perf_counter()
    disc = make_discretization(j, R, N)
    problem = assemble(pot, disc, tables.connection, tables.moments)
    t2 = time.perf_counter()
    spectrum = solve_generalized(problem, n_states, refine=refine)
    t3 = time.perf_counter()
    return Solution(pot, disc, problem, spectrum, {"tables": t1 - t0, "assemble": t2 - t1, "solve": t3 - t2})

"""Wavelet-Galerkin eigensolver for anharmonic oscillators on Deslauriers-Dubuc scaling functions."""

from .assembly import PolynomialPotential, assemble, make_discretization
from .cache import TableBundle, get_tables, load, store
from .connection import ConnectionTable, compute_connection
from .eigen import IndefiniteGramError, Spectrum, solve_generalized
from .moments import MomentTable, compute_moments, gram_coefficient, shift_moment
from .oracle import numerov_solve, qes_ground_profile, reference_suite
from .pipeline import Solution, solve_potential
from .scaling import DyadicSamples, RefinementMask, build_mask, eval_phi_dyadic
from .wavefunction import SampledWavefunction, deviation, reconstruct

__version__ = "0.1.0"

__all__ = [
    "ConnectionTable",
    "DyadicSamples",
    "IndefiniteGramError",
    "MomentTable",
    "PolynomialPotential",
    "RefinementMask",
    "SampledWavefunction",
    "Solution",
    "Spectrum",
    "TableBundle",
    "assemble",
    "build_mask",
    "compute_connection",
    "compute_moments",
    "deviation",
    "eval_phi_dyadic",
    "get_tables",
    "gram_coefficient",
    "load",
    "make_discretization",
    "numerov_solve",
    "qes_ground_profile",
    "reconstruct",
    "reference_suite",
    "shift_moment",
    "solve_potential",
    "store",
]

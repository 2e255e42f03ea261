import numpy as np
import pytest

from ddgalerkin.assembly import PolynomialPotential
from ddgalerkin.oracle import (
    OracleError,
    fd_eigenfunction,
    numerov_solve,
    qes_ground_profile,
    reference_suite,
)

from _shared import solve

HARMONIC = PolynomialPotential({2: 1.0})


def test_harmonic_spectrum_within_estimate():
    fd = numerov_solve(HARMONIC, (-10, 10), 2000, 6)
    exact = 2 * np.arange(6) + 1.0
    assert np.all(np.abs(fd.eigenvalues - exact) <= fd.error_estimate)
    assert np.all(fd.error_estimate < 1e-7)


def test_richardson_improves_on_raw_levels():
    fd = numerov_solve(HARMONIC, (-10, 10), 1000, 3)
    exact = 2 * np.arange(3) + 1.0
    raw_err = np.abs(fd.raw[2] - exact)
    assert np.all(np.abs(fd.eigenvalues - exact) < 1e-3 * raw_err)


def test_sextic_exact_ground_state():
    fd = numerov_solve(PolynomialPotential.sextic(1, -4, 1), n_points=4000)
    assert abs(fd.eigenvalues[0] + 2) < max(1e-8, fd.error_estimate[0])


def test_needs_enough_points():
    with pytest.raises(ValueError):
        numerov_solve(HARMONIC, n_points=999)


def test_fd_eigenfunction_shape_and_norm():
    x, psi = fd_eigenfunction(HARMONIC, 1, (-8, 8), 1600)
    assert len(x) == len(psi) == 1599
    assert np.sum(psi**2) * 0.01 == pytest.approx(1, abs=1e-6)
    exact = x * np.exp(-x * x / 2)
    exact /= np.sqrt(np.sum(exact**2) * 0.01)
    assert np.abs(np.abs(psi) - np.abs(exact)).max() < 1e-6


def test_qes_profile():
    x = np.arange(-600, 601) / 100
    psi = qes_ground_profile(1, 1, x)
    assert psi[600] == 1.0
    np.testing.assert_array_equal(psi, psi[::-1])
    assert np.all(psi > 0)
    # b = -4, c = 1 gives a = 1 and E = -2
    qes_ground_profile(-4, 1, x)


def test_qes_profile_self_certifies():
    x = np.linspace(-4, 4, 801)
    with pytest.raises(OracleError, match="residual"):
        qes_ground_profile(1, 1, x, energy=0.5 + 1e-4)
    with pytest.raises(ValueError):
        qes_ground_profile(1, -1, x)


def test_reference_suite_contents():
    cases = reference_suite()
    assert all(np.isfinite(c.reference_energy) for c in cases)
    assert all(c.label.startswith(f"{c.group}_") for c in cases)
    assert len(reference_suite("sextic", "scm")) == 10
    assert len(reference_suite("sextic", "galerkin_j7")) == 10
    assert len(reference_suite("decatic", "galerkin_j7")) == 10
    assert len(reference_suite("decatic", "scm_band")) == 10
    assert len(reference_suite("qes_alpha", "exact")) == 3
    assert len(reference_suite("qes_exact", "exact")) == 2
    for j in (3, 5, 7):
        assert len(reference_suite("qes_alpha", f"galerkin_j{j}")) == 9

    row5 = next(c for c in reference_suite("sextic", "scm") if c.row == 5)
    assert row5.potential == PolynomialPotential.sextic(10, 10, 10)
    assert row5.reference_energy == 3.8948206179865981
    row10 = next(c for c in reference_suite("decatic", "galerkin_j7") if c.row == 10)
    assert row10.potential == PolynomialPotential.decatic(-10, -10, -10, -10, 10)
    assert row10.reference_energy == -22.446238128183488
    a7 = next(c for c in reference_suite("qes_alpha", "exact") if "_a7_" in c.label)
    assert (a7.state, a7.reference_energy) == (2, 4.5)


# gross-error check: the FD oracle is far less accurate than the Galerkin solver
@pytest.mark.slow
@pytest.mark.parametrize(
    "case",
    reference_suite("sextic", "scm") + reference_suite("decatic", "galerkin_j7"),
    ids=lambda c: c.label,
)
def test_fd_agrees_with_galerkin(case):
    fd = numerov_solve(case.potential, n_points=4000)
    E = solve(case.potential).energies[0]
    assert abs(fd.eigenvalues[0] - E) <= max(1e-7, fd.error_estimate[0])

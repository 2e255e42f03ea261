import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddgalerkin.assembly import PolynomialPotential, SpectralProblem, assemble, make_discretization
from ddgalerkin.eigen import (
    IndefiniteGramError,
    b_orthonormality_error,
    cholesky_lower,
    sign_fix,
    solve_generalized,
)

from _shared import tables


def problem(pot, j=3):
    b = tables()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return assemble(pot, make_discretization(j), b.connection, b.moments)


SEXTIC = PolynomialPotential.sextic(1, 1, 1)


def test_sorted_with_residuals():
    P = problem(SEXTIC, 4)
    sp = solve_generalized(P, 6)
    assert np.all(np.diff(sp.eigenvalues) > 0)
    normA = np.abs(P.A).max()
    assert np.all(sp.residuals <= 1e-8 * (1 + np.abs(sp.eigenvalues)) * normA)
    assert b_orthonormality_error(sp, P.B) < 1e-10
    np.testing.assert_allclose(sp.norms, 1, atol=1e-12)


def test_j3_ground_state():
    # the j = 3 entry for V = x^2 + x^4 + x^6 agrees with the converged value to ~1e-6
    E = solve_generalized(problem(SEXTIC, 3)).eigenvalues[0]
    assert E == pytest.approx(1.6148940820, abs=2e-6)


def test_refinement_does_not_move_converged_values():
    P = problem(SEXTIC, 5)
    a = solve_generalized(P, 4, refine=True).eigenvalues
    b = solve_generalized(P, 4, refine=False).eigenvalues
    np.testing.assert_allclose(a, b, rtol=1e-10)


def test_identity_pencil():
    P = problem(SEXTIC, 2)
    Q = SpectralProblem(P.B.copy(), P.B, P.disc)
    sp = solve_generalized(Q, 5)
    np.testing.assert_allclose(sp.eigenvalues, 1.0, atol=1e-12)
    assert b_orthonormality_error(sp, Q.B) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_permutation_invariance(seed):
    P = problem(SEXTIC, 2)
    perm = np.random.default_rng(seed).permutation(P.dimension)
    Q = SpectralProblem(P.A[np.ix_(perm, perm)], P.B[np.ix_(perm, perm)], P.disc)
    a = solve_generalized(SpectralProblem(P.A, P.B, P.disc), 4, refine=False).eigenvalues
    b = solve_generalized(Q, 4, refine=False).eigenvalues
    np.testing.assert_allclose(b, a, rtol=1e-10)


@settings(max_examples=8, deadline=None)
@given(st.floats(-50, 50, allow_nan=False))
def test_constant_shift(c0):
    a = solve_generalized(problem(SEXTIC, 3), 3).eigenvalues
    b = solve_generalized(problem(SEXTIC.shifted(c0), 3), 3).eigenvalues
    np.testing.assert_allclose(b - a, c0, atol=1e-10 * max(1.0, abs(c0)))


def test_particle_in_box_trend():
    R = 6
    free = PolynomialPotential({})
    levels = [solve_generalized(problem(free, j), 3, refine=False).eigenvalues for j in (2, 3, 4, 5)]
    exact = (np.pi * np.arange(1, 4) / (2 * R)) ** 2
    for coarse, fine in zip(levels, levels[1:]):
        assert np.all(fine <= coarse + 1e-12)
    assert np.all(levels[-1] >= exact - 1e-9)


def test_indefinite_gram_reports_pivot():
    B = np.eye(5)
    B[3, 3] = -1.0
    with pytest.raises(IndefiniteGramError) as err:
        cholesky_lower(B)
    assert err.value.pivot == 4
    P = problem(SEXTIC, 0)
    with pytest.raises(np.linalg.LinAlgError):
        solve_generalized(SpectralProblem(P.A, -P.B, P.disc))


@pytest.mark.parametrize("n", [0, 10**6])
def test_state_count_checked(n):
    with pytest.raises(ValueError):
        solve_generalized(problem(SEXTIC, 0), n)


def test_sign_fix():
    v = np.array([0.0, -1.0, -3.0, -1.0, 0.0])
    assert np.array_equal(sign_fix(v), -v)
    w = np.array([0.0, 1.0, 0.0, -2.0, 0.0])
    # first extremum right of the centre is the -2 lobe
    assert np.array_equal(sign_fix(w), -w)
    assert np.array_equal(sign_fix(-w), -w)

from fractions import Fraction

import numpy as np
import pytest

from ddgalerkin.connection import (
    ConnectionError_,
    compute_connection,
    connection_residual,
    stiffness_window,
)
from ddgalerkin.scaling import SUPPORTED_ORDERS, RefinementMask, build_mask

F = Fraction


def hat_connection_by_integration():
    # hat function: Phi'' = delta(x+1) - 2 delta(x) + delta(x-1), so
    # <Phi''(. - k'), Phi(. - k)> reads off Phi at k' - k + {-1, 0, 1}
    hat = {0: F(1)}
    return {k: hat.get(k - 1, 0) - 2 * hat.get(k, 0) + hat.get(k + 1, 0) for k in range(-1, 2)}


def test_n4_values_exact():
    L = compute_connection(build_mask(4))
    assert L.exact
    assert L.L == {
        -5: 0, -4: 0, -3: F(-1, 72), -2: 0, -1: F(9, 8), 0: F(-20, 9),
        1: F(9, 8), 2: 0, 3: F(-1, 72), 4: 0, 5: 0,
    }


def test_n2_matches_hat_integration():
    L = compute_connection(build_mask(2))
    assert hat_connection_by_integration() == {-1: 1, 0: -2, 1: 1}
    assert {k: L[k] for k in (-1, 0, 1)} == hat_connection_by_integration()


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_sums(N):
    L = compute_connection(build_mask(N))
    ks = range(-L.half_width, L.half_width + 1)
    assert sum(L[k] for k in ks) == 0
    assert sum(k * k * L[k] for k in ks) == 2
    assert all(L[k] == L[-k] for k in ks)
    assert L[2 * N - 2] == L[100] == 0


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_refinement_residual(N):
    a = build_mask(N)
    assert np.abs(connection_residual(a, compute_connection(a))).max() < 1e-13
    assert np.abs(connection_residual(a, compute_connection(a, exact=False))).max() < 1e-13


@pytest.mark.parametrize("N", [4, 6])
def test_float_path_agrees(N):
    a = build_mask(N)
    exact = compute_connection(a).as_float()
    approx = compute_connection(a, exact=False).as_float()
    np.testing.assert_allclose(approx, exact, atol=1e-12)


@pytest.mark.parametrize("size", [1, 5, 20, 64])
def test_stiffness_negative_semidefinite(size):
    S = stiffness_window(compute_connection(build_mask(4)), size)
    assert np.array_equal(S, S.T)
    assert np.linalg.eigvalsh(-S).min() > -1e-10


def test_rejects_degenerate_mask():
    bogus = RefinementMask(4, {k: F(0) for k in range(-3, 4)})
    with pytest.raises(ConnectionError_):
        compute_connection(bogus)

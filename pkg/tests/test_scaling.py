from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ddgalerkin.scaling import SUPPORTED_ORDERS, build_mask, eval_phi_dyadic, lagrange_at_half

F = Fraction


def test_mask_n4_values():
    a = build_mask(4)
    assert a.coeffs == {-3: F(-1, 16), -2: 0, -1: F(9, 16), 0: 1, 1: F(9, 16), 2: 0, 3: F(-1, 16)}


def test_mask_n2_is_hat():
    # l_0(1/2) = l_1(1/2) = 1/2 on nodes {0, 1}
    assert lagrange_at_half([0, 1], 0) == lagrange_at_half([0, 1], 1) == F(1, 2)
    a = build_mask(2)
    assert (a[-1], a[0], a[1]) == (F(1, 2), 1, F(1, 2))


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_mask_invariants(N):
    a = build_mask(N)
    assert sum(a.coeffs.values()) == 2
    assert a[0] == 1
    for k in a.ks:
        assert a[k] == a[-k]
        if k and k % 2 == 0:
            assert a[k] == 0
    assert all(isinstance(v, Fraction) for v in a.coeffs.values())


@pytest.mark.parametrize("N", [0, 3, -2, 5, 4.0, "4", True])
def test_mask_rejects_bad_order(N):
    with pytest.raises(ValueError):
        build_mask(N)


def test_dyadic_examples():
    phi = eval_phi_dyadic(build_mask(4), 3)
    assert phi.at(0) == 1
    for n in (1, 2, 3):
        assert phi.at(n) == phi.at(-n) == 0
    assert phi.at(F(1, 2)) == F(9, 16)
    assert phi.at(F(3, 2)) == phi.at(F(-3, 2)) == F(-1, 16)
    assert phi.at(5) == 0  # outside support
    with pytest.raises(ValueError):
        phi.at(F(1, 16))


def test_depth_zero_is_kronecker():
    phi = eval_phi_dyadic(build_mask(4), 0)
    np.testing.assert_array_equal(phi.values, [0, 0, 0, 1, 0, 0, 0])
    with pytest.raises(ValueError):
        eval_phi_dyadic(build_mask(4), -1)


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_refinement_self_consistency_exact(N):
    a = build_mask(N)
    d = 5
    phi = eval_phi_dyadic(a, d)
    for n in range(-((N - 1) << d), ((N - 1) << d) + 1):
        x = F(n, 1 << d)
        rhs = sum(a[k] * phi.at(2 * x - k) for k in a.ks if a[k])
        assert phi.exact(n) == rhs


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_reflection_exact(N):
    phi = eval_phi_dyadic(build_mask(N), 6)
    num = phi.numerators
    assert list(num) == list(num[::-1])


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_partition_of_unity(N):
    d = 8
    phi = eval_phi_dyadic(build_mask(N), d)
    step = 1 << d
    for r in range(step):
        # all integer translates of x = r / 2^d
        total = sum(phi.values[r::step])
        assert abs(total - 1.0) < 1e-14


@pytest.mark.parametrize("N", SUPPORTED_ORDERS)
def test_polynomial_reproduction(N):
    d = 7
    phi = eval_phi_dyadic(build_mask(N), d)
    x = np.arange(-(1 << d), (1 << d) + 1) / (1 << d)  # [-1, 1]
    for r in range(N):
        rec = np.zeros_like(x)
        for k in range(-N - 1, N + 2):
            rec += float(k) ** r * phi(x - k)
        np.testing.assert_allclose(rec, x**r, rtol=0, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 4, 6]), st.integers(0, 6), st.data())
def test_coarse_samples_nest_in_fine(N, d, data):
    coarse = eval_phi_dyadic(build_mask(N), d)
    fine = eval_phi_dyadic(build_mask(N), d + 1)
    n = data.draw(st.integers(-((N - 1) << d), (N - 1) << d))
    assert coarse.exact(n) == fine.exact(2 * n)


def test_float_lookup_matches_exact():
    phi = eval_phi_dyadic(build_mask(4), 4)
    x = np.array([-3.0, -0.5, 0.0, 0.25, 1.5, 7.0])
    expect = [float(phi.at(F(v).limit_denominator(16))) for v in x]
    np.testing.assert_array_equal(phi(x), expect)

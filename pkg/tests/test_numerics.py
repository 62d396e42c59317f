import numpy as np
import pytest

from dista import (EstimationError, ParameterError, ShapeError, frobenius_norm, gradient_step,
                   l1_norm, l2_norm, operator_norm, sgn, soft_threshold)
from oracles import gradient_step_loops, spectral_norm_jacobi

# frozen from the loop oracle on the seeded instances below
GRAD_FROZEN = [0.6116679139308335, -1.5656709930796122, -0.46133347484205456,
               -1.2611827851968436, -1.0697827059843046]
JACOBI_FROZEN = 3.800407963684839


def test_soft_threshold_examples():
    np.testing.assert_array_equal(soft_threshold([2, -0.5, -3], 1), [1, 0, -2])
    np.testing.assert_array_equal(soft_threshold([1, -1], 1), [0, 0])
    x = np.random.default_rng(0).standard_normal(20)
    np.testing.assert_array_equal(soft_threshold(x, 0), x)


def test_soft_threshold_matrix_and_negative_alpha():
    M = np.array([[3.0, -0.2], [0.0, -4.0]])
    np.testing.assert_array_equal(soft_threshold(M, 1.0), [[2.0, 0.0], [0.0, -3.0]])
    with pytest.raises(ParameterError):
        soft_threshold([1.0], -0.1)


def test_sgn():
    assert sgn(3.2) == 1
    assert sgn(0) == 0
    assert sgn(-7) == -1
    np.testing.assert_array_equal(sgn([-2.0, 0.0, 5.0]), [-1, 0, 1])


def test_gradient_step_zero_residual_and_identity():
    rng = np.random.default_rng(1)
    A = rng.standard_normal((3, 6))
    x = rng.standard_normal(6)
    np.testing.assert_array_equal(gradient_step(x, A, A @ x, 0.3), x)
    np.testing.assert_allclose(gradient_step(x[:3], np.eye(3), np.zeros(3), 1.0), 0, atol=0)


def test_gradient_step_small_tau_limit():
    rng = np.random.default_rng(2)
    A, x, y = rng.standard_normal((4, 5)), rng.standard_normal(5), rng.standard_normal(4)
    np.testing.assert_allclose(gradient_step(x, A, y, 1e-14), x, atol=1e-12)


def test_gradient_step_matches_loop_oracle():
    rng = np.random.default_rng(7)
    A, x, y = rng.standard_normal((3, 5)), rng.standard_normal(5), rng.standard_normal(3)
    ref = gradient_step_loops(x.tolist(), A.tolist(), y.tolist(), 0.1)
    np.testing.assert_allclose(ref, GRAD_FROZEN, rtol=1e-14)
    np.testing.assert_allclose(gradient_step(x, A, y, 0.1), ref, rtol=1e-13)


def test_gradient_step_errors():
    with pytest.raises(ShapeError):
        gradient_step(np.zeros(3), np.zeros((2, 4)), np.zeros(2), 0.1)
    with pytest.raises(ParameterError):
        gradient_step(np.zeros(4), np.zeros((2, 4)), np.zeros(2), 0.0)


def test_operator_norm_simple():
    assert operator_norm(np.eye(3)) == pytest.approx(1.0, rel=1e-12)
    assert operator_norm(np.diag([3.0, 1.0])) == pytest.approx(3.0, rel=1e-10)


def test_operator_norm_matches_jacobi_oracle():
    A = np.random.default_rng(11).standard_normal((5, 10))
    ref = spectral_norm_jacobi(A)
    assert ref == pytest.approx(JACOBI_FROZEN, rel=1e-13)
    assert operator_norm(A) == pytest.approx(ref, rel=1e-8)


def test_operator_norm_transpose():
    rng = np.random.default_rng(4)
    for _ in range(10):
        A = rng.standard_normal((6, 15))
        assert operator_norm(A) == pytest.approx(operator_norm(A.T), rel=1e-8)


def test_operator_norm_degenerate_start():
    # all-ones vector is in the null space of A
    A = np.array([[1.0, -1.0, 0.0], [0.0, 1.0, -1.0]])
    assert operator_norm(A) == pytest.approx(np.linalg.norm(A, 2), rel=1e-8)
    with pytest.raises(ParameterError):
        operator_norm(np.zeros((2, 2)))


def test_operator_norm_budget_exhausted():
    A = np.random.default_rng(5).standard_normal((30, 30))
    with pytest.raises(EstimationError) as info:
        operator_norm(A, tol=1e-15, max_iter=2)
    assert info.value.estimate > 0


def test_norms():
    assert frobenius_norm(np.array([[3.0, 4.0]])) == 5.0
    assert l1_norm([1, -2, 2]) == 5.0
    assert l2_norm([1, -2, 2]) == 3.0
    M = np.random.default_rng(6).standard_normal((7, 4))
    cols = sum(l2_norm(M[:, j]) ** 2 for j in range(4))
    assert frobenius_norm(M) == pytest.approx(np.sqrt(cols), rel=1e-14)


def test_non_finite_rejected():
    with pytest.raises(ParameterError):
        operator_norm(np.array([[np.nan, 1.0]]))

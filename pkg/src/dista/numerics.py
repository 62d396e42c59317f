"""Dense vector/matrix primitives shared by every solver.

All routines work on float64 numpy arrays and are pure functions.
"""

import numpy as np

from .errors import EstimationError, ParameterError, ShapeError


def as_vector(x, name="x"):
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise ShapeError(f"{name} must be one-dimensional, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ParameterError(f"{name} contains non-finite entries")
    return v


def as_matrix(a, name="A"):
    m = np.asarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be two-dimensional, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ParameterError(f"{name} contains non-finite entries")
    return m


def sgn(x):
    """Sign with sgn(0) = 0. Works on scalars and arrays (elementwise)."""
    if np.ndim(x) == 0:
        x = float(x)
        return 1 if x > 0 else (-1 if x < 0 else 0)
    return np.sign(np.asarray(x, dtype=np.float64))


def soft_threshold(x, alpha):
    r"""Soft thresholding :math:`\eta_\alpha`, applied elementwise.

    Entries with ``|x_i| > alpha`` are shrunk toward zero by ``alpha``;
    all others (including ``|x_i| == alpha``) are set to zero. This is the
    proximal map of ``alpha * ||.||_1``.

    Parameters
    ----------
    x : array_like
        Input vector or matrix.
    alpha : float
        Non-negative threshold.

    Returns
    -------
    ndarray
        Thresholded array with the shape of ``x``.
    """
    if alpha < 0:
        raise ParameterError(f"threshold must be non-negative, got {alpha}")
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.maximum(np.abs(x) - alpha, 0.0)


def gradient_step(x, A, y, tau):
    """Return ``x + tau * A.T @ (y - A @ x)``."""
    if tau <= 0:
        raise ParameterError(f"stepsize must be positive, got {tau}")
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if A.ndim != 2 or x.shape != (A.shape[1],) or y.shape != (A.shape[0],):
        raise ShapeError(
            f"inconsistent shapes: A {A.shape}, x {x.shape}, y {y.shape}")
    return x + tau * (A.T @ (y - A @ x))


def l1_norm(x):
    return float(np.sum(np.abs(x)))


def l2_norm(x):
    return float(np.sqrt(np.sum(np.square(x))))


def frobenius_norm(M):
    return float(np.sqrt(np.sum(np.square(M))))


def operator_norm(A, tol=1e-10, max_iter=5000):
    """Largest singular value of ``A`` by power iteration on ``A.T @ A``.

    The start vector is the normalized all-ones vector, so the estimate is
    reproducible. Iteration stops when the relative change of the estimate
    drops below ``tol``.

    Raises
    ------
    EstimationError
        If ``max_iter`` iterations pass without meeting ``tol``. The last
        estimate is attached as ``err.estimate``.
    """
    A = as_matrix(A)
    if tol <= 0 or max_iter < 1:
        raise ParameterError("tol and max_iter must be positive")
    n = A.shape[1]
    v = np.ones(n) / np.sqrt(n)
    w = A.T @ (A @ v)
    if not np.any(w):
        # all-ones lies in the null space of A; use a fixed non-symmetric start
        v = np.cos(np.arange(1, n + 1, dtype=np.float64))
        v /= np.linalg.norm(v)
        w = A.T @ (A @ v)
        if not np.any(w):
            if not np.any(A):
                raise ParameterError("operator_norm requires a nonzero matrix")
            raise EstimationError("power iteration start vectors are in the null space", 0.0)
    sigma = np.sqrt(np.linalg.norm(w))
    for _ in range(max_iter):
        v = w / np.linalg.norm(w)
        w = A.T @ (A @ v)
        sigma_new = np.sqrt(np.linalg.norm(w))
        if abs(sigma_new - sigma) <= tol * sigma_new:
            return float(sigma_new)
        sigma = sigma_new
    raise EstimationError(
        f"power iteration did not reach tol={tol} in {max_iter} iterations",
        float(sigma))

"""Objective functionals: centralized Lasso, the distributed functional,
its majorizing surrogate, and a Lasso optimality residual."""

from dataclasses import dataclass

import numpy as np

from .data import check_estimates, signal_length
from .errors import ParameterError, ShapeError
from .graph import apply_consensus
from .numerics import as_vector


@dataclass(frozen=True)
class LassoParams:
    lam: float
    tau: float

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lambda must be positive, got {self.lam}")
        if not self.tau > 0:
            raise ParameterError(f"tau must be positive, got {self.tau}")


@dataclass(frozen=True)
class DistaParams:
    """Temperature ``q``, threshold ``alpha`` and stepsize(s) ``tau``.

    ``tau`` is either one value shared by all nodes or a sequence with one
    entry per node.
    """
    q: float = 0.5
    alpha: float = 1e-4
    tau: float | tuple = 0.02

    def __post_init__(self):
        if not 0 < self.q <= 1:
            raise ParameterError(f"q must lie in (0, 1], got {self.q}")
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if np.ndim(self.tau):
            object.__setattr__(self, "tau", tuple(float(t) for t in self.tau))
        if np.any(np.asarray(self.tau) <= 0):
            raise ParameterError("every stepsize tau_v must be positive")

    def taus(self, node_count):
        t = np.asarray(self.tau, dtype=np.float64)
        if t.ndim == 0:
            return np.full(node_count, float(t))
        if t.shape != (node_count,):
            raise ShapeError(f"got {t.size} stepsizes for {node_count} nodes")
        return t

    def uniform_tau(self):
        return np.ndim(self.tau) == 0 or len(set(self.tau)) == 1


def _residuals(X, data):
    return [d.y - d.A @ X[:, v] for v, d in enumerate(data)]


def lasso_objective(x, data, p):
    """sum_v ||y_v - A_v x||^2 + (2 lam / tau) ||x||_1."""
    x = as_vector(x)
    if x.shape[0] != signal_length(data):
        raise ShapeError(f"x has length {x.shape[0]}, data expects {signal_length(data)}")
    fit = sum(float(np.sum((d.y - d.A @ x) ** 2)) for d in data)
    return fit + 2.0 * p.lam / p.tau * float(np.sum(np.abs(x)))


def _pairwise_sq(U, X):
    # D[v, w] = ||u_w - x_v||^2, evaluated directly (not via Gram expansion)
    return np.sum((U[:, None, :] - X[:, :, None]) ** 2, axis=0)


def dista_functional(X, data, P, p):
    r"""Distributed functional minimized by DISTA.

    .. math::

        \sum_v q\|y_v - A_v x_v\|^2 + \frac{2\alpha}{\tau_v}\|x_v\|_1
            + \frac{1-q}{\tau_v}\sum_w P_{vw}\|\bar x_w - x_v\|^2,
        \qquad \bar X = X P^T

    The l1 weight ``2 alpha / tau_v`` is the one whose proximal step is
    soft thresholding at ``alpha``, which is what :func:`dista_gamma`
    applies. With this weight ``F(x, ..., x) = q * J(x, lam)`` holds for
    ``alpha = q * lam / |V|``.
    """
    X = check_estimates(X, data)
    N = len(data)
    W = P.weights
    if W.shape != (N, N):
        raise ShapeError(f"consensus matrix is {W.shape}, data has {N} nodes")
    tau = p.taus(N)
    Xbar = apply_consensus(X, W)
    fit = np.array([np.sum(r ** 2) for r in _residuals(X, data)])
    l1 = np.sum(np.abs(X), axis=0)
    cons = np.sum(W * _pairwise_sq(Xbar, X), axis=1)
    return float(np.sum(p.q * fit + 2.0 * p.alpha / tau * l1 + (1.0 - p.q) / tau * cons))


def surrogate_functional(X, C, B, data, P, p):
    """Majorizing surrogate of :func:`dista_functional`.

    Coincides with it at ``C = X @ P.T, B = X`` and upper-bounds it
    whenever every ``tau_v * ||A_v||^2 <= 1`` and the stepsizes are uniform.
    Neighbor weights are taken from ``P`` (``1/d`` on a uniform d-regular graph).
    """
    X = check_estimates(X, data)
    C = check_estimates(C, data)
    B = check_estimates(B, data)
    N = len(data)
    W = P.weights
    tau = p.taus(N)
    q = p.q
    total = 0.0
    D = _pairwise_sq(C, X)
    for v, d in enumerate(data):
        x, b = X[:, v], B[:, v]
        total += (q * np.sum((d.A @ x - d.y) ** 2)
                  + 2.0 * p.alpha / tau[v] * np.sum(np.abs(x))
                  + (1.0 - q) / tau[v] * np.dot(W[v], D[v])
                  + q / tau[v] * np.sum((x - b) ** 2)
                  - q * np.sum((d.A @ (x - b)) ** 2))
    return float(total)


def kkt_residual(x, data, p):
    """Violation of the Lasso optimality conditions at ``x``.

    With ``g = tau * sum_v A_v^T (y_v - A_v x)`` the result is the largest of
    ``|g_i - lam * sgn(x_i)|`` over the support and ``max(0, |g_i| - lam)``
    off it. Zero exactly at minimizers of :func:`lasso_objective`.
    """
    x = as_vector(x)
    g = p.tau * sum(d.A.T @ (d.y - d.A @ x) for d in data)
    on = x != 0
    res = np.where(on, np.abs(g - p.lam * np.sign(x)), np.maximum(0.0, np.abs(g) - p.lam))
    return float(np.max(res)) if res.size else 0.0

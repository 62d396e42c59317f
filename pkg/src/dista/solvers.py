"""Sparse recovery solvers: centralized ISTA, DISTA, DSM and consensus ADMM.

Every solver starts from the all-zero estimate and returns a
:class:`SolverReport`. Estimates are stored as an ``n x |V|`` matrix whose
column v belongs to node v.
"""

import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .data import SensorData, check_estimates, signal_length
from .errors import DivergenceError, ParameterError, ShapeError, StepsizeError
from .graph import ConsensusMatrix, apply_consensus
from .numerics import as_matrix, as_vector, gradient_step, operator_norm, soft_threshold
from .objectives import DistaParams, LassoParams, lasso_objective

logger = logging.getLogger(__name__)

__all__ = [
    "SensorData", "TerminationCriteria", "SolverReport", "StepsizeViolation",
    "validate_stepsizes", "ista_run", "dista_gamma", "dista_run", "dsm_run",
    "admm_run", "memory_footprint", "max_signal_length",
]

# allowed growth of the functional per iteration before a run is declared divergent
_DESCENT_SLACK = 1e-6


@dataclass(frozen=True)
class TerminationCriteria:
    """Stop when ``||X(t+1) - X(t)||_F / sqrt(n |V|) < eps`` or after ``max_iter``."""
    eps: float = 1e-8
    max_iter: int = 50_000

    def __post_init__(self):
        if not self.eps > 0:
            raise ParameterError(f"eps must be positive, got {self.eps}")
        if self.max_iter < 1:
            raise ParameterError(f"max_iter must be >= 1, got {self.max_iter}")


@dataclass
class SolverReport:
    solver: str
    X: np.ndarray
    iterations: int
    reason: str  # "converged" or "max_iter"
    objective: np.ndarray  # one entry per iteration, evaluated after the update
    step_norms: np.ndarray  # normalized step norms, one per iteration
    residual: float  # ||T(X*) - X*||_F for the solver's iteration map T
    wall_time: float
    extras: dict = field(default_factory=dict)

    @property
    def converged(self):
        return self.reason == "converged"

    @property
    def x_mean(self):
        return self.X.mean(axis=1)


class StepsizeViolation(NamedTuple):
    node: int
    tau: float
    norm_sq: float  # ||A_v||_2^2

    @property
    def product(self):
        return self.tau * self.norm_sq


def validate_stepsizes(data, taus):
    """Check ``tau_v * ||A_v||_2^2 < 1`` for every node.

    ``taus`` is a scalar, a per-node sequence, or :class:`DistaParams`.
    Returns the list of violations; an empty list means all nodes pass.
    """
    if isinstance(taus, DistaParams):
        taus = taus.taus(len(data))
    taus = np.broadcast_to(np.asarray(taus, dtype=np.float64), (len(data),))
    out = []
    for v, d in enumerate(data):
        s2 = operator_norm(d.A) ** 2
        if not taus[v] * s2 < 1.0:
            out.append(StepsizeViolation(v, float(taus[v]), s2))
    return out


def _step(new, old):
    return float(np.linalg.norm(new - old) / math.sqrt(new.size))


def _finish(solver, X, t, reason, obj, steps, residual, t0, **extras):
    return SolverReport(solver, X, t, reason, np.asarray(obj), np.asarray(steps),
                        float(residual), time.perf_counter() - t0, extras)


def ista_run(A, y, p, term=TerminationCriteria(), check_stepsizes=True):
    """Centralized iterative soft thresholding on the stacked system ``(A, y)``.

    Iterates ``x <- eta_lam(x + tau A^T (y - A x))`` from ``x = 0``. The
    objective trace holds ``J(x(t), lam)``. The returned ``X`` has a single
    column.
    """
    A = as_matrix(A)
    y = as_vector(y, "y")
    if y.shape[0] != A.shape[0]:
        raise ShapeError(f"A is {A.shape} but y has length {y.shape[0]}")
    data = [SensorData(A, y)]
    if check_stepsizes:
        bad = validate_stepsizes(data, p.tau)
        if bad:
            raise StepsizeError(bad)
    t0 = time.perf_counter()
    x = np.zeros(A.shape[1])
    obj, steps = [], []
    reason = "max_iter"
    for t in range(1, term.max_iter + 1):
        x_new = soft_threshold(gradient_step(x, A, y, p.tau), p.lam)
        steps.append(_step(x_new, x))
        x = x_new
        obj.append(lasso_objective(x, data, p))
        if steps[-1] < term.eps:
            reason = "converged"
            break
    res = np.linalg.norm(soft_threshold(gradient_step(x, A, y, p.tau), p.lam) - x)
    return _finish("ista", x[:, None], t, reason, obj, steps, res, t0)


def _check_network(data, P):
    if not isinstance(P, ConsensusMatrix):
        raise TypeError("P must be a ConsensusMatrix")
    if P.node_count != len(data):
        raise ShapeError(f"consensus matrix has {P.node_count} nodes, data has {len(data)}")
    return signal_length(data)


class _Stacked:
    """Node data packed into 3-D arrays for batched products (equal m only)."""

    def __init__(self, data):
        self.A = np.stack([d.A for d in data])
        self.At = np.ascontiguousarray(self.A.transpose(0, 2, 1))
        self.y = np.stack([d.y for d in data])

    @classmethod
    def maybe(cls, data):
        if len(data) > 1 and len({d.A.shape for d in data}) == 1:
            return cls(data)
        return None

    def residuals(self, X):
        # row v holds y_v - A_v x_v
        return self.y - np.matmul(self.A, X.T[:, :, None])[..., 0]

    def back(self, R):
        # column v holds A_v^T r_v
        return np.matmul(self.At, R[:, :, None])[..., 0].T


def _residuals(X, data, stacked):
    if stacked is not None:
        return stacked.residuals(X)
    return [d.y - d.A @ X[:, v] for v, d in enumerate(data)]


def _gamma(X, R, data, W2, p, tau, stacked):
    if stacked is not None:
        G = X + tau * stacked.back(R)
    else:
        G = np.empty_like(X)
        for v, d in enumerate(data):
            G[:, v] = gradient_step(X[:, v], d.A, d.y, tau[v])
    return soft_threshold((1.0 - p.q) * (X @ W2.T) + p.q * G, p.alpha)


def _functional(X, R, W, p, tau):
    # Gram expansion of sum_w P[v,w] ||xbar_w - x_v||^2; agrees with the direct
    # evaluation in dista_functional to rounding
    fit = np.array([np.dot(r, r) for r in R])
    Xbar = X @ W.T
    sq = np.sum(X * X, axis=0)
    sqbar = np.sum(Xbar * Xbar, axis=0)
    cross = np.sum(W * (X.T @ Xbar), axis=1)
    cons = np.maximum(W @ sqbar + W.sum(axis=1) * sq - 2.0 * cross, 0.0)
    l1 = np.sum(np.abs(X), axis=0)
    return float(np.sum(p.q * fit + 2.0 * p.alpha / tau * l1 + (1.0 - p.q) / tau * cons))


def dista_gamma(X, data, P, p):
    r"""One application of the DISTA map.

    Column v of the result is

    .. math::

        \eta_\alpha\big[(1-q)(\bar X P^T)_v
            + q\,(x_v + \tau_v A_v^T(y_v - A_v x_v))\big],
        \qquad \bar X = X P^T,

    so the consensus term averages twice, once for each half-step of the
    synchronous protocol.
    """
    _check_network(data, P)
    X = check_estimates(X, data)
    W = P.weights
    return _gamma(X, None, data, W @ W, p, p.taus(len(data)), None)


def dista_run(data, P, p, term=TerminationCriteria(), check_stepsizes=True):
    """Run DISTA from ``X(0) = 0`` until the step norm falls below ``term.eps``.

    One iteration is one application of :func:`dista_gamma`, i.e. an
    averaging half-step followed by a thresholding half-step. The objective
    trace holds :func:`dista_functional` after each iteration.

    Raises
    ------
    StepsizeError
        If some ``tau_v * ||A_v||^2 >= 1`` and ``check_stepsizes`` is set.
    DivergenceError
        If the functional grows on a uniform-weight regular graph with equal
        stepsizes, where descent is guaranteed, or any iterate turns non-finite.
    """
    n = _check_network(data, P)
    bad = validate_stepsizes(data, p)
    if bad and check_stepsizes:
        raise StepsizeError(bad)
    if bad:
        logger.info("running DISTA with stepsize violations at %d node(s)", len(bad))
    regular = P.is_uniform_regular() and p.uniform_tau()
    if not regular:
        warnings.warn("convergence of DISTA is only established for uniform weights "
                      "on regular graphs with equal stepsizes", stacklevel=2)
    guarded = regular and not bad
    t0 = time.perf_counter()
    stacked = _Stacked.maybe(data)
    tau = p.taus(len(data))
    W = P.weights
    W2 = W @ W
    X = np.zeros((n, len(data)))
    R = _residuals(X, data, stacked)
    prev = _functional(X, R, W, p, tau)
    obj, steps = [], []
    reason = "max_iter"
    for t in range(1, term.max_iter + 1):
        X_new = _gamma(X, R, data, W2, p, tau, stacked)
        if not np.all(np.isfinite(X_new)):
            raise DivergenceError(f"non-finite iterate at iteration {t}")
        steps.append(_step(X_new, X))
        X = X_new
        R = _residuals(X, data, stacked)
        f = _functional(X, R, W, p, tau)
        if guarded and f > prev + _DESCENT_SLACK * (1.0 + abs(prev)):
            raise DivergenceError(f"functional increased from {prev} to {f} at iteration {t}")
        obj.append(f)
        prev = f
        if steps[-1] < term.eps:
            reason = "converged"
            break
    res = np.linalg.norm(_gamma(X, R, data, W2, p, tau, stacked) - X)
    return _finish("dista", X, t, reason, obj, steps, res, t0)


def dsm_run(data, P, gamma=1e-3, alpha=1e-4, tau=0.02, term=TerminationCriteria()):
    """Distributed subgradient method with constant stepsize ``gamma``.

    Node v minimizes ``f_v(x) = ||y_v - A_v x||^2 + (2 alpha / (tau |V|)) ||x||_1``
    and updates ``x_v <- sum_w P[v, w] x_w - gamma * g_v`` with ``g_v`` a
    subgradient of ``f_v`` at its current estimate (``sgn(0) = 0``). The sum
    of the local costs is ``J(x, alpha)``; the objective trace records it at
    the node average. No convergence guarantee exists, so hitting
    ``max_iter`` is the normal outcome.
    """
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma}")
    n = _check_network(data, P)
    N = len(data)
    lasso = LassoParams(alpha, tau)
    l1_weight = 2.0 * alpha / (tau * N)
    t0 = time.perf_counter()
    stacked = _Stacked.maybe(data)
    X = np.zeros((n, N))
    G = np.empty_like(X)
    obj, steps = [], []
    reason = "max_iter"
    for t in range(1, term.max_iter + 1):
        if stacked is not None:
            G = -2.0 * stacked.back(stacked.residuals(X)) + l1_weight * np.sign(X)
        else:
            for v, d in enumerate(data):
                G[:, v] = -2.0 * (d.A.T @ (d.y - d.A @ X[:, v])) + l1_weight * np.sign(X[:, v])
        X_new = apply_consensus(X, P) - gamma * G
        if not np.all(np.isfinite(X_new)):
            raise DivergenceError(f"DSM iterate became non-finite at iteration {t}")
        steps.append(_step(X_new, X))
        X = X_new
        xm = X.mean(axis=1)
        if stacked is not None:
            R = stacked.y - stacked.A @ xm
            obj.append(float(np.sum(R * R)) + 2.0 * alpha / tau * float(np.sum(np.abs(xm))))
        else:
            obj.append(lasso_objective(xm, data, lasso))
        if steps[-1] < term.eps:
            reason = "converged"
            break
    if reason != "converged":
        logger.debug("DSM stopped at max_iter=%d with step %.3e", term.max_iter, steps[-1])
    return _finish("dsm", X, t, reason, obj, steps, steps[-1] * math.sqrt(X.size), t0)


def admm_run(data, P, p, rho=1.0, term=TerminationCriteria()):
    """Consensus ADMM for ``min_x J(x, lam)``.

    Each node keeps a local primal ``x_v``, a scaled dual ``u_v`` and a sparse
    consensus copy ``z_v``::

        x_v <- (A_v^T A_v + rho I)^{-1} (A_v^T y_v + rho (z_v - u_v))
        z_v <- eta_{lam / (tau |V| rho)}( sum_w P[v, w] (x_w + u_w) )
        u_v <- u_v + x_v - z_v

    The inverses are formed once before iterating. On the complete graph
    all ``z_v`` coincide and this is the textbook global-consensus Lasso
    ADMM; on sparser graphs the neighborhood average makes it approximate.
    The returned estimates are the ``z_v``.
    """
    if not rho > 0:
        raise ParameterError(f"rho must be positive, got {rho}")
    n = _check_network(data, P)
    N = len(data)
    t0 = time.perf_counter()
    inv = [np.linalg.inv(d.A.T @ d.A + rho * np.eye(n)) for d in data]
    Aty = [d.A.T @ d.y for d in data]
    thr = p.lam / (p.tau * N * rho)
    X = np.zeros((n, N))
    Z = np.zeros((n, N))
    U = np.zeros((n, N))
    obj, steps = [], []
    reason = "max_iter"
    for t in range(1, term.max_iter + 1):
        for v in range(N):
            X[:, v] = inv[v] @ (Aty[v] + rho * (Z[:, v] - U[:, v]))
        Z_new = soft_threshold(apply_consensus(X + U, P), thr)
        U += X - Z_new
        if not np.all(np.isfinite(Z_new)):
            raise DivergenceError(f"ADMM iterate became non-finite at iteration {t}")
        step = max(_step(Z_new, Z), _step(X, Z_new))
        steps.append(step)
        Z = Z_new
        obj.append(lasso_objective(Z.mean(axis=1), data, p))
        if step < term.eps:
            reason = "converged"
            break
    return _finish("admm", Z.copy(), t, reason, obj, steps, steps[-1] * math.sqrt(Z.size), t0,
                   primal=X.copy(), dual=U.copy())


def memory_footprint(kind, n, m):
    """Number of real values a node stores to run solver ``kind``.

    DISTA keeps q, alpha, tau_v, y_v, A_v, x_v and the averaged estimate;
    consensus ADMM additionally holds an n x n inverse.
    """
    if n < 1 or m < 1:
        raise ParameterError("n and m must be positive")
    kind = kind.lower()
    if kind == "dista":
        return 3 + m + m * n + 2 * n
    if kind == "admm":
        return 2 + m + m * n + n * n + 3 * n
    raise ParameterError(f"no memory model for solver {kind!r}")


def max_signal_length(kind, budget, m=1):
    """Largest n whose :func:`memory_footprint` fits in ``budget`` values (0 if none)."""
    lo, hi = 0, 1
    while memory_footprint(kind, hi, m) <= budget:
        lo, hi = hi, hi * 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if memory_footprint(kind, mid, m) <= budget:
            lo = mid
        else:
            hi = mid
    return lo

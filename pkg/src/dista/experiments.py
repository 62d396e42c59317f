"""Synthetic instances, recovery metrics and seeded Monte Carlo campaigns.

Every trial draws its randomness from a ``numpy.random.SeedSequence`` keyed
by the master seed and the trial's identity (cell values and trial index),
never by its position in an execution queue. Results are therefore the
same for any worker count or enumeration order.
"""

import csv
import io
import logging
import math
import os
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .data import SensorData, aggregate
from .errors import DistaError, ParameterError
from .graph import build_topology
from .objectives import DistaParams, LassoParams
from .solvers import TerminationCriteria, admm_run, dista_run, dsm_run, ista_run

logger = logging.getLogger(__name__)

RECOVERY_MSE = 1e-4
SOLVERS = ("dista", "dsm", "admm", "ista")

PHASE_COLUMNS = ("m", "nodes", "trials", "recovery_rate")
SNR_COLUMNS = ("solver", "m", "snr_db", "trials", "mean_mse")
TRACE_COLUMNS = ("iter", "objective", "step_norm")


@dataclass(frozen=True)
class SparseSignal:
    x0: np.ndarray
    support: np.ndarray
    seed: object = None

    @property
    def k(self):
        return self.support.size


@dataclass(frozen=True)
class MetricSet:
    mse: float
    recovered: bool
    snr_realized: float = math.inf
    iterations: int = 0
    error: str = ""


@dataclass(frozen=True)
class TrialConfig:
    """One recovery scenario. ``snr_db=None`` means noise-free measurements."""
    n: int = 150
    k: int = 15
    m: int = 10
    nodes: int = 10
    topology: str = "complete"
    solver: str = "dista"
    q: float = 0.5
    alpha: float = 1e-4
    tau: float = 0.02
    gamma: float = 1e-3
    rho: float = 1.0
    lam: float | None = None  # ADMM/ISTA regularization; defaults to alpha
    snr_db: float | None = None
    eps: float = 1e-8
    max_iter: int = 50_000
    zero_measurements: bool = False
    enforce_stepsize: bool = True  # refuse DISTA runs with tau * ||A_v||^2 >= 1

    def __post_init__(self):
        if self.k > self.n or self.k < 0:
            raise ParameterError(f"need 0 <= k <= n, got k={self.k}, n={self.n}")
        if self.m < 1 or self.nodes < 1 or self.n < 1:
            raise ParameterError("n, m and nodes must be positive")
        if self.solver not in SOLVERS:
            raise ParameterError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        DistaParams(self.q, self.alpha, self.tau)
        if self.lam is not None:
            LassoParams(self.lam, self.tau)
        if not (self.gamma > 0 and self.rho > 0):
            raise ParameterError("gamma and rho must be positive")
        TerminationCriteria(self.eps, self.max_iter)

    @property
    def termination(self):
        return TerminationCriteria(self.eps, self.max_iter)


@dataclass
class PhaseGridResult:
    m_values: list
    node_values: list
    rates: np.ndarray  # rates[i, j] for m_values[i], node_values[j]
    trials: int

    def rate(self, m, nodes):
        return float(self.rates[self.m_values.index(m), self.node_values.index(nodes)])

    def rows(self):
        for i, m in enumerate(self.m_values):
            for j, nv in enumerate(self.node_values):
                yield (m, nv, self.trials, float(self.rates[i, j]))


def generate_signal(n, k, seed):
    """k-sparse vector with a uniformly drawn support and N(0, 1) values."""
    if not 0 <= k <= n:
        raise ParameterError(f"need 0 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=k, replace=False))
    x0 = np.zeros(n)
    x0[support] = rng.standard_normal(k)
    return SparseSignal(x0, support, seed)


def generate_sensing(node_count, m, n, seed):
    """Per-node Gaussian sensing matrices with entries N(0, 1/m)."""
    if m < 1 or n < 1 or node_count < 1:
        raise ParameterError("node_count, m and n must be positive")
    rng = np.random.default_rng(seed)
    return [rng.standard_normal((m, n)) / math.sqrt(m) for _ in range(node_count)]


def apply_noise(y_clean, target_snr, seed):
    """Add white Gaussian noise calibrated to ``target_snr`` (linear scale).

    The variance is set so that ``sum_v ||y_v||^2 / (M sigma^2) = target_snr``
    for the given clean measurements, M being the total measurement count.
    ``target_snr = inf`` returns the measurements unchanged.

    Returns
    -------
    noisy : list of ndarray
    noise : list of ndarray
    realized : float
        ``sum_v ||y_v||^2 / sum_v ||xi_v||^2`` for the drawn noise.
    """
    if not target_snr > 0:
        raise ParameterError(f"target SNR must be positive, got {target_snr}")
    y_clean = [np.asarray(y, dtype=np.float64) for y in y_clean]
    if math.isinf(target_snr):
        return [y.copy() for y in y_clean], [np.zeros_like(y) for y in y_clean], math.inf
    energy = sum(float(y @ y) for y in y_clean)
    if energy == 0:
        raise ParameterError("cannot calibrate noise against zero signal energy")
    total = sum(y.size for y in y_clean)
    sigma = math.sqrt(energy / (total * target_snr))
    rng = np.random.default_rng(seed)
    noise = [sigma * rng.standard_normal(y.shape) for y in y_clean]
    realized = energy / sum(float(e @ e) for e in noise)
    return [y + e for y, e in zip(y_clean, noise)], noise, realized


def evaluate(X_star, x0, node_count=None):
    """MSE ``sum_v ||x0 - x_v||^2 / (n |V|)`` and the recovery flag."""
    X_star = np.asarray(X_star, dtype=np.float64)
    if X_star.ndim == 1:
        X_star = X_star[:, None]
    if node_count is not None and X_star.shape[1] != node_count:
        raise ParameterError(f"expected {node_count} columns, got {X_star.shape[1]}")
    n, N = X_star.shape
    mse = float(np.sum((X_star - np.asarray(x0)[:, None]) ** 2) / (n * N))
    return MetricSet(mse, mse < RECOVERY_MSE)


def trial_seed(master_seed, *key):
    """Seed for the trial identified by ``key`` (non-negative ints)."""
    return np.random.SeedSequence(master_seed, spawn_key=tuple(int(k) for k in key))


def snr_key(snr_db):
    if snr_db is None or math.isinf(snr_db):
        return 0
    return zlib.crc32(repr(float(snr_db)).encode()) + 1


def build_instance(cfg, seed):
    """Draw signal, sensing matrices and (optional) noise for one trial."""
    s_sig, s_mat, s_noise = seed.spawn(3)
    sig = generate_signal(cfg.n, cfg.k, s_sig)
    mats = generate_sensing(cfg.nodes, cfg.m, cfg.n, s_mat)
    clean = [np.zeros(cfg.m) if cfg.zero_measurements else A @ sig.x0 for A in mats]
    if cfg.snr_db is None:
        noisy, noise, snr = clean, [None] * len(clean), math.inf
    else:
        noisy, noise, snr = apply_noise(clean, 10.0 ** (cfg.snr_db / 10.0), s_noise)
    data = [SensorData(A, y, v, e) for v, (A, y, e) in enumerate(zip(mats, noisy, noise))]
    return sig, data, snr


def solve(cfg, data):
    P = build_topology(cfg.topology, cfg.nodes)
    lam = cfg.alpha if cfg.lam is None else cfg.lam
    if cfg.solver == "dista":
        return dista_run(data, P, DistaParams(cfg.q, cfg.alpha, cfg.tau), cfg.termination,
                         check_stepsizes=cfg.enforce_stepsize)
    if cfg.solver == "dsm":
        return dsm_run(data, P, cfg.gamma, cfg.alpha, cfg.tau, cfg.termination)
    if cfg.solver == "admm":
        return admm_run(data, P, LassoParams(lam, cfg.tau), cfg.rho, cfg.termination)
    A, y = aggregate(data)
    return ista_run(A, y, LassoParams(lam, cfg.tau), cfg.termination)


def run_trial(cfg, seed):
    """Run one seeded trial. Solver errors are reported as non-recovery."""
    sig, data, snr = build_instance(cfg, seed)
    try:
        rep = solve(cfg, data)
    except DistaError as err:
        logger.warning("trial failed: %s", err)
        return MetricSet(math.inf, False, snr, 0, f"{type(err).__name__}: {err}")
    met = evaluate(rep.X, sig.x0)
    return MetricSet(met.mse, met.recovered, snr, rep.iterations)


def _run_job(job):
    cfg, master, seed_key, result_key = job
    return result_key, run_trial(cfg, trial_seed(master, *seed_key))


def _execute(jobs, workers):
    workers = max(1, int(workers))
    if workers == 1 or len(jobs) <= 1:
        results = map(_run_job, jobs)
        return dict(results)
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return dict(pool.map(_run_job, jobs, chunksize=1))


def phase_transition(base, m_values, node_values, trials, master_seed=0, workers=1):
    """Empirical recovery rate over a grid of (m, |V|) cells."""
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    m_values, node_values = [int(m) for m in m_values], [int(v) for v in node_values]
    sk = snr_key(base.snr_db)
    # same keys as snr_sweep, so an infinite-SNR sweep sees the noise-free instances
    jobs = [(replace(base, m=m, nodes=nv), master_seed, (m, nv, sk, t), (m, nv, t))
            for m in m_values for nv in node_values for t in range(trials)]
    res = _execute(jobs, workers)
    rates = np.zeros((len(m_values), len(node_values)))
    for i, m in enumerate(m_values):
        for j, nv in enumerate(node_values):
            hits = sum(res[(m, nv, t)].recovered for t in range(trials))
            rates[i, j] = hits / trials
    return PhaseGridResult(m_values, node_values, rates, trials)


def snr_sweep(base, snr_values, solvers, m_values, trials, master_seed=0, workers=1):
    """Mean MSE per (solver, m, SNR in dB).

    Solvers share instances: the seed of a trial depends on (m, |V|, SNR,
    trial index) only, so every solver sees the same signals and noise.
    """
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    jobs = []
    for s in solvers:
        for m in m_values:
            for snr in snr_values:
                cfg = replace(base, solver=s, m=int(m), snr_db=snr)
                for t in range(trials):
                    seed_key = (int(m), base.nodes, snr_key(snr), t)
                    jobs.append((cfg, master_seed, seed_key, (s,) + seed_key))
    res = _execute(jobs, workers)
    rows = []
    for s in solvers:
        for m in m_values:
            for snr in snr_values:
                vals = [res[(s, int(m), base.nodes, snr_key(snr), t)].mse
                        for t in range(trials)]
                rows.append((s, int(m), snr, trials, float(np.mean(vals))))
    return rows


def _fmt(v):
    if isinstance(v, float):
        return "inf" if math.isinf(v) else repr(v)
    return str(v)


def _csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def phase_csv(result):
    return _csv_text(PHASE_COLUMNS, result.rows())


def snr_csv(rows):
    return _csv_text(SNR_COLUMNS, rows)


def trace_csv(report):
    rows = ((i + 1, float(f), float(s))
            for i, (f, s) in enumerate(zip(report.objective, report.step_norms)))
    return _csv_text(TRACE_COLUMNS, rows)


def write_atomic(path, text):
    """Write ``text`` to ``path`` via a temporary file; nothing is left on failure."""
    tmp = f"{path}.tmp{os.getpid()}"
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.remove(tmp)
        raise

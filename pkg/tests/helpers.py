import numpy as np

from dista import SensorData


def random_data(N, m, n, seed, k=None, noise=0.0, scale=None):
    """N nodes of Gaussian(0, 1/m) sensing with a sparse (or dense) signal."""
    rng = np.random.default_rng(seed)
    x0 = np.zeros(n)
    k = n if k is None else k
    x0[rng.choice(n, k, replace=False)] = rng.standard_normal(k)
    s = 1 / np.sqrt(m) if scale is None else scale
    out = []
    for v in range(N):
        A = rng.standard_normal((m, n)) * s
        out.append(SensorData(A, A @ x0 + noise * rng.standard_normal(m), v))
    return out, x0


def safe_tau(data, margin=0.9):
    """Largest stepsize below the bound at every node, times ``margin``."""
    return margin / max(np.linalg.norm(d.A, 2) ** 2 for d in data)

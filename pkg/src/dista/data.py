"""Per-node measurement containers."""

from dataclasses import dataclass

import numpy as np

from .errors import ShapeError
from .numerics import as_matrix, as_vector


@dataclass(frozen=True, eq=False)
class SensorData:
    """Sensing matrix ``A`` (m x n) and measurements ``y`` (m) held by one node.

    ``noise`` is the realization that was added to ``A @ x0``, if known.
    """
    A: np.ndarray
    y: np.ndarray
    node: int = 0
    noise: np.ndarray | None = None

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        y = as_vector(self.y, "y")
        if y.shape[0] != A.shape[0]:
            raise ShapeError(f"node {self.node}: A is {A.shape} but y has length {y.shape[0]}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def n(self):
        return self.A.shape[1]


def signal_length(data):
    n = {d.n for d in data}
    if len(n) != 1:
        raise ShapeError(f"nodes disagree on signal length: {sorted(n)}")
    return n.pop()


def aggregate(data):
    """Stack all nodes into the centralized pair (A, y)."""
    signal_length(data)
    return np.vstack([d.A for d in data]), np.concatenate([d.y for d in data])


def check_estimates(X, data):
    X = np.asarray(X, dtype=np.float64)
    n = signal_length(data)
    if X.shape != (n, len(data)):
        raise ShapeError(f"estimate matrix has shape {X.shape}, expected {(n, len(data))}")
    return X

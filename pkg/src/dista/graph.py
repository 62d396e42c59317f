"""Network topologies and the consensus matrices adapted to them."""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, ShapeError


@dataclass(frozen=True, eq=False)
class Topology:
    """Symmetric graph with self-loops on every node.

    ``adjacency[v, w]`` is True when v and w communicate.
    """
    adjacency: np.ndarray
    name: str = "custom"

    @property
    def node_count(self):
        return self.adjacency.shape[0]

    def neighbors(self, v):
        return np.flatnonzero(self.adjacency[v])

    def degrees(self):
        return self.adjacency.sum(axis=1)


@dataclass(frozen=True, eq=False)
class ConsensusMatrix:
    """Row-stochastic weights ``P`` adapted to ``topology``."""
    weights: np.ndarray
    topology: Topology

    @property
    def node_count(self):
        return self.weights.shape[0]

    def check(self, atol=1e-12):
        """Return a dict of named structural checks (all True when valid)."""
        P = self.weights
        return {
            "nonnegative": bool(np.all(P >= 0)),
            "row_stochastic": bool(np.allclose(P.sum(axis=1), 1.0, rtol=0, atol=atol)),
            "symmetric": bool(np.array_equal(P, P.T)),
            "adapted": bool(np.all(P[~self.topology.adjacency] == 0)),
        }

    def is_uniform_regular(self):
        """True when the graph is d-regular and every edge carries weight 1/d."""
        deg = self.topology.degrees()
        if not np.all(deg == deg[0]):
            return False
        d = deg[0]
        adj = self.topology.adjacency
        return bool(np.all(self.weights[adj] == 1.0 / d)
                    and np.all(self.weights[~adj] == 0))


def build_complete(N):
    if N < 1:
        raise ParameterError(f"node count must be at least 1, got {N}")
    adj = np.ones((N, N), dtype=bool)
    return ConsensusMatrix(np.full((N, N), 1.0 / N), Topology(adj, "complete"))


def build_d_regular(N, d):
    """Circulant ring lattice: each node sees itself and (d-1)/2 nodes per side.

    Self-loops count toward the degree, so ``build_d_regular(N, N)`` equals
    ``build_complete(N)`` for odd N.
    """
    if N < 1:
        raise ParameterError(f"node count must be at least 1, got {N}")
    if d < 1 or d % 2 == 0 or d > N:
        raise ParameterError(f"degree must be odd with 1 <= d <= N, got d={d}, N={N}")
    half = (d - 1) // 2
    adj = np.zeros((N, N), dtype=bool)
    for v in range(N):
        for s in range(-half, half + 1):
            adj[v, (v + s) % N] = True
    P = np.where(adj, 1.0 / d, 0.0)
    return ConsensusMatrix(P, Topology(adj, f"ring-regular({d})"))


def build_topology(spec, N):
    """Parse ``"complete"`` or ``"ring-regular(d)"`` into a consensus matrix."""
    spec = spec.strip().replace(" ", "")
    if spec == "complete":
        return build_complete(N)
    if spec.startswith("ring-regular(") and spec.endswith(")"):
        try:
            d = int(spec[len("ring-regular("):-1])
        except ValueError:
            raise ParameterError(f"bad degree in topology spec {spec!r}") from None
        return build_d_regular(N, d)
    raise ParameterError(f"unknown topology {spec!r}")


def apply_consensus(X, P):
    """Weighted neighbor averaging ``X @ P.T``; column v is sum_w P[v, w] x_w."""
    W = P.weights if isinstance(P, ConsensusMatrix) else np.asarray(P)
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != W.shape[0]:
        raise ShapeError(f"X has shape {X.shape}, expected {W.shape[0]} columns")
    return X @ W.T

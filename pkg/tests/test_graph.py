import numpy as np
import pytest

from dista import ParameterError, ShapeError, apply_consensus, build_complete, build_d_regular
from dista.graph import build_topology


def test_complete_small():
    np.testing.assert_array_equal(build_complete(1).weights, [[1.0]])
    np.testing.assert_array_equal(build_complete(2).weights, [[0.5, 0.5], [0.5, 0.5]])
    P = build_complete(4)
    assert np.all(P.weights == 0.25)
    assert all(P.check().values())
    with pytest.raises(ParameterError):
        build_complete(0)


def test_d_regular_examples():
    np.testing.assert_array_equal(build_d_regular(5, 1).weights, np.eye(5))
    np.testing.assert_array_equal(build_d_regular(5, 5).weights, build_complete(5).weights)
    W = build_d_regular(6, 3).weights
    for v in range(6):
        expected = np.zeros(6)
        expected[[(v - 1) % 6, v, (v + 1) % 6]] = 1 / 3
        np.testing.assert_array_equal(W[v], expected)


@pytest.mark.parametrize("N,d", [(6, 2), (4, 5), (5, 0)])
def test_d_regular_rejects(N, d):
    with pytest.raises(ParameterError):
        build_d_regular(N, d)


@pytest.mark.parametrize("N", [1, 3, 7, 11])
def test_complete_is_full_ring(N):
    np.testing.assert_array_equal(build_d_regular(N, N).weights, build_complete(N).weights)


def test_structure_checks():
    for P in (build_complete(7), build_d_regular(9, 3), build_d_regular(10, 5)):
        assert all(P.check().values())
        assert P.is_uniform_regular()
        assert np.all(P.topology.degrees() == P.topology.degrees()[0])
        assert np.all(np.diag(P.topology.adjacency))


def test_apply_consensus_examples():
    X = np.random.default_rng(0).standard_normal((5, 4))
    np.testing.assert_array_equal(apply_consensus(X, np.eye(4)), X)
    out = apply_consensus(X, build_complete(4))
    np.testing.assert_allclose(out, np.repeat(X.mean(axis=1, keepdims=True), 4, axis=1),
                               rtol=1e-14)
    c = np.arange(5.0)[:, None] * np.ones((1, 4))
    np.testing.assert_allclose(apply_consensus(c, build_d_regular(4, 3)), c, rtol=1e-15)
    with pytest.raises(ShapeError):
        apply_consensus(X, build_complete(3))


def test_build_topology_parser():
    assert build_topology("complete", 4).topology.name == "complete"
    assert build_topology("ring-regular(3)", 6).topology.name == "ring-regular(3)"
    for bad in ("star", "ring-regular(x)", "ring-regular(4)"):
        with pytest.raises(ParameterError):
            build_topology(bad, 6)

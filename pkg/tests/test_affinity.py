import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cutmatch.affinity import (
    build_affinity,
    build_similarity,
    dump_affinity,
    laplacian,
    load_affinity,
    tau,
    unvec,
    vec,
)
from cutmatch.graph import Graph
from cutmatch.synthetic import SyntheticConfig, delaunay, generate_joint


def test_tau_examples():
    assert tau(0, 0, 4) == 0
    assert tau(3, 3, 4) == 15
    assert tau(2, 1, 4) == 6
    with pytest.raises(IndexError):
        tau(4, 0, 4)


def test_tau_matches_vec():
    n = 5
    X = np.arange(n * n, dtype=float).reshape(n, n)
    x = vec(X)
    for i, a in itertools.product(range(n), repeat=2):
        assert x[tau(i, a, n)] == X[i, a]
    assert np.array_equal(unvec(x, n), X)
    assert sorted(tau(i, a, n) for i in range(n) for a in range(n)) == list(range(n * n))


def two_edge_graph(d_ij, d_ab):
    pos = np.array([[0.0, 0.0], [d_ij, 0.0], [0.0, 5.0], [d_ab, 5.0]])
    return Graph(pos, np.zeros((4, 1)), [(0, 1), (2, 3)])


def test_affinity_values():
    A = build_affinity(two_edge_graph(1.0, 1.0), 0.5).toarray()
    assert A[tau(0, 2, 4), tau(1, 3, 4)] == pytest.approx(1.0)
    delta1 = 0.5
    A = build_affinity(two_edge_graph(1.0, 1.0 + np.sqrt(delta1)), delta1).toarray()
    assert A[tau(0, 2, 4), tau(1, 3, 4)] == pytest.approx(np.exp(-1.0))
    with pytest.raises(ValueError):
        build_affinity(two_edge_graph(1, 1), 0.0)


def test_affinity_invariants():
    for seed in range(10):
        g, _ = generate_joint(SyntheticConfig(m=3, sigma=0.2, d=2, seed=seed))
        n = g.n
        A = build_affinity(g, 0.5).toarray()
        adj = g.adjacency()
        assert np.allclose(A, A.T)
        assert A.min() >= 0
        for r, c in zip(*np.nonzero(A)):
            a, i = divmod(r, n)
            b, j = divmod(c, n)
            assert i != a and j != b
            assert adj[i, j] and adj[a, b]


def test_quadratic_form_four_index(rng):
    g, _ = generate_joint(SyntheticConfig(m=3, sigma=0.1, d=2, seed=4))
    n = g.n
    A = build_affinity(g, 0.5).toarray()
    X = rng.random((n, n))
    direct = sum(
        A[tau(i, a, n), tau(j, b, n)] * X[i, a] * X[j, b]
        for i, a, j, b in itertools.product(range(n), repeat=4)
    )
    assert vec(X) @ A @ vec(X) == pytest.approx(direct, rel=1e-12)


def test_similarity_values():
    pos = np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]])
    feat = np.array([[0.0], [0.0], [np.sqrt(5.0)], [0.0]])
    g = Graph(pos, feat, [(0, 1)])
    W = build_similarity(g, 5.0, 1.0)
    assert W[0, 1] == pytest.approx(2.0)
    assert W[2, 0] == pytest.approx(np.exp(-1.0) + np.exp(-1.0))
    with pytest.raises(ValueError):
        build_similarity(g, -1.0, 1.0)


def test_similarity_properties():
    for seed in range(10):
        g, _ = generate_joint(SyntheticConfig(m=5, sigma=0.1, mu=0.3, seed=seed))
        W = build_similarity(g, 5.0, 0.5)
        assert np.array_equal(W, W.T)
        assert np.all(np.diag(W) == 0)
        assert W.min() >= 0 and W.max() <= 2.0


def test_laplacian_examples():
    assert np.array_equal(laplacian(np.zeros((3, 3))), np.zeros((3, 3)))
    w = 0.7
    assert np.allclose(laplacian(np.array([[0, w], [w, 0]])), [[w, -w], [-w, w]])


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 12), st.integers(0, 2**31 - 1))
def test_laplacian_properties(n, seed):
    r = np.random.default_rng(seed)
    W = r.random((n, n))
    W = W + W.T
    np.fill_diagonal(W, 0)
    L = laplacian(W)
    assert np.abs(L @ np.ones(n)).max() <= 1e-12
    assert np.linalg.eigvalsh(L).min() >= -1e-10
    y = r.standard_normal(n)
    pair_sum = sum(W[i, j] * (y[i] - y[j]) ** 2 for i in range(n) for j in range(i + 1, n))
    assert y @ L @ y == pytest.approx(pair_sum, abs=1e-10 * max(1.0, pair_sum))


def test_affinity_dump_round_trip(tmp_path):
    g, _ = generate_joint(SyntheticConfig(m=3, d=2, sigma=0.1, seed=2))
    A = build_affinity(g, 0.5)
    p = tmp_path / "a.coo"
    dump_affinity(p, A)
    B = load_affinity(p, A.shape[0])
    assert np.array_equal(A.toarray(), B.toarray())
    assert delaunay(g.positions)  # sanity: graph had edges

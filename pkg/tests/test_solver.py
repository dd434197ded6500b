import numpy as np
import pytest
import scipy.sparse as sp
from conftest import random_feasible

from cutmatch.affinity import build_affinity, build_similarity
from cutmatch.graph import SolverConfig, check_feasible
from cutmatch.metrics import cut_accuracy, matching_accuracy
from cutmatch.oracle import brute_force_assignment, objective_direct
from cutmatch.solver import (
    cutmatch_solve,
    discretize,
    discretize_symmetric,
    initialize,
    objective,
    objective_terms,
    zero_same_side,
)
from cutmatch.synthetic import SyntheticConfig, generate_joint


def test_objective_n2():
    w, l1, l2 = 0.3, 2.0, 5.0
    W = np.array([[0, w], [w, 0]])
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    y = np.array([1, -1]) / np.sqrt(2)
    E = objective(sp.csr_matrix((4, 4)), W, X, y, l1, l2)
    assert E == pytest.approx(-2 * l1 * w + 2 * l2)


def test_objective_constant_y(rng):
    g, _ = generate_joint(SyntheticConfig(m=3, d=4, sigma=0.1, seed=1))
    A = build_affinity(g, 0.5)
    W = build_similarity(g, 5, 0.5)
    X = random_feasible(rng, 6)
    m, c, k = objective_terms(A, W, X, np.ones(6) / np.sqrt(6), 200, 50)
    assert abs(c) <= 1e-12 and abs(k) <= 1e-12
    assert objective(A, W, X, np.ones(6) / np.sqrt(6), 200, 50) == pytest.approx(m)


def test_objective_direct_sum(rng):
    for seed in range(5):
        g, _ = generate_joint(SyntheticConfig(m=2, d=3, sigma=0.2, seed=seed))
        A = build_affinity(g, 0.5)
        W = build_similarity(g, 5, 0.5)
        X = random_feasible(rng, 4)
        y = rng.standard_normal(4)
        y /= np.linalg.norm(y)
        assert objective(A, W, X, y, 3.0, 2.0) == pytest.approx(
            objective_direct(A, W, X, y, 3.0, 2.0), abs=1e-10
        )


def test_objective_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        objective(sp.csr_matrix((16, 16)), np.zeros((4, 4)), np.zeros((3, 3)), np.zeros(3), 1, 1)


def test_zero_same_side():
    X = np.ones((4, 4))
    out = zero_same_side(X, np.array([1.0, 1.0, -1.0, -1.0]))
    assert out[0, 1] == 0 and out[0, 2] == 1 and out[3, 2] == 0


def test_initialize_feasible():
    for seed in range(5):
        g, _ = generate_joint(SyntheticConfig(sigma=0.1, mu=0.3, rho=0.1, seed=seed))
        A = build_affinity(g, 0.5)
        W = build_similarity(g, 5, 0.5)
        X, y = initialize(A, W)
        assert check_feasible(X).max_violation <= 1e-6
        assert abs(np.linalg.norm(y) - 1) <= 1e-10


def test_initialize_symmetric_raw_is_kept():
    g, _ = generate_joint(SyntheticConfig(m=3, gamma=0.5, d=4, seed=0))
    A = build_affinity(g, 0.5)
    W = build_similarity(g, 5, 0.5)
    raw = np.zeros((6, 6))
    for i in range(3):
        raw[i, i + 3] = raw[i + 3, i] = 1.0
    X, y = initialize(A, W, raw_matching=raw)
    s = np.sign(y)
    if np.all(s[:3] == s[0]) and np.all(s[3:] == -s[0]):
        assert np.allclose(X, raw)


def _solve_acc(cfg):
    g, gt = generate_joint(cfg)
    A = build_affinity(g, 0.5)
    W = build_similarity(g, 5, 0.5)
    res = cutmatch_solve(A, W)
    sigma, labels = discretize(res.X, res.y)
    return cut_accuracy(labels, gt.labels), matching_accuracy(sigma, gt.correspondence)


def test_clean_separated_instances():
    """Separated partitions with uncorrelated features: exact matching."""
    accs = np.array([_solve_acc(SyntheticConfig(gamma=-1.0, mu=1.0, seed=s)) for s in range(10)])
    assert np.all(accs[:, 1] == 1.0)
    assert accs[:, 0].mean() >= 0.95


def test_identical_features_pin_pairs_together():
    """With sigma = mu = rho = 0 each corresponding pair has W_ij near 1, and
    at the default weights keeping the pairs together outweighs the coupling
    gain, so the cut degenerates."""
    cut, _ = _solve_acc(SyntheticConfig(gamma=0.5, seed=0))
    assert cut <= 0.6


def test_trace_invariants():
    for seed in range(5):
        g, _ = generate_joint(SyntheticConfig(sigma=0.1, mu=0.3, rho=0.1, seed=seed))
        A = build_affinity(g, 0.5)
        W = build_similarity(g, 5, 0.5)
        res = cutmatch_solve(A, W)
        recs = res.trace.records
        E = res.trace.objectives
        assert np.all(np.diff(E) >= -1e-8)
        for prev, rec in zip(recs, recs[1:]):
            # the cut step is an exact maximizer and cannot lose objective
            assert rec.objective_after_cut >= prev.objective - 1e-9
        bound = abs(A).sum() + 2 * 50
        assert np.all(E <= bound)
        assert check_feasible(res.X).max_violation <= 1e-6
        assert abs(np.linalg.norm(res.y) - 1) <= 1e-10


def test_discretize_examples(rng):
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    sigma, labels = discretize(X, np.array([0.2, -0.2]))
    assert list(sigma) == [1, 0] and list(labels) == [1, -1]
    P = np.zeros((4, 4))
    P[0, 2] = P[2, 0] = P[1, 3] = P[3, 1] = 1
    assert list(discretize(P, np.ones(4))[0]) == [2, 3, 0, 1]
    for _ in range(20):
        X = random_feasible(rng, 6)
        sigma, _ = discretize(X, np.ones(6))
        _, best = brute_force_assignment(X, np.eye(6, dtype=bool))
        assert X[np.arange(6), sigma].sum() == pytest.approx(best)
    p = discretize_symmetric(P)
    assert list(p) == [2, 3, 0, 1]


def test_argmin_rule_runs():
    g, _ = generate_joint(SyntheticConfig(m=4, d=8, sigma=0.1, seed=3))
    A = build_affinity(g, 0.5)
    W = build_similarity(g, 5, 0.5)
    res = cutmatch_solve(A, W, SolverConfig(cut_rule="min", max_outer=3))
    assert len(res.trace.records) <= 3

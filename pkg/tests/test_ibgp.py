import itertools

import numpy as np
import pytest
import scipy.sparse as sp
from conftest import random_feasible

from cutmatch.affinity import build_affinity, vec
from cutmatch.graph import check_feasible
from cutmatch.hungarian import solve_assignment
from cutmatch.ibgp import gradient, ibgp_gm, ibgp_solve, matching_score
from cutmatch.metrics import inlier_accuracy
from cutmatch.projections import CUTMATCH, STANDARD_GM
from cutmatch.synthetic import GmPairConfig, SyntheticConfig, generate_gm_pair, generate_joint


def random_affinity(rng, n, density=0.3):
    N = n * n
    A = sp.random(N, N, density=density, random_state=rng, format="csr")
    return (A + A.T).tocsr()


def test_gradient_zero():
    n = 4
    G = gradient(sp.csr_matrix((n * n, n * n)), np.ones((n, n)) / n, np.ones(n) / 2, 0.0)
    assert np.array_equal(G, np.zeros((n, n)))


def test_gradient_identity(rng):
    n = 4
    X = random_feasible(rng, n)
    y = rng.standard_normal(n)
    y /= np.linalg.norm(y)
    G = gradient(sp.identity(n * n, format="csr"), X, y, 3.0)
    assert np.allclose(G, 2 * X - 3.0 * np.outer(y, y))


def test_gradient_finite_differences(rng):
    for _ in range(20):
        n = int(rng.integers(3, 6))
        A = random_affinity(rng, n)
        X = rng.random((n, n))
        y = rng.standard_normal(n)
        l2 = float(rng.random() * 5)
        G = gradient(A, X, y, l2)
        h = 1e-6
        num = np.zeros((n, n))
        for i, j in itertools.product(range(n), repeat=2):
            E = np.zeros((n, n))
            E[i, j] = h
            num[i, j] = (matching_score(A, X + E, y, l2) - matching_score(A, X - E, y, l2)) / (2 * h)
        assert np.allclose(G, num, rtol=1e-4, atol=1e-6)


def test_gradient_dimension_mismatch():
    with pytest.raises(ValueError):
        gradient(sp.identity(9, format="csr"), np.eye(4))


def test_n2_fixed():
    X0 = np.array([[0.0, 1.0], [1.0, 0.0]])
    A = sp.csr_matrix(np.ones((4, 4)))
    st = ibgp_solve(A, X0, np.array([1, -1]) / np.sqrt(2), 1.0)
    assert np.array_equal(st.X, X0)
    assert st.converged and st.iterations <= 1


def test_infeasible_init():
    with pytest.raises(ValueError):
        ibgp_solve(sp.identity(16, format="csr"), np.eye(4))


@pytest.mark.parametrize("method", ["newton", "dykstra", "alternate"])
def test_monotone_and_feasible(rng, method):
    for _ in range(8):
        n = 8
        A = random_affinity(rng, n, 0.05)
        X0 = random_feasible(rng, n)
        y = rng.standard_normal(n)
        y -= y.mean()
        y /= np.linalg.norm(y)
        st = ibgp_solve(A, X0, y, 2.0, max_ibgp=50, method=method)
        s = np.array(st.scores)
        assert np.all(np.diff(s) >= -1e-8)
        assert st.score >= s[0] - 1e-8
        rep = check_feasible(st.X)
        assert rep.max_violation <= 1e-6
        assert st.min_ascent >= -1e-10


def test_gm_zero_affinity():
    n = 5
    X0 = np.full((n, n), 1.0 / n)
    st = ibgp_gm(sp.csr_matrix((n * n, n * n)), X0)
    assert np.allclose(st.X, X0)


def test_gm_forced_permutation():
    target = [2, 0, 1]
    for perm in itertools.permutations(range(3)):
        target = list(perm)
        n = 3
        A = np.zeros((9, 9))
        for i, a in enumerate(target):
            A[a * n + i, a * n + i] = 1.0
        st = ibgp_gm(sp.csr_matrix(A))
        sigma = solve_assignment(st.X)
        brute = max(
            itertools.permutations(range(3)),
            key=lambda p: vec(np.eye(3)[list(p)]) @ A @ vec(np.eye(3)[list(p)]),
        )
        assert list(sigma) == target == list(brute)


def test_gm_feasibility(rng):
    pair = generate_gm_pair(GmPairConfig(inliers=8, deformation=0.05, outliers=2, seed=3))
    st = ibgp_gm(pair.A)
    rep = check_feasible(st.X)
    assert max(rep.row_sum, rep.col_sum, rep.box) <= 1e-6
    assert np.all(np.diff(st.scores) >= -1e-8)


def test_gm_density_setting_runs():
    for density in (0.2, 0.6, 1.0):
        pair = generate_gm_pair(GmPairConfig(deformation=0.25, outliers=5, density=density, seed=1))
        st = ibgp_gm(pair.A)
        acc = inlier_accuracy(solve_assignment(st.X), pair.perm)
        assert 0.0 <= acc <= 1.0 and np.isfinite(st.score)


def test_cutmatch_mode_instance():
    g, _ = generate_joint(SyntheticConfig(m=4, sigma=0.1, seed=2, d=8))
    A = build_affinity(g, 0.5)
    n = g.n
    X0 = np.full((n, n), 1.0 / (n - 1))
    np.fill_diagonal(X0, 0)
    y = np.r_[-np.ones(4), np.ones(4)] / np.sqrt(8)
    st = ibgp_solve(A, X0, y, 50.0, mode=CUTMATCH)
    assert st.score >= st.scores[0] - 1e-8
    assert check_feasible(st.X).max_violation <= 1e-6
    st2 = ibgp_solve(A, np.full((n, n), 1.0 / n), None, 0.0, mode=STANDARD_GM)
    assert st2.score >= st2.scores[0]

import numpy as np
import pytest
from conftest import random_feasible

from cutmatch.affinity import build_similarity
from cutmatch.cut import sign_discretize, spectral_cut
from cutmatch.oracle import (
    OracleError,
    brute_force_cut,
    brute_force_match,
    cut_cost,
    double_factorial,
    dykstra_oracle,
    perfect_matchings,
)
from cutmatch.projections import CUTMATCH, STANDARD_GM, project_direction
from cutmatch.synthetic import SyntheticConfig, generate_joint


@pytest.mark.parametrize("n", [2, 4, 6, 8])
def test_matching_count(n):
    ms = list(perfect_matchings(n))
    assert len(ms) == double_factorial(n - 1)
    for p in ms:
        assert np.all(p[p] == np.arange(n)) and np.all(p != np.arange(n))
    assert len({tuple(p) for p in ms}) == len(ms)


def test_brute_force_match_small():
    import scipy.sparse as sp

    X, s, count = brute_force_match(sp.csr_matrix((4, 4)))
    assert count == 1 and np.array_equal(X, [[0, 1], [1, 0]])
    _, _, count = brute_force_match(sp.csr_matrix((16, 16)))
    assert count == 3
    _, _, count = brute_force_match(sp.csr_matrix((36, 36)))
    assert count == 15
    with pytest.raises(ValueError):
        brute_force_match(sp.csr_matrix((9, 9)))


def test_brute_force_cut_cliques():
    W = np.zeros((6, 6))
    W[:3, :3] = 1
    W[3:, 3:] = 1
    np.fill_diagonal(W, 0)
    labels, cost = brute_force_cut(W)
    assert cost == 0.0 and len(set(labels[:3])) == 1 and labels[0] != labels[3]


def test_brute_force_cut_complete_ties():
    W = np.ones((4, 4)) - np.eye(4)
    labels, cost = brute_force_cut(W)
    for lab in ([-1, 1, -1, 1], [-1, -1, 1, 1], [-1, 1, 1, -1]):
        assert cut_cost(W, lab) == pytest.approx(cost)
    assert cost == pytest.approx(16.0)


def test_brute_force_cut_unbalanced():
    W = np.zeros((4, 4))
    W[0, 1] = W[1, 0] = W[1, 2] = W[2, 1] = 5.0
    W[2, 3] = W[3, 2] = 0.1
    labels, cost = brute_force_cut(W, balanced=False)
    assert cost == pytest.approx(0.4) and labels[3] != labels[2]


def test_spectral_vs_brute_force_reported(capsys):
    ratios = []
    for seed in range(5):
        g, _ = generate_joint(SyntheticConfig(m=4, sigma=0.1, mu=0.3, seed=seed))
        W = build_similarity(g, 5, 0.5)
        _, best = brute_force_cut(W, balanced=False)
        got = cut_cost(W, sign_discretize(spectral_cut(W)))
        ratios.append(got / best if best > 0 else 1.0)
    print("spectral / optimal cut cost:", np.round(ratios, 3))
    assert all(r >= 1 - 1e-12 for r in ratios)


def test_dykstra_fixed_point(rng):
    n = 5
    X = random_feasible(rng, n)
    V = np.zeros((n, n))
    out, _ = dykstra_oracle(V, X, 0.1, CUTMATCH)
    assert np.array_equal(out, V)


@pytest.mark.parametrize("mode", [CUTMATCH, STANDARD_GM])
def test_dykstra_feasible_and_closest(rng, mode):
    for _ in range(20):
        n = 3
        X = random_feasible(rng, n)
        U = rng.standard_normal((n, n))
        if mode == CUTMATCH:
            U = U + U.T
        V, _ = dykstra_oracle(U, X, 0.1, mode)
        assert np.abs(V.sum(1)).max() <= 1e-11
        if mode == CUTMATCH:
            assert np.abs(V - V.T).max() <= 1e-11
        else:
            assert np.abs(V.sum(0)).max() <= 1e-11
        Y = X + 0.1 * V
        assert Y.min() >= -1e-11 and Y.max() <= 1 + 1e-11
        assert (U * V).sum() >= -1e-10
        # the default projection lands on the same point
        assert np.abs(project_direction(U, X, 0.1, mode).V - V).max() <= 1e-8


def test_dykstra_cap():
    rng = np.random.default_rng(1)
    X = random_feasible(rng, 5)
    U = rng.standard_normal((5, 5)) * 100
    with pytest.raises(OracleError):
        dykstra_oracle(U + U.T, X, 0.1, CUTMATCH, max_sweeps=1)

import math
import warnings

import numpy as np
import pytest

from cutmatch.oracle import delaunay_violations
from cutmatch.synthetic import (
    DEFORMATION_GRID,
    DegenerateTriangulationWarning,
    GmPairConfig,
    SyntheticConfig,
    delaunay,
    generate_gm_pair,
    generate_joint,
)


def test_delaunay_triangle():
    assert delaunay([(0, 0), (1, 0), (0, 1)]) == {(0, 1), (0, 2), (1, 2)}


def test_delaunay_square():
    e = delaunay([(0, 0), (1, 0), (1, 1), (0, 1)])
    assert len(e) == 5
    assert {(0, 1), (1, 2), (2, 3), (0, 3)} <= e


def test_delaunay_collinear_fallback():
    with pytest.warns(DegenerateTriangulationWarning):
        e = delaunay([(2, 0), (0, 0), (1, 0), (3, 0)])
    assert e == {(0, 2), (1, 2), (0, 3)}


def test_delaunay_empty_circumcircle(rng):
    for _ in range(30):
        n = int(rng.integers(4, 26))
        pts = rng.standard_normal((n, 2))
        e = delaunay(pts)
        assert delaunay_violations(pts, e) == []


def test_delaunay_matches_scipy(rng):
    from scipy.spatial import Delaunay

    for _ in range(20):
        pts = rng.random((30, 2))
        ref = set()
        for s in Delaunay(pts).simplices:
            for a in range(3):
                i, j = sorted((int(s[a]), int(s[(a + 1) % 3])))
                ref.add((i, j))
        assert delaunay(pts) == ref


def test_joint_noiseless():
    g, gt = generate_joint(SyntheticConfig(m=20, gamma=0.3, seed=5))
    assert g.n == 40
    m = 20
    assert np.array_equal(g.features[:m], g.features[m:])
    shift = g.positions[m:] - g.positions[:m]
    assert np.allclose(shift[:, 1], 0) and np.allclose(shift[:, 0], shift[0, 0])
    gap = g.positions[m:, 0].min() - g.positions[:m, 0].max()
    assert gap == pytest.approx(-0.3)


def test_joint_rho_count():
    base = generate_joint(SyntheticConfig(m=20, seed=9))[0]
    perm = generate_joint(SyntheticConfig(m=20, rho=0.1, seed=9))[0]
    # rho draws happen after the features, so unchanged rows are identical
    changed = np.any(base.features != perm.features, axis=1).sum()
    assert changed == math.floor(0.1 * 40)


def test_joint_ground_truth_and_determinism():
    for seed in range(20):
        cfg = SyntheticConfig(m=5, sigma=0.1, mu=0.3, rho=0.2, eta=0.1, d=6, seed=seed)
        g1, gt1 = generate_joint(cfg)
        g2, gt2 = generate_joint(cfg)
        assert g1 == g2 and gt1 == gt2
        assert (gt1.labels == 1).sum() == 5
        c = gt1.correspondence
        assert np.all(c[c] == np.arange(10)) and np.all(gt1.labels != gt1.labels[c])


def test_joint_eta_adds_edges():
    a = generate_joint(SyntheticConfig(m=6, seed=1, d=2))[0]
    b = generate_joint(SyntheticConfig(m=6, seed=1, d=2, eta=0.5))[0]
    assert set(map(tuple, a.edges)) <= set(map(tuple, b.edges))
    assert len(b.edges) > len(a.edges)


def test_config_validation():
    with pytest.raises(ValueError):
        SyntheticConfig(m=1)
    with pytest.raises(ValueError):
        SyntheticConfig(rho=2)
    with pytest.raises(ValueError):
        GmPairConfig(density=0)


def test_gm_pair_noiseless():
    pair = generate_gm_pair(GmPairConfig(inliers=6, seed=2))
    A = pair.A.toarray()
    n = 6
    for i in range(n):
        for j in range(n):
            if i != j:
                assert A[i * n + i, j * n + j] == pytest.approx(1.0)


def test_gm_pair_sizes_and_grid():
    pair = generate_gm_pair(GmPairConfig(inliers=20, outliers=10, seed=0))
    assert pair.size == 30 and pair.A.shape == (900, 900)
    assert len(DEFORMATION_GRID) == 9 and DEFORMATION_GRID[-1] == 0.4


def test_gm_pair_deterministic():
    c = GmPairConfig(deformation=0.1, outliers=2, density=0.5, seed=4)
    a, b = generate_gm_pair(c), generate_gm_pair(c)
    assert (a.A != b.A).nnz == 0

"""Synthetic benchmark generators.

``generate_joint`` builds one graph holding two noisy copies of a point
pattern (the joint cut + match task). ``generate_gm_pair`` builds a classic
two-graph matching problem with deformation, outliers and edge density.
"""

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .affinity import distance_affinity
from .graph import Graph, GroundTruth


class DegenerateTriangulationWarning(UserWarning):
    pass


# -- Delaunay (Bowyer-Watson) ----------------------------------------------


def _orient_exact(a, b, c):
    ax, ay = map(Fraction, a)
    bx, by = map(Fraction, b)
    cx, cy = map(Fraction, c)
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


def orient(a, b, c):
    """Sign of twice the signed area of ``abc`` (positive = counter-clockwise)."""
    l = (b[0] - a[0]) * (c[1] - a[1])
    r = (b[1] - a[1]) * (c[0] - a[0])
    det = l - r
    if abs(det) > 1e-12 * (abs(l) + abs(r)):
        return 1 if det > 0 else -1
    d = _orient_exact(a, b, c)
    return (d > 0) - (d < 0)


def _incircle_exact(a, b, c, d):
    rows = []
    for p in (a, b, c):
        x = Fraction(p[0]) - Fraction(d[0])
        y = Fraction(p[1]) - Fraction(d[1])
        rows.append((x, y, x * x + y * y))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    return a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)


def incircle(a, b, c, d):
    """Positive if ``d`` lies strictly inside the circumcircle of CCW triangle ``abc``."""
    adx, ady = a[0] - d[0], a[1] - d[1]
    bdx, bdy = b[0] - d[0], b[1] - d[1]
    cdx, cdy = c[0] - d[0], c[1] - d[1]
    alift = adx * adx + ady * ady
    blift = bdx * bdx + bdy * bdy
    clift = cdx * cdx + cdy * cdy
    t1 = alift * (bdx * cdy - cdx * bdy)
    t2 = blift * (cdx * ady - adx * cdy)
    t3 = clift * (adx * bdy - bdx * ady)
    det = t1 + t2 + t3
    perm = (
        alift * (abs(bdx * cdy) + abs(cdx * bdy))
        + blift * (abs(cdx * ady) + abs(adx * cdy))
        + clift * (abs(adx * bdy) + abs(bdx * ady))
    )
    if abs(det) > 1e-10 * perm:
        return 1 if det > 0 else -1
    e = _incircle_exact(a, b, c, d)
    return (e > 0) - (e < 0)


def _path_edges(pts):
    order = sorted(range(len(pts)), key=lambda k: (pts[k][0], pts[k][1]))
    return {(min(u, v), max(u, v)) for u, v in zip(order, order[1:])}


def delaunay(points):
    """Delaunay edges of 2-D points as a set of ``(i, j)`` with ``i < j``.

    Collinear input has no triangulation; the points are then chained in
    x-order and a :class:`DegenerateTriangulationWarning` is issued. Exact
    duplicate points are left unconnected (also with a warning).
    """
    pts = [(float(p[0]), float(p[1])) for p in np.asarray(points, dtype=float)]
    n = len(pts)
    if n < 3:
        raise ValueError("need at least 3 points")
    first = next((k for k in range(1, n) if pts[k] != pts[0]), None)
    if first is None or all(orient(pts[0], pts[first], p) == 0 for p in pts):
        warnings.warn("collinear points; using an x-order path", DegenerateTriangulationWarning)
        return _path_edges(pts)

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    cx, cy = (min(xs) + max(xs)) / 2, (min(ys) + max(ys)) / 2
    span = max(max(xs) - min(xs), max(ys) - min(ys), 1e-9)
    big = 1e3 * span
    verts = pts + [(cx - 2 * big, cy - big), (cx + 2 * big, cy - big), (cx, cy + 2 * big)]
    tris = {(n, n + 1, n + 2)}

    seen = set()
    for k in range(n):
        p = pts[k]
        if p in seen:
            warnings.warn(f"duplicate point {k} left unconnected", DegenerateTriangulationWarning)
            continue
        seen.add(p)
        bad = [t for t in tris if incircle(verts[t[0]], verts[t[1]], verts[t[2]], p) > 0]
        count = {}
        for t in bad:
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = (min(e), max(e))
                count[key] = count.get(key, 0) + 1
        boundary = [
            e
            for t in bad
            for e in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0]))
            if count[(min(e), max(e))] == 1
        ]
        tris.difference_update(bad)
        for u, v in boundary:
            # boundary edges keep the CCW orientation of the removed triangle
            tris.add((u, v, k))

    edges = set()
    for t in tris:
        if max(t) >= n:
            continue
        for u, v in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            edges.add((min(u, v), max(u, v)))
    return edges


# -- joint cut + match instances -------------------------------------------


@dataclass(frozen=True)
class SyntheticConfig:
    m: int = 20
    gamma: float = 0.2
    sigma: float = 0.0
    mu: float = 0.0
    rho: float = 0.0
    d: int = 128
    delta1: float = 0.5
    delta2: float = 5.0
    delta3: float = 0.5
    eta: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if self.sigma < 0 or self.mu < 0:
            raise ValueError("noise levels must be nonnegative")
        if not (0 <= self.rho <= 1 and 0 <= self.eta <= 1):
            raise ValueError("rho and eta must lie in [0, 1]")
        if min(self.delta1, self.delta2, self.delta3) <= 0:
            raise ValueError("kernel bandwidths must be positive")
        if self.d < 1:
            raise ValueError("feature dimension must be positive")


def generate_joint(cfg):
    """One graph of ``2m`` nodes: partition 1 followed by its translated copy.

    Node ``i`` of the first half corresponds to node ``i + m``. Labels are
    -1 for the first half and +1 for the second.
    """
    rng = np.random.default_rng(cfg.seed)
    m, n = cfg.m, 2 * cfg.m
    p1 = rng.standard_normal((m, 2))
    shift = p1[:, 0].max() - p1[:, 0].min() - cfg.gamma
    p2 = p1 + np.array([shift, 0.0])
    p2 = p2 + cfg.sigma * rng.standard_normal((m, 2))
    positions = np.vstack([p1, p2])

    f1 = rng.standard_normal((m, cfg.d))
    f2 = f1 + cfg.mu * rng.standard_normal((m, cfg.d))
    features = np.vstack([f1, f2])
    k = math.floor(cfg.rho * n)
    if k >= 2:
        chosen = rng.choice(n, size=k, replace=False)
        features[chosen] = features[np.roll(chosen, 1)]

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateTriangulationWarning)
        edges = delaunay(positions)
    if cfg.eta > 0:
        iu, ju = np.triu_indices(n, 1)
        draws = rng.random(len(iu))
        for a, b, r in zip(iu, ju, draws):
            if r < cfg.eta:
                edges.add((int(a), int(b)))

    labels = np.r_[-np.ones(m, dtype=np.int64), np.ones(m, dtype=np.int64)]
    corr = np.r_[np.arange(m, n), np.arange(m)]
    return Graph(positions, features, sorted(edges)), GroundTruth(labels, corr)


# -- two-graph matching instances ------------------------------------------


@dataclass(frozen=True)
class GmPairConfig:
    inliers: int = 20
    deformation: float = 0.0
    outliers: int = 0
    density: float = 1.0
    delta1: float = 0.15
    seed: int = 0

    def __post_init__(self):
        if self.inliers < 2 or self.outliers < 0:
            raise ValueError("need at least 2 inliers and nonnegative outliers")
        if self.deformation < 0:
            raise ValueError("deformation must be nonnegative")
        if not 0 < self.density <= 1:
            raise ValueError("density must lie in (0, 1]")
        if self.delta1 <= 0:
            raise ValueError("delta1 must be positive")


@dataclass(frozen=True)
class GmPair:
    A: object
    perm: np.ndarray  # perm[i] = node of graph 2 matched to node i; -1 for outliers
    points1: np.ndarray
    points2: np.ndarray
    lengths1: np.ndarray
    lengths2: np.ndarray
    edges1: np.ndarray
    edges2: np.ndarray

    @property
    def size(self):
        return self.points1.shape[0]


def _random_edges(rng, n, density):
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < density
    return np.stack([iu[keep], ju[keep]], axis=1)


def generate_gm_pair(cfg):
    """Two graphs over the same inlier points, with outliers appended to both.

    Deformation is Gaussian noise of the given level added to each
    inlier-inlier edge length of graph 2 (the edge attribute the affinity
    compares); lengths touching an outlier are plain point distances.
    """
    rng = np.random.default_rng(cfg.seed)
    k = cfg.inliers
    base = rng.random((k, 2))
    pts1 = np.vstack([base, rng.random((cfg.outliers, 2))])
    pts2 = np.vstack([base, rng.random((cfg.outliers, 2))])
    N = k + cfg.outliers
    D1 = np.linalg.norm(pts1[:, None] - pts1[None], axis=-1)
    D2 = np.linalg.norm(pts2[:, None] - pts2[None], axis=-1)
    noise = np.triu(rng.standard_normal((k, k)), 1)
    D2[:k, :k] += cfg.deformation * (noise + noise.T)
    e1 = _random_edges(rng, N, cfg.density)
    e2 = _random_edges(rng, N, cfg.density)
    A = distance_affinity(D1, e1, D2, e2, cfg.delta1)
    perm = np.r_[np.arange(k), -np.ones(cfg.outliers, dtype=np.int64)]
    return GmPair(A, perm, pts1, pts2, D1, D2, e1, e2)


DEFORMATION_GRID = tuple(round(0.05 * i, 2) for i in range(9))
OUTLIER_GRID = (0, 2, 4, 6, 8, 10)
DENSITY_GRID = (0.2, 0.4, 0.6, 0.8, 1.0)

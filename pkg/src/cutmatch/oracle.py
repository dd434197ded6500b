"""Brute-force and high-accuracy references for testing the solvers.

Everything here is deliberately naive: exhaustive enumeration, dense KKT
systems and plain Dykstra sweeps. Only use at desk scale.
"""

import itertools
import math

import numpy as np

from .affinity import laplacian, vec
from .projections import CUTMATCH, STANDARD_GM

MAX_MATCH_NODES = 10
MAX_CUT_NODES = 20


class OracleError(RuntimeError):
    pass


def perfect_matchings(n):
    """Yield every perfect matching of ``range(n)`` as an involution array.

    Order is lexicographic in the pair lists, which fixes tie-breaking.
    """
    if n % 2:
        raise ValueError("perfect matchings need an even node count")

    def rec(free):
        if not free:
            yield []
            return
        i = free[0]
        for k in range(1, len(free)):
            rest = free[1:k] + free[k + 1:]
            for tail in rec(rest):
                yield [(i, free[k])] + tail

    for pairs in rec(list(range(n))):
        partner = np.empty(n, dtype=np.int64)
        for i, j in pairs:
            partner[i], partner[j] = j, i
        yield partner


def double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def permutation_matrix(sigma):
    n = len(sigma)
    X = np.zeros((n, n))
    X[np.arange(n), sigma] = 1.0
    return X


def brute_force_match(A, n=None):
    """Best perfect matching for ``vec(X)^T A vec(X)``.

    Returns ``(X, score, count)`` where ``count`` is the number of matchings
    enumerated. The first maximizer in enumeration order wins ties.
    """
    if n is None:
        n = int(round(math.sqrt(A.shape[0])))
    if n % 2:
        raise ValueError("n must be even")
    if n > MAX_MATCH_NODES:
        raise ValueError(f"n={n} too large for enumeration (max {MAX_MATCH_NODES})")
    best, best_score, count = None, -np.inf, 0
    for partner in perfect_matchings(n):
        count += 1
        X = permutation_matrix(partner)
        x = vec(X)
        s = float(x @ (A @ x))
        if s > best_score:
            best, best_score = X, s
    return best, best_score, count


def cut_cost(W, labels):
    """``labels^T L labels`` for ``labels`` in {-1, +1}^n.

    Equals ``sum_{i<j} W_ij (l_i - l_j)^2``, i.e. four times the cut weight.
    """
    labels = np.asarray(labels, dtype=float)
    return float(labels @ laplacian(W) @ labels)


def brute_force_cut(W, balanced=True):
    """Minimum-cost bipartition. Node 0 is fixed to -1 to skip mirror images.

    Returns ``(labels, cost)``.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    if n > MAX_CUT_NODES:
        raise ValueError(f"n={n} too large for enumeration (max {MAX_CUT_NODES})")
    L = laplacian(W)
    best, best_cost = None, np.inf
    others = range(1, n)
    if balanced:
        if n % 2:
            raise ValueError("balanced cut needs an even node count")
        candidates = itertools.combinations(others, n // 2)
    else:
        candidates = itertools.chain.from_iterable(
            itertools.combinations(others, k) for k in range(1, n)
        )
    for plus in candidates:
        labels = -np.ones(n)
        labels[list(plus)] = 1.0
        c = float(labels @ L @ labels)
        if c < best_cost - 1e-12:
            best, best_cost = labels.astype(np.int64), c
    return best, best_cost


def brute_force_assignment(profit, forbidden=None):
    """Exhaustive maximum over permutations; ``forbidden`` is a boolean mask."""
    profit = np.asarray(profit, dtype=float)
    n = profit.shape[0]
    best, best_val = None, -np.inf
    for perm in itertools.permutations(range(n)):
        if forbidden is not None and any(forbidden[i, p] for i, p in enumerate(perm)):
            continue
        v = float(profit[np.arange(n), perm].sum())
        if v > best_val:
            best, best_val = np.array(perm), v
    return best, best_val


def objective_direct(A, W, X, y, lambda1, lambda2):
    """Joint objective by explicit four-index and double sums."""
    A = np.asarray(A.todense()) if hasattr(A, "todense") else np.asarray(A)
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    match = 0.0
    for i in range(n):
        for a in range(n):
            for j in range(n):
                for b in range(n):
                    match += A[a * n + i, b * n + j] * X[i, a] * X[j, b]
    cut = 0.0
    couple = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            cut += W[i, j] * (y[i] - y[j]) ** 2
        for j in range(n):
            couple += ((i == j) - X[i, j]) * y[i] * y[j]
    return match - lambda1 * cut + lambda2 * couple


def _constraint_rows(n, mode):
    """Rows of the linear equality system on ``vec(V)`` (column-major)."""
    rows = []
    for i in range(n):
        r = np.zeros((n, n))
        r[i, :] = 1.0
        rows.append(vec(r))
    if mode == STANDARD_GM:
        for j in range(n):
            c = np.zeros((n, n))
            c[:, j] = 1.0
            rows.append(vec(c))
    else:
        for i in range(n):
            for j in range(i + 1, n):
                s = np.zeros((n, n))
                s[i, j], s[j, i] = 1.0, -1.0
                rows.append(vec(s))
    return np.array(rows)


def kkt_center_oracle(U, mode):
    """Projection of ``U`` onto the centering subspace by solving the KKT system.

    ``mode="cutmatch"``: ``{V 1 = 0, V = V^T}``; ``mode="gm"``:
    ``{V 1 = 0, V^T 1 = 0}``. The multiplier system is rank deficient, so it
    is solved in the least-squares sense.
    """
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    C = _constraint_rows(n, mode)
    u = vec(U)
    lam, *_ = np.linalg.lstsq(C @ C.T, C @ u, rcond=None)
    v = u - C.T @ lam
    return v.reshape((n, n), order="F")


def _box(X_prev, eps, mode):
    X_prev = np.asarray(X_prev, dtype=float)
    if mode == CUTMATCH:
        lo = -np.minimum(X_prev, X_prev.T) / eps
        hi = (1.0 - np.maximum(X_prev, X_prev.T)) / eps
        np.fill_diagonal(lo, 0.0)
        np.fill_diagonal(hi, 0.0)
    else:
        lo = -X_prev / eps
        hi = (1.0 - X_prev) / eps
    return lo, hi


def _subspace(V, mode):
    n = V.shape[0]
    if mode == CUTMATCH:
        V = 0.5 * (V + V.T)
    r = V.sum(axis=1, keepdims=True)
    c = V.sum(axis=0, keepdims=True)
    return V - r / n - c / n + V.sum() / n**2


def dykstra_oracle(U, X_prev, eps, mode, tol=1e-12, max_sweeps=100_000):
    """Euclidean projection of ``U`` onto {centering subspace} ∩ {box} by Dykstra.

    The subspace needs no correction increment; the box does. Sweeps stop
    once both the iterate change and the distance between the two sets'
    points are at most ``tol * max(1, max|U|)``. Raises :class:`OracleError`
    otherwise. Returns ``(V, sweeps)``.
    """
    if mode not in (CUTMATCH, STANDARD_GM):
        raise ValueError(f"unknown mode {mode!r}")
    U = np.asarray(U, dtype=float)
    lo, hi = _box(X_prev, eps, mode)
    hi = np.maximum(hi, lo)
    thresh = tol * max(1.0, np.abs(U).max())
    V = U.copy()
    Q = np.zeros_like(U)
    for sweep in range(1, max_sweeps + 1):
        B = np.clip(V + Q, lo, hi)
        Q = V + Q - B
        V_new = _subspace(B, mode)
        change = np.abs(V_new - V).max()
        gap = np.abs(V_new - B).max()
        V = V_new
        if change <= thresh and gap <= thresh:
            return np.clip(V, lo, hi), sweep
    raise OracleError(f"Dykstra did not reach {tol:g} in {max_sweeps} sweeps")


def circumcircle_contains(a, b, c, p):
    """True when ``p`` lies strictly inside the circumcircle of triangle ``abc``."""
    m = np.array(
        [
            [a[0] - p[0], a[1] - p[1], (a[0] - p[0]) ** 2 + (a[1] - p[1]) ** 2],
            [b[0] - p[0], b[1] - p[1], (b[0] - p[0]) ** 2 + (b[1] - p[1]) ** 2],
            [c[0] - p[0], c[1] - p[1], (c[0] - p[0]) ** 2 + (c[1] - p[1]) ** 2],
        ]
    )
    orient = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    det = np.linalg.det(m)
    scale = np.abs(m).max() ** 3 + 1e-300
    return det * np.sign(orient) > 1e-10 * scale


def _inside_triangle(a, b, c, p):
    def side(u, v, w):
        return (v[0] - u[0]) * (w[1] - u[1]) - (v[1] - u[1]) * (w[0] - u[0])

    s1, s2, s3 = side(a, b, p), side(b, c, p), side(c, a, p)
    return (s1 > 0 and s2 > 0 and s3 > 0) or (s1 < 0 and s2 < 0 and s3 < 0)


def delaunay_violations(points, edges):
    """Faces of the edge set whose circumcircle strictly contains another point.

    Every 3-cycle with no point inside it is a face. O(n^4) overall.
    """
    pts = np.asarray(points, dtype=float)
    es = {(min(i, j), max(i, j)) for i, j in edges}
    adj = {i: set() for i in range(len(pts))}
    for i, j in es:
        adj[i].add(j)
        adj[j].add(i)
    bad = []
    for i, j in sorted(es):
        for k in sorted(adj[i] & adj[j]):
            if k <= j:
                continue
            others = [p for p in range(len(pts)) if p not in (i, j, k)]
            if any(_inside_triangle(pts[i], pts[j], pts[k], pts[p]) for p in others):
                continue
            for p in others:
                if circumcircle_contains(pts[i], pts[j], pts[k], pts[p]):
                    bad.append(((i, j, k), p))
                    break
    return bad

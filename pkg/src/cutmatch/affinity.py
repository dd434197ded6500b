"""Pairwise affinity, cut similarity, graph Laplacian and the vec convention.

Matchings are vectorized column-major: entry ``X[i, a]`` lives at flat index
``a * n + i`` (see :func:`tau`). ``vec`` and ``unvec`` implement the same map.
"""

import numpy as np
import scipy.sparse as sp


def tau(i, a, n):
    """Flat index of matrix entry ``(i, a)`` in an ``n x n`` matching."""
    if not (0 <= i < n and 0 <= a < n):
        raise IndexError(f"({i}, {a}) out of range for n={n}")
    return a * n + i


def vec(X):
    return np.asarray(X).reshape(-1, order="F")


def unvec(x, n):
    return np.asarray(x).reshape((n, n), order="F")


def _directed(edges):
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    return np.concatenate([edges, edges[:, ::-1]])


def pairwise_affinity(pos1, edges1, pos2, edges2, delta1, exclude_self=False):
    """Edge-pair affinity between two point sets as a sparse ``(n1*n2)^2`` matrix.

    Rows and columns follow the column-major convention for an ``n1 x n2``
    matching: ``X[i, a]`` maps to ``a * n1 + i``. For directed edges
    ``(i, j)`` of graph 1 and ``(a, b)`` of graph 2 the entry at
    ``(tau(i, a), tau(j, b))`` is ``exp(-(d_ij - d_ab)^2 / delta1)``.
    With ``exclude_self`` (both sides are the same graph) pairs where
    ``i == a`` or ``j == b`` are dropped: self-assignments carry no support.
    """
    return distance_affinity(
        _distances(pos1), edges1, _distances(pos2), edges2, delta1, exclude_self
    )


def _distances(pos):
    pos = np.asarray(pos, dtype=float)
    return np.linalg.norm(pos[:, None, :] - pos[None, :, :], axis=-1)


def distance_affinity(D1, edges1, D2, edges2, delta1, exclude_self=False):
    """:func:`pairwise_affinity` from precomputed symmetric edge lengths ``D1``, ``D2``."""
    if not delta1 > 0:
        raise ValueError("delta1 must be positive")
    n1 = D1.shape[0]
    n2 = D2.shape[0]
    e1 = _directed(edges1)
    e2 = _directed(edges2)
    d1 = D1[e1[:, 0], e1[:, 1]]
    d2 = D2[e2[:, 0], e2[:, 1]]

    i = np.repeat(e1[:, 0], len(e2))
    j = np.repeat(e1[:, 1], len(e2))
    a = np.tile(e2[:, 0], len(e1))
    b = np.tile(e2[:, 1], len(e1))
    vals = np.exp(-np.subtract.outer(d1, d2).ravel() ** 2 / delta1)
    if exclude_self:
        keep = (i != a) & (j != b)
        i, j, a, b, vals = i[keep], j[keep], a[keep], b[keep], vals[keep]
    N = n1 * n2
    A = sp.csr_matrix((vals, (a * n1 + i, b * n1 + j)), shape=(N, N))
    A.sum_duplicates()
    return A


def build_affinity(graph, delta1):
    """One-graph matching affinity: both sides of every edge pair come from ``graph``."""
    pos, edges = graph.positions, graph.edges
    return pairwise_affinity(pos, edges, pos, edges, delta1, exclude_self=True)


def build_similarity(graph, delta2, delta3):
    """Cut weights from feature and position Gaussian kernels, zero diagonal."""
    if not (delta2 > 0 and delta3 > 0):
        raise ValueError("delta2 and delta3 must be positive")
    f = graph.features
    ell = graph.positions
    fd = ((f[:, None, :] - f[None, :, :]) ** 2).sum(-1)
    ld = ((ell[:, None, :] - ell[None, :, :]) ** 2).sum(-1)
    W = np.exp(-fd / delta2) + np.exp(-ld / delta3)
    W = 0.5 * (W + W.T)
    np.fill_diagonal(W, 0.0)
    return W


def laplacian(W):
    W = np.asarray(W, dtype=float)
    return np.diag(W.sum(axis=1)) - W


def quadratic_score(A, X):
    """``vec(X)^T A vec(X)``."""
    x = vec(X)
    return float(x @ (A @ x))


def dump_affinity(path, A):
    """Write nonzeros as ``row col value`` lines."""
    coo = sp.coo_matrix(A)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {float(v)!r}\n")


def load_affinity(path, size):
    data = np.loadtxt(path, ndmin=2)
    if data.size == 0:
        return sp.csr_matrix((size, size))
    return sp.csr_matrix(
        (data[:, 2], (data[:, 0].astype(np.int64), data[:, 1].astype(np.int64))), shape=(size, size)
    )

"""Spectral cut steps: the coupled cut update, the plain spectral cut and the
median-balanced cut."""

from typing import NamedTuple

import numpy as np

from .affinity import laplacian


class CutResult(NamedTuple):
    y: np.ndarray
    eigenvalue: float
    M: np.ndarray


def _fix_sign(y):
    nz = np.flatnonzero(np.abs(y) > 1e-12)
    if len(nz) and y[nz[0]] < 0:
        y = -y
    return y


def top_nontrivial_eigvec(M, largest=True):
    """Eigenvector of symmetric ``M`` for its extreme eigenvalue, ignoring the
    constant direction.

    The eigenvector best aligned with ``1`` is dropped; among the rest the
    largest (or smallest) eigenvalue wins, ties going to the first returned
    by ``eigh``. The result is re-orthogonalized against ``1`` and scaled to
    unit norm.
    """
    M = 0.5 * (M + M.T)
    n = M.shape[0]
    w, Q = np.linalg.eigh(M)
    align = np.abs(Q.sum(axis=0)) / np.sqrt(n)
    trivial = int(np.argmax(align))
    order = np.arange(n)[::-1] if largest else np.arange(n)
    k = next(i for i in order if i != trivial)
    y = Q[:, k] - Q[:, k].mean()
    y /= np.linalg.norm(y)
    return _fix_sign(y), float(w[k])


def coupled_matrix(W, X, lambda1, lambda2):
    """``lambda2 (I - X) - lambda1 L``."""
    n = W.shape[0]
    return lambda2 * (np.eye(n) - np.asarray(X)) - lambda1 * laplacian(W)


def cut_update(W, X, lambda1, lambda2, rule="max"):
    """Unit cut vector maximizing ``y^T (lambda2 (I - X) - lambda1 L) y`` over ``y`` orthogonal to 1.

    ``rule="min"`` takes the smallest eigenvalue instead. The returned ``M``
    is the coupled matrix compressed onto the complement of 1 (``K M K`` with
    ``K = I - 11^T/n``). Its quadratic form agrees with the coupled matrix on
    every admissible ``y``, and 1 is an exact null vector even when the rows
    of ``X`` carry rounding-level sum errors.
    """
    if rule not in ("max", "min"):
        raise ValueError("rule must be 'max' or 'min'")
    M = coupled_matrix(W, X, lambda1, lambda2)
    M = 0.5 * (M + M.T)
    M = M - M.mean(axis=0, keepdims=True)
    M = M - M.mean(axis=1, keepdims=True)
    y, lam = top_nontrivial_eigvec(M, largest=(rule == "max"))
    return CutResult(y, lam, M)


def spectral_cut(W):
    """Fiedler vector of the Laplacian of ``W`` (unit norm, orthogonal to 1)."""
    y, _ = top_nontrivial_eigvec(laplacian(W), largest=False)
    return y


def sign_discretize(y):
    return np.where(np.asarray(y) >= 0, 1, -1)


def median_split(y):
    """Exactly balanced labels: the ``n/2`` smallest entries (index breaks ties) get -1."""
    y = np.asarray(y)
    n = len(y)
    if n % 2:
        raise ValueError("balanced split needs an even node count")
    order = np.lexsort((np.arange(n), y))
    labels = np.ones(n, dtype=np.int64)
    labels[order[: n // 2]] = -1
    return labels


def balanced_cut(W):
    return median_split(spectral_cut(W))

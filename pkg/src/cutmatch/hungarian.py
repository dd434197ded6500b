"""Maximum-profit linear assignment with forbidden cells."""

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment
from scipy.sparse.csgraph import maximum_bipartite_matching


class InfeasibleAssignmentError(ValueError):
    pass


def solve_assignment(profit, forbidden=()):
    """Permutation ``sigma`` (as an index array) maximizing ``sum profit[i, sigma[i]]``.

    ``forbidden`` is an iterable of ``(i, j)`` cells or a boolean mask. Raises
    :class:`InfeasibleAssignmentError` when no permutation avoids them.
    """
    profit = np.asarray(profit, dtype=float)
    n = profit.shape[0]
    if profit.shape != (n, n):
        raise ValueError(f"profit must be square, got {profit.shape}")
    if not np.all(np.isfinite(profit)):
        raise ValueError("profit contains non-finite entries")
    mask = np.zeros((n, n), dtype=bool)
    if isinstance(forbidden, np.ndarray) and forbidden.dtype == bool:
        mask |= forbidden
    else:
        for i, j in forbidden:
            mask[i, j] = True

    if mask.any():
        allowed = sp.csr_matrix(~mask)
        if (maximum_bipartite_matching(allowed, perm_type="column") < 0).any():
            raise InfeasibleAssignmentError("no permutation avoids the forbidden cells")
        span = profit.max() - profit.min()
        penalty = profit.min() - (span + 1.0) * (n + 1)
        profit = np.where(mask, penalty, profit)

    rows, cols = linear_sum_assignment(profit, maximize=True)
    sigma = np.empty(n, dtype=np.int64)
    sigma[rows] = cols
    return sigma


def assignment_total(profit, sigma):
    profit = np.asarray(profit)
    return float(profit[np.arange(len(sigma)), sigma].sum())


def greedy_pairing(X):
    """Symmetric pairing from a relaxed matching: repeatedly pair the largest
    remaining ``X[i, j] + X[j, i]``. Returns an involution as an index array."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    S = X + X.T
    np.fill_diagonal(S, -np.inf)
    partner = -np.ones(n, dtype=np.int64)
    iu, ju = np.triu_indices(n, 1)
    for k in np.argsort(-S[iu, ju], kind="stable"):
        i, j = iu[k], ju[k]
        if partner[i] < 0 and partner[j] < 0:
            partner[i], partner[j] = j, i
    return partner

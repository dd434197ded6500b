"""Iterative Bregman gradient projection (IBGP) for relaxed matching.

Each iteration takes the objective gradient, projects it onto the set of
feasible directions at the current iterate and steps ``X <- X + eps * V``.
With ``safeguard`` on, a step that lowers the score halves ``eps`` and is
retried, so the score sequence is non-decreasing.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .affinity import unvec, vec
from .graph import check_feasible
from .projections import CUTMATCH, STANDARD_GM, project_direction

MAX_HALVINGS = 40


@dataclass
class IbgpState:
    X: np.ndarray
    score: float
    iterations: int
    converged: bool
    eps: float
    scores: list = field(default_factory=list)
    min_ascent: float = np.inf  # smallest Tr(grad^T V) over accepted steps
    proj_sweeps: int = 0
    proj_failures: int = 0


def _symmetric_part(A):
    """``A + A^T`` as CSR, computed once per solve."""
    A = sp.csr_matrix(A)
    return (A + A.T).tocsr()


def matching_score(A, X, y=None, lambda2=0.0):
    """``vec(X)^T A vec(X) + lambda2 * y^T (I - X) y``."""
    x = vec(X)
    s = float(x @ (A @ x))
    if lambda2 and y is not None:
        y = np.asarray(y, dtype=float)
        s += lambda2 * float(y @ y - y @ (np.asarray(X) @ y))
    return s


def gradient(A, X, y=None, lambda2=0.0, *, A_sym=None):
    """Gradient of the matching score with respect to ``X``.

    ``[(A + A^T) vec(X)]`` reshaped back to ``n x n`` minus ``lambda2 * y y^T``.
    Pass a precomputed ``A_sym = A + A^T`` to skip the transpose.
    """
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    if A_sym is None:
        if A.shape != (n * n, n * n):
            raise ValueError(f"affinity shape {A.shape} does not match X of size {n}")
        A_sym = _symmetric_part(A)
    G = unvec(A_sym @ vec(X), n).copy()
    if lambda2:
        y = np.asarray(y, dtype=float)
        if y.shape != (n,):
            raise ValueError("y has the wrong length")
        G -= lambda2 * np.outer(y, y)
    return G


def ibgp_solve(
    A,
    X_init,
    y=None,
    lambda2=0.0,
    eps=0.1,
    tol=1e-8,
    max_ibgp=200,
    mode=CUTMATCH,
    *,
    tol_proj=1e-8,
    max_proj=1000,
    method="newton",
    safeguard=True,
    tol_feas=1e-6,
):
    """Run IBGP from a feasible ``X_init``.

    Stops when the step ``eps * V`` has max-norm at most ``tol``, when no
    halving of ``eps`` yields ascent, or after ``max_ibgp`` iterations.
    """
    X = np.array(X_init, dtype=float, copy=True)
    n = X.shape[0]
    if A.shape != (n * n, n * n):
        raise ValueError(f"affinity shape {A.shape} does not match X of size {n}")
    rep = check_feasible(X)
    if mode == CUTMATCH:
        feasible = rep.ok(tol_feas)
    else:
        feasible = rep.ok(tol_feas, diagonal=False, symmetry=False)
    if not feasible:
        raise ValueError(f"X_init is infeasible (max violation {rep.max_violation:.3g})")
    if mode == STANDARD_GM:
        lambda2 = 0.0

    A_sym = _symmetric_part(A)
    A_csr = sp.csr_matrix(A)
    score = matching_score(A_csr, X, y, lambda2)
    state = IbgpState(X=X, score=score, iterations=0, converged=False, eps=eps, scores=[score])

    for it in range(1, max_ibgp + 1):
        G = gradient(A_csr, X, y, lambda2, A_sym=A_sym)
        U = 0.5 * (G + G.T) if mode == CUTMATCH else G
        accepted = False
        for _ in range(MAX_HALVINGS):
            res = project_direction(U, X, state.eps, mode, tol_proj, max_proj, method)
            state.proj_sweeps += res.sweeps
            state.proj_failures += not res.converged
            V = res.V
            step = state.eps * V
            if np.abs(step).max() <= tol:
                break
            # no clipping: it would reintroduce row-sum drift, and the next
            # box keeps any rounding-level overshoot from growing
            X_new = X + step
            if mode == CUTMATCH:
                np.fill_diagonal(X_new, 0.0)
            new_score = matching_score(A_csr, X_new, y, lambda2)
            if not safeguard or new_score >= score:
                accepted = True
                break
            state.eps *= 0.5
        state.iterations = it
        if not accepted:
            state.converged = True
            break
        state.min_ascent = min(state.min_ascent, float((U * V).sum()))
        X, score = X_new, new_score
        state.scores.append(score)
        if np.abs(step).max() <= tol:
            state.converged = True
            break

    state.X = X
    state.score = score
    return state


def ibgp_gm(A, X_init=None, eps=0.1, tol=1e-8, max_ibgp=200, **kwargs):
    """Standard two-graph IBGP: doubly stochastic + box constraints only.

    ``X_init`` defaults to the uniform doubly stochastic matrix.
    """
    N = int(round(np.sqrt(A.shape[0])))
    if X_init is None:
        X_init = np.full((N, N), 1.0 / N)
    return ibgp_solve(A, X_init, None, 0.0, eps, tol, max_ibgp, STANDARD_GM, **kwargs)

"""Alternating cut / matching optimization on a single graph.

The joint objective is

    E(X, y) = vec(X)^T A vec(X) - lambda1 y^T L y + lambda2 y^T (I - X) y

with ``X`` symmetric, doubly stochastic, zero-diagonal and ``y`` unit-norm.
Each outer iteration solves the cut subproblem exactly (an eigenvector) and
then improves the matching with IBGP at fixed ``y``.
"""

from dataclasses import asdict, dataclass, field

import numpy as np

from .affinity import laplacian, vec
from .cut import cut_update, sign_discretize, spectral_cut
from .graph import SolverConfig, check_feasible
from .hungarian import greedy_pairing, solve_assignment
from .ibgp import ibgp_gm, ibgp_solve
from .projections import CUTMATCH, bregman_project_zero_diag


@dataclass
class TraceRecord:
    iteration: int
    objective: float
    cut_term: float
    matching_term: float
    coupling_term: float
    feasibility: float
    ibgp_iterations: int
    eigenvalue: float
    eps: float
    min_ascent: float
    objective_after_cut: float


@dataclass
class SolveTrace:
    initial_objective: float = float("nan")
    records: list = field(default_factory=list)
    converged: bool = False

    @property
    def objectives(self):
        return np.array([r.objective for r in self.records])

    def to_rows(self):
        return [asdict(r) for r in self.records]


@dataclass
class CutMatchResult:
    X: np.ndarray
    y: np.ndarray
    trace: SolveTrace

    @property
    def converged(self):
        return self.trace.converged


def objective_terms(A, W, X, y, lambda1, lambda2):
    """``(matching, cut, coupling)`` terms; the objective is
    ``matching - lambda1 * cut + lambda2 * coupling``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n = X.shape[0]
    if A.shape != (n * n, n * n) or W.shape != (n, n) or y.shape != (n,):
        raise ValueError("dimension mismatch between A, W, X and y")
    x = vec(X)
    matching = float(x @ (A @ x))
    cut = float(y @ laplacian(W) @ y)
    coupling = float(y @ y - y @ X @ y)
    return matching, cut, coupling


def objective(A, W, X, y, lambda1, lambda2):
    m, c, k = objective_terms(A, W, X, y, lambda1, lambda2)
    return m - lambda1 * c + lambda2 * k


def zero_same_side(X, y):
    """Zero ``X[i, j]`` wherever ``sign(y_i) == sign(y_j)``."""
    s = sign_discretize(y)
    return np.where(np.equal.outer(s, s), 0.0, X)


def initialize(A, W, cfg=SolverConfig(), raw_matching=None):
    """Starting ``(X, y)``.

    ``y`` is the plain spectral cut. The raw matching comes from standard-GM
    IBGP on the one-graph affinity (rounded to a permutation) unless
    ``raw_matching`` supplies one. It is symmetrized, same-side entries are
    dropped and the result is projected onto the feasible set.
    """
    n = W.shape[0]
    y = spectral_cut(W)
    if raw_matching is None:
        gm = ibgp_gm(A, eps=cfg.eps, tol=cfg.tol_step, max_ibgp=cfg.max_ibgp,
                     tol_proj=cfg.tol_proj, max_proj=cfg.max_proj, method=cfg.projection)
        sigma = solve_assignment(gm.X, forbidden=np.eye(n, dtype=bool))
        X_raw = np.zeros((n, n))
        X_raw[np.arange(n), sigma] = 1.0
    else:
        X_raw = np.asarray(raw_matching, dtype=float)
    X_raw = 0.5 * (X_raw + X_raw.T)
    X_raw = zero_same_side(X_raw, y)
    proj = bregman_project_zero_diag(X_raw, cfg.tol_feas * 1e-3, cfg.max_bregman)
    return symmetrize(proj.X), y


def symmetrize(X):
    X = 0.5 * (X + X.T)
    np.fill_diagonal(X, 0.0)
    return X


def cutmatch_solve(A, W, cfg=SolverConfig(), init=None):
    """Run the alternating solver. ``init`` optionally overrides ``(X, y)``."""
    l1, l2 = cfg.lambda1, cfg.lambda2
    X, y = initialize(A, W, cfg) if init is None else (np.asarray(init[0], float), np.asarray(init[1], float))
    trace = SolveTrace(initial_objective=objective(A, W, X, y, l1, l2))
    prev = None
    for it in range(1, cfg.max_outer + 1):
        cut = cut_update(W, X, l1, l2, rule=cfg.cut_rule)
        y = cut.y
        if it == 1:
            X = zero_same_side(X, y)
            X = symmetrize(bregman_project_zero_diag(X, cfg.tol_feas * 1e-3, cfg.max_bregman).X)
        after_cut = objective(A, W, X, y, l1, l2)
        st = ibgp_solve(
            A, X, y, l2, cfg.eps, cfg.tol_step, cfg.max_ibgp, CUTMATCH,
            tol_proj=cfg.tol_proj, max_proj=cfg.max_proj, method=cfg.projection,
            safeguard=cfg.safeguard, tol_feas=cfg.tol_feas,
        )
        X = st.X
        m, c, k = objective_terms(A, W, X, y, l1, l2)
        obj = m - l1 * c + l2 * k
        trace.records.append(
            TraceRecord(
                iteration=it,
                objective=obj,
                cut_term=c,
                matching_term=m,
                coupling_term=k,
                feasibility=check_feasible(X).max_violation,
                ibgp_iterations=st.iterations,
                eigenvalue=cut.eigenvalue,
                eps=st.eps,
                min_ascent=st.min_ascent,
                objective_after_cut=after_cut,
            )
        )
        if prev is not None and abs(obj - prev) / max(1.0, abs(obj)) <= cfg.tol_obj:
            trace.converged = True
            break
        prev = obj
    return CutMatchResult(X, y, trace)


def discretize(X, y):
    """``(sigma, labels)``: Hungarian assignment on ``X`` with the diagonal
    forbidden, and sign labels of ``y``."""
    X = np.asarray(X, dtype=float)
    n = X.shape[0]
    sigma = solve_assignment(X, forbidden=np.eye(n, dtype=bool))
    return sigma, sign_discretize(y)


def discretize_symmetric(X):
    return greedy_pairing(X)

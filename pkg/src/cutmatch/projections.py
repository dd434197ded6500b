"""Convex projections used by the matching solvers.

Two modes share one driver:

``"cutmatch"``
    Directions keep ``X + eps * V`` symmetric, doubly stochastic and
    zero-diagonal: ``V 1 = 0``, ``V = V^T``, ``V_ii = 0`` plus box bounds.
``"gm"``
    Standard two-graph matching: ``V 1 = 0``, ``V^T 1 = 0`` plus box bounds.
"""

from typing import NamedTuple

import numpy as np

from . import kernels

CUTMATCH = "cutmatch"
STANDARD_GM = "gm"
MODES = (CUTMATCH, STANDARD_GM)
METHODS = ("newton", "dykstra", "alternate")
NEWTON_TOL = 1e-12
NEWTON_MAX_ITER = 60


class ProjectionResult(NamedTuple):
    X: np.ndarray
    iterations: int
    converged: bool
    residuals: np.ndarray


class DirectionResult(NamedTuple):
    V: np.ndarray
    sweeps: int
    converged: bool


def _check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


def bregman_project_zero_diag(X_raw, tol=1e-6, max_iter=10000):
    """Project onto nonnegative doubly stochastic matrices with zero diagonal.

    Each sweep applies the closed-form projection onto ``{X 1 = 1, X^T 1 = 1}``,
    ramps negatives to zero, then zeroes the diagonal. Stops once the largest
    row/column sum error is at most ``tol``. Non-convergence is reported in
    the result rather than raised.
    """
    X_raw = np.asarray(X_raw, dtype=float)
    if X_raw.ndim != 2 or X_raw.shape[0] != X_raw.shape[1]:
        raise ValueError(f"X_raw must be square, got {X_raw.shape}")
    if not np.all(np.isfinite(X_raw)):
        raise ValueError("X_raw contains non-finite entries")
    X, iters, converged, residuals = kernels.bregman_zero_diag(X_raw, tol, max_iter)
    return ProjectionResult(X, iters, bool(converged), residuals)


def center_c1_symmetric(U, tol=1e-6):
    """Project a symmetric ``U`` onto ``{V : V 1 = 0, V = V^T}``."""
    U = np.asarray(U, dtype=float)
    if np.abs(U - U.T).max() > tol:
        raise ValueError("U must be symmetric (symmetrize before centering)")
    return kernels.center(U)


def center_c1_doubly(U):
    """Project ``U`` onto ``{V : V 1 = 0, V^T 1 = 0}``.

    The grand-mean term carries ``1/n^2``; that is the only coefficient for
    which both row and column sums vanish.
    """
    return kernels.center(np.asarray(U, dtype=float))


def direction_bounds(X_prev, eps, mode):
    """Elementwise ``(lo, hi)`` so that ``X_prev + eps * V`` stays in ``[0, 1]``.

    In cutmatch mode the bounds are shared by ``(j, k)`` and ``(k, j)`` and the
    diagonal is pinned to zero, so clipping preserves symmetry.
    """
    _check_mode(mode)
    if not eps > 0:
        raise ValueError("eps must be positive")
    X_prev = np.asarray(X_prev, dtype=float)
    if mode == CUTMATCH:
        lo = -np.minimum(X_prev, X_prev.T) / eps
        hi = (1.0 - np.maximum(X_prev, X_prev.T)) / eps
        np.fill_diagonal(lo, 0.0)
        np.fill_diagonal(hi, 0.0)
    else:
        lo = -X_prev / eps
        hi = (1.0 - X_prev) / eps
    if np.any(lo > hi + 1e-12):
        raise AssertionError("empty clamp interval: X_prev is outside [0, 1]")
    return np.ascontiguousarray(lo), np.ascontiguousarray(np.maximum(hi, lo))


def truncate_c2(V, X_prev, eps, mode):
    """Clip ``V`` to the box keeping ``X_prev + eps * V`` inside ``[0, 1]``."""
    lo, hi = direction_bounds(X_prev, eps, mode)
    return np.clip(np.asarray(V, dtype=float), lo, hi)


def project_direction(U, X_prev, eps, mode, tol=1e-8, max_proj=1000, method="newton"):
    """Find an ascent direction ``V`` near ``U`` that keeps the update feasible.

    ``method`` selects how the two constraint sets are combined:

    ``"alternate"``
        plain alternation of centering and box truncation until the largest
        elementwise change between sweeps is at most ``tol``. Its limit is a
        feasible point but not, in general, the projection of ``U``.
    ``"dykstra"``
        the same sweeps with Dykstra's correction increments; converges to the
        Euclidean projection of ``U`` (slowly).
    ``"newton"``
        the Euclidean projection computed by semismooth Newton on the
        multipliers of the sum constraints, followed by an exact repair of
        the remaining sum residual. Usually converges in a handful of
        iterations; on degenerate boxes the repair may leave the result a
        rounding-sized distance outside the box.
    """
    _check_mode(mode)
    U = np.asarray(U, dtype=float)
    if mode == CUTMATCH and np.abs(U - U.T).max() > 1e-9 * max(1.0, np.abs(U).max()):
        raise ValueError("cutmatch mode needs a symmetrized U")
    lo, hi = direction_bounds(X_prev, eps, mode)
    symmetric = mode == CUTMATCH
    if method == "newton":
        V, iters, converged = kernels.newton_direction(
            U, lo, hi, NEWTON_TOL, NEWTON_MAX_ITER, symmetric
        )
        if symmetric:
            V = 0.5 * (V + V.T)
        # Newton leaves sum residuals near rounding level (larger after a
        # degenerate stall); remove them exactly so they cannot accumulate in X
        V = kernels.repair_sums(V, symmetric)
    elif method in ("alternate", "dykstra"):
        V, iters, converged = kernels.alternate_direction(
            np.ascontiguousarray(U), lo, hi, tol, max_proj, method == "dykstra"
        )
        if symmetric:
            V = 0.5 * (V + V.T)
    else:
        raise ValueError(f"unknown projection method {method!r}")
    return DirectionResult(V, int(iters), bool(converged))


def centering_matrix(n):
    """``I - 11^T / n``, its own Moore-Penrose pseudo-inverse."""
    return np.eye(n) - np.full((n, n), 1.0 / n)

"""Pure numpy versions of the hot loops.

Mirrors ``_kernels.pyx`` call for call; used when the extension is not built
or when ``CUTMATCH_PURE_PYTHON=1``.
"""

import numpy as np

STALL_ITERS = 4
STALL_TOL = 1e-8


def center(V):
    """Subtract row and column means and add back the grand mean."""
    return V - V.mean(axis=1, keepdims=True) - V.mean(axis=0, keepdims=True) + V.mean()


def alternate_direction(U, lo, hi, tol, max_iter, dykstra):
    """Alternate centering and box clipping starting from ``U``.

    Returns ``(V, sweeps, converged)``. ``V`` always lies inside ``[lo, hi]``.
    With ``dykstra`` the correction increments are carried so the limit is
    the Euclidean projection of ``U`` onto the intersection.
    """
    V = np.array(U, dtype=float, copy=True)
    p = np.zeros_like(V)
    q = np.zeros_like(V)
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        prev = V
        if dykstra:
            Y = center(V + p)
            p = V + p - Y
            V = np.clip(Y + q, lo, hi)
            q = Y + q - V
            gap = np.abs(V - Y).max()
        else:
            Y = center(V)
            V = np.clip(Y, lo, hi)
            gap = 0.0
        if np.abs(V - prev).max() <= tol and gap <= tol:
            converged = True
            break
    return V, sweeps, converged


def bregman_zero_diag(X, tol, max_iter):
    """Alternate the affine doubly-stochastic projection with ramp + zero diagonal.

    Returns ``(X, iters, converged, residuals)`` where ``residuals[k]`` is the
    Frobenius distance moved by the ramp/diagonal step in sweep ``k``.
    """
    X = np.array(X, dtype=float, copy=True)
    n = X.shape[0]
    residuals = []
    converged = False
    iters = 0
    for iters in range(1, max_iter + 1):
        Y = center(X) + 1.0 / n
        X = np.maximum(Y, 0.0)
        np.fill_diagonal(X, 0.0)
        residuals.append(float(np.sqrt(((X - Y) ** 2).sum())))
        viol = max(np.abs(X.sum(axis=1) - 1.0).max(), np.abs(X.sum(axis=0) - 1.0).max())
        if viol <= tol:
            converged = True
            break
    return X, iters, converged, np.asarray(residuals)


def _dual_direction(U, lo, hi, mu, symmetric):
    n = U.shape[0]
    if symmetric:
        shift = 0.5 * (mu[:, None] + mu[None, :])
    else:
        shift = mu[:n, None] + mu[None, n:]
    Z = U + shift
    V = np.clip(Z, lo, hi)
    free = (Z > lo) & (Z < hi)
    if symmetric:
        F = V.sum(axis=1)
    else:
        F = np.concatenate([V.sum(axis=1), V.sum(axis=0)])
    # dual value of  min 0.5||V - U||^2 - <shift, V>  over the box
    dual = 0.5 * ((V - U) ** 2).sum() - (shift * V).sum()
    return V, F, free, dual


def exact_line_search(U, lo, hi, mu, d, symmetric, cap=np.inf):
    """Maximize the dual along ``mu + s*d`` over ``0 <= s <= cap`` exactly.

    Every entry ``Z_ij`` moves linearly in ``s`` and its clipped value is
    piecewise linear, so the directional derivative is piecewise linear and
    nonincreasing; its root is found by sweeping the sorted kinks.
    """
    n = U.shape[0]
    if symmetric:
        Z = U + 0.5 * (mu[:, None] + mu[None, :])
        c = 0.5 * (d[:, None] + d[None, :])
    else:
        Z = U + mu[:n, None] + mu[None, n:]
        c = d[:n, None] + d[None, n:]
    # g(s) = sum clip(Z + s c) * c is minus the dual slope; it is nondecreasing
    g0 = float((np.clip(Z, lo, hi) * c).sum())
    if g0 >= 0:
        return 0.0
    live = (hi > lo) & (c != 0)
    Zl, cl, lol, hil = Z[live], c[live], lo[live], hi[live]
    t1 = (lol - Zl) / cl
    t2 = (hil - Zl) / cl
    enter = np.minimum(t1, t2)
    leave = np.maximum(t1, t2)
    w = cl * cl
    slope = float(w[(enter < 0) & (leave > 0)].sum())
    times = np.concatenate([enter, leave])
    deltas = np.concatenate([w, -w])
    keep = (times > 0) & (times < cap)
    times, deltas = times[keep], deltas[keep]
    order = np.argsort(times, kind="stable")
    times, deltas = times[order], deltas[order]
    # slope on the segment ending at each kink, and g at each kink
    slopes = slope + np.concatenate([[0.0], np.cumsum(deltas)])
    seg = np.diff(np.concatenate([[0.0], times]))
    g_at = g0 + np.cumsum(slopes[:-1] * seg)
    hit = np.flatnonzero(g_at >= 0)
    if hit.size:
        k = hit[0]
        s_prev = times[k - 1] if k else 0.0
        g_prev = g_at[k - 1] if k else g0
        return s_prev - g_prev / slopes[k]
    s_last = times[-1] if times.size else 0.0
    g_last = g_at[-1] if times.size else g0
    if slopes[-1] > 0:
        return min(s_last - g_last / slopes[-1], cap)
    return cap if np.isfinite(cap) else s_last


def null_signs(free, symmetric):
    """Basis of the Jacobian null space, read off the free-entry graph.

    Nodes are rows (``symmetric``) or rows then columns; entry ``(i, j)`` free
    links ``i`` with ``j`` (or ``n + j``). Each bipartite connected component
    (isolated nodes included) spans one null vector, ``+1`` on one side and
    ``-1`` on the other. Returns ``(comp, sign, bipartite)`` per node: the
    component id, the side sign, and whether that component is bipartite.
    """
    n = free.shape[0]
    m = n if symmetric else 2 * n
    comp = np.full(m, -1)
    sign = np.zeros(m)
    bip = []
    for root in range(m):
        if comp[root] >= 0:
            continue
        cid = len(bip)
        ok = True
        comp[root] = cid
        sign[root] = 1.0
        stack = [root]
        while stack:
            u = stack.pop()
            if symmetric:
                nbrs = np.flatnonzero(free[u])
            elif u < n:
                nbrs = np.flatnonzero(free[u]) + n
            else:
                nbrs = np.flatnonzero(free[:, u - n])
            for v in nbrs:
                if comp[v] < 0:
                    comp[v] = cid
                    sign[v] = -sign[u]
                    stack.append(v)
                elif sign[v] == sign[u]:
                    ok = False
        bip.append(ok)
    return comp, sign, np.asarray(bip)[comp]


def _split_residual(J, F, free, symmetric):
    """Newton step on the part of ``F`` in the range of ``J`` and the part
    ``p`` in its null space. ``J`` is made definite by adding the identity on
    the null space, which leaves the range solution unchanged."""
    comp, sign, bip = null_signs(free, symmetric)
    p = np.zeros_like(F)
    Jd = J.copy()
    for c in np.unique(comp[bip]):
        idx = np.flatnonzero(comp == c)
        v = sign[idx]
        p[idx] = v * (v @ F[idx]) / len(idx)
        Jd[np.ix_(idx, idx)] += np.outer(v, v) / len(idx)
    step = np.linalg.solve(Jd, F - p)
    return step, p


def newton_direction(U, lo, hi, tol, max_iter, symmetric):
    """Euclidean projection of ``U`` onto {zero row/col sums} within a box.

    Semismooth Newton on the dual multipliers of the sum constraints, with an
    exact line search on the (concave, piecewise quadratic) dual. The
    generalized Jacobian is singular whenever the free entries form a
    bipartite pattern, which is common once ``X`` is near a permutation; when
    most of the residual lies in that null space the iteration moves along it
    instead. ``symmetric`` selects one multiplier vector shared by rows and columns
    (``U``, ``lo``, ``hi`` symmetric). Returns ``(V, iterations, converged)``.
    """
    U = np.asarray(U, dtype=float)
    n = U.shape[0]
    if symmetric:
        # unconstrained-box optimum of the multipliers as warm start
        r = U.sum(axis=1)
        mu = -(2.0 / n) * (r - r.sum() / (2.0 * n))
    else:
        r = U.sum(axis=1)
        c = U.sum(axis=0)
        g = U.sum()
        mu = np.concatenate([-(r - g / (2 * n)) / n, -(c - g / (2 * n)) / n])
    V, F, free, dual = _dual_direction(U, lo, hi, mu, symmetric)
    scale = max(1.0, np.abs(U).max())
    converged = False
    it = 0
    best = np.inf
    since_best = 0
    for it in range(1, max_iter + 1):
        res = np.abs(F).max()
        if res <= tol * scale:
            converged = True
            break
        if res < 0.5 * best:
            best, since_best = res, 0
        else:
            since_best += 1
            if since_best >= STALL_ITERS and res <= STALL_TOL * scale:
                # degenerate multipliers: what is left is rounding dust that
                # the caller removes with repair_sums
                converged = True
                break
        a = free.astype(float)
        if symmetric:
            J = 0.5 * (np.diag(a.sum(axis=1)) + a)
        else:
            J = np.block([[np.diag(a.sum(axis=1)), a], [a.T, np.diag(a.sum(axis=0))]])
        step, p = _split_residual(J, F, free, symmetric)
        if np.linalg.norm(p) > 0.5 * np.linalg.norm(F):
            # most of the residual lies where the Jacobian is blind (rows with
            # no free entry, bipartite free patterns): move along it exactly
            mu = mu - exact_line_search(U, lo, hi, mu, -p, symmetric) * p
            V, F, free, dual = _dual_direction(U, lo, hi, mu, symmetric)
            continue
        t = exact_line_search(U, lo, hi, mu, -step, symmetric, cap=1.0)
        mu = mu - t * step
        V, F, free, dual = _dual_direction(U, lo, hi, mu, symmetric)
    else:
        converged = np.abs(F).max() <= tol * scale
    return V, it, bool(converged)


def repair_sums(V, symmetric):
    """Smallest change making the row (and column) sums of ``V`` exactly zero.

    ``symmetric``: the change is symmetric with zero diagonal, so a symmetric
    zero-diagonal ``V`` keeps both properties. Otherwise plain double centering.
    """
    if not symmetric:
        return center(V)
    n = V.shape[0]
    if n <= 2:
        return np.zeros_like(V)
    r = V.sum(axis=1)
    s = r.sum() / (n - 1)
    nu = (2.0 * r - s) / (n - 2)
    D = 0.5 * (nu[:, None] + nu[None, :])
    np.fill_diagonal(D, 0.0)
    return V - D

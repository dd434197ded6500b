# cython: language_level=3
"""Compiled versions of the hot loops in ``_kernels_py``.

Same signatures and return values; all arrays are C-contiguous float64.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, fabs, sqrt
from libc.stdlib cimport free as c_free, malloc, qsort

from ._kernels_py import STALL_ITERS as _STALL_ITERS, STALL_TOL as _STALL_TOL

cdef int STALL_ITERS = _STALL_ITERS
cdef double STALL_TOL = _STALL_TOL

cnp.import_array()


cdef void _center(double[:, ::1] src, double[:, ::1] dst,
                  double[::1] rmean, double[::1] cmean) noexcept nogil:
    cdef Py_ssize_t n = src.shape[0], m = src.shape[1], i, j
    cdef double g = 0.0, s
    for j in range(m):
        cmean[j] = 0.0
    for i in range(n):
        s = 0.0
        for j in range(m):
            s += src[i, j]
            cmean[j] += src[i, j]
        rmean[i] = s / m
        g += s
    for j in range(m):
        cmean[j] /= n
    g /= n * m
    for i in range(n):
        for j in range(m):
            dst[i, j] = src[i, j] - rmean[i] - cmean[j] + g


def center(V):
    cdef double[:, ::1] src = np.ascontiguousarray(V, dtype=np.float64)
    out = np.empty_like(np.asarray(src))
    cdef double[:, ::1] dst = out
    cdef double[::1] rmean = np.empty(src.shape[0])
    cdef double[::1] cmean = np.empty(src.shape[1])
    with nogil:
        _center(src, dst, rmean, cmean)
    return out


def alternate_direction(U, lo, hi, double tol, int max_iter, bint dykstra):
    cdef double[:, ::1] lo_v = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[:, ::1] hi_v = np.ascontiguousarray(hi, dtype=np.float64)
    out = np.array(U, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] V = out
    cdef Py_ssize_t n = V.shape[0], m = V.shape[1], i, j
    cdef double[:, ::1] Y = np.empty((n, m))
    cdef double[:, ::1] T = np.empty((n, m))
    cdef double[:, ::1] p = np.zeros((n, m))
    cdef double[:, ::1] q = np.zeros((n, m))
    cdef double[::1] rmean = np.empty(n)
    cdef double[::1] cmean = np.empty(m)
    cdef double change, gap, v, w
    cdef int sweeps = 0
    cdef bint converged = False

    with nogil:
        while sweeps < max_iter:
            sweeps += 1
            change = 0.0
            gap = 0.0
            if dykstra:
                for i in range(n):
                    for j in range(m):
                        T[i, j] = V[i, j] + p[i, j]
                _center(T, Y, rmean, cmean)
                for i in range(n):
                    for j in range(m):
                        p[i, j] = T[i, j] - Y[i, j]
                        w = Y[i, j] + q[i, j]
                        v = w
                        if v < lo_v[i, j]:
                            v = lo_v[i, j]
                        elif v > hi_v[i, j]:
                            v = hi_v[i, j]
                        q[i, j] = w - v
                        if fabs(v - V[i, j]) > change:
                            change = fabs(v - V[i, j])
                        if fabs(v - Y[i, j]) > gap:
                            gap = fabs(v - Y[i, j])
                        V[i, j] = v
            else:
                _center(V, Y, rmean, cmean)
                for i in range(n):
                    for j in range(m):
                        v = Y[i, j]
                        if v < lo_v[i, j]:
                            v = lo_v[i, j]
                        elif v > hi_v[i, j]:
                            v = hi_v[i, j]
                        if fabs(v - V[i, j]) > change:
                            change = fabs(v - V[i, j])
                        V[i, j] = v
            if change <= tol and gap <= tol:
                converged = True
                break
    return out, sweeps, converged


def bregman_zero_diag(X, double tol, int max_iter):
    out = np.array(X, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] A = out
    cdef Py_ssize_t n = A.shape[0], i, j
    cdef double[:, ::1] Y = np.empty((n, n))
    cdef double[::1] rmean = np.empty(n)
    cdef double[::1] cmean = np.empty(n)
    cdef double[::1] rsum = np.empty(n)
    cdef double[::1] csum = np.empty(n)
    res_arr = np.zeros(max(max_iter, 1))
    cdef double[::1] residuals = res_arr
    cdef double inv_n = 1.0 / n, v, d, viol, s
    cdef int iters = 0
    cdef bint converged = False

    with nogil:
        while iters < max_iter:
            _center(A, Y, rmean, cmean)
            s = 0.0
            for j in range(n):
                csum[j] = 0.0
            for i in range(n):
                rsum[i] = 0.0
                for j in range(n):
                    v = Y[i, j] + inv_n
                    if i == j or v < 0.0:
                        d = v
                        v = 0.0
                        s += d * d
                    A[i, j] = v
                    rsum[i] += v
                    csum[j] += v
            residuals[iters] = sqrt(s)
            iters += 1
            viol = 0.0
            for i in range(n):
                if fabs(rsum[i] - 1.0) > viol:
                    viol = fabs(rsum[i] - 1.0)
                if fabs(csum[i] - 1.0) > viol:
                    viol = fabs(csum[i] - 1.0)
            if viol <= tol:
                converged = True
                break
    return out, iters, converged, res_arr[:iters].copy()


ctypedef struct Kink:
    double t
    double dw


cdef int _cmp_kink(const void* a, const void* b) noexcept nogil:
    cdef double ta = (<const Kink*>a).t, tb = (<const Kink*>b).t
    return (ta > tb) - (ta < tb)


cdef double _dual_direction(double[:, ::1] U, double[:, ::1] lo, double[:, ::1] hi,
                            double[::1] mu, bint symmetric, double[:, ::1] V,
                            unsigned char[:, ::1] free, double[::1] F) noexcept nogil:
    cdef Py_ssize_t n = U.shape[0], i, j
    cdef double s, z, v, u, dual = 0.0
    for i in range(F.shape[0]):
        F[i] = 0.0
    for i in range(n):
        for j in range(n):
            if symmetric:
                s = 0.5 * (mu[i] + mu[j])
            else:
                s = mu[i] + mu[n + j]
            u = U[i, j]
            z = u + s
            if z <= lo[i, j]:
                v = lo[i, j]
                free[i, j] = 0
            elif z >= hi[i, j]:
                v = hi[i, j]
                free[i, j] = 0
            else:
                v = z
                free[i, j] = 1
            V[i, j] = v
            dual += 0.5 * (v - u) * (v - u) - s * v
            F[i] += v
            if not symmetric:
                F[n + j] += v
    return dual


cdef double _line_search(double[:, ::1] U, double[:, ::1] lo, double[:, ::1] hi,
                         double[::1] mu, double[::1] d, bint symmetric,
                         double cap, Kink* kinks) noexcept nogil:
    # exact maximizer of the dual along mu + s*d, 0 <= s <= cap (see _kernels_py)
    cdef Py_ssize_t n = U.shape[0], i, j, nk = 0, k
    cdef double z, c, v, g = 0.0, slope = 0.0, t1, t2, a, b, w, s_prev, g_next
    for i in range(n):
        for j in range(n):
            if symmetric:
                z = U[i, j] + 0.5 * (mu[i] + mu[j])
                c = 0.5 * (d[i] + d[j])
            else:
                z = U[i, j] + mu[i] + mu[n + j]
                c = d[i] + d[n + j]
            v = z
            if v < lo[i, j]:
                v = lo[i, j]
            elif v > hi[i, j]:
                v = hi[i, j]
            g += v * c
            if hi[i, j] > lo[i, j] and c != 0.0:
                t1 = (lo[i, j] - z) / c
                t2 = (hi[i, j] - z) / c
                a = t1 if t1 < t2 else t2
                b = t2 if t1 < t2 else t1
                w = c * c
                if a < 0.0 and b > 0.0:
                    slope += w
                if a > 0.0 and a < cap:
                    kinks[nk].t = a
                    kinks[nk].dw = w
                    nk += 1
                if b > 0.0 and b < cap:
                    kinks[nk].t = b
                    kinks[nk].dw = -w
                    nk += 1
    if g >= 0.0:
        return 0.0
    qsort(kinks, nk, sizeof(Kink), _cmp_kink)
    s_prev = 0.0
    for k in range(nk):
        g_next = g + slope * (kinks[k].t - s_prev)
        if g_next >= 0.0:
            return s_prev - g / slope
        s_prev = kinks[k].t
        g = g_next
        slope += kinks[k].dw
    if slope > 0.0:
        t1 = s_prev - g / slope
        return t1 if t1 < cap else cap
    return cap if cap < INFINITY else s_prev


cdef void _jacobian(unsigned char[:, ::1] free, bint symmetric, double[:, ::1] J) noexcept nogil:
    cdef Py_ssize_t n = free.shape[0], m = J.shape[0], i, j
    for i in range(m):
        for j in range(m):
            J[i, j] = 0.0
    for i in range(n):
        for j in range(n):
            if free[i, j]:
                if symmetric:
                    J[i, i] += 0.5
                    J[i, j] += 0.5
                else:
                    J[i, i] += 1.0
                    J[n + j, n + j] += 1.0
                    J[i, n + j] += 1.0
                    J[n + j, i] += 1.0


cdef void _psd_solve(double[:, ::1] J, double[::1] b, double[::1] x,
                     double[::1] z, unsigned char[::1] skip) noexcept nogil:
    # Cholesky of a PSD matrix, dropping pivots that are numerically zero;
    # dropped unknowns get a zero step. Overwrites J.
    cdef Py_ssize_t m = J.shape[0], i, j, k
    cdef double piv, dmax = 0.0, thr
    for k in range(m):
        if J[k, k] > dmax:
            dmax = J[k, k]
    thr = 1e-10 * (dmax if dmax > 1.0 else 1.0)
    for k in range(m):
        if J[k, k] <= thr:
            skip[k] = 1
            for i in range(k, m):
                J[i, k] = 0.0
            continue
        skip[k] = 0
        piv = sqrt(J[k, k])
        J[k, k] = piv
        for i in range(k + 1, m):
            J[i, k] /= piv
        for j in range(k + 1, m):
            if J[j, k] != 0.0:
                for i in range(j, m):
                    J[i, j] -= J[i, k] * J[j, k]
    for i in range(m):
        if skip[i]:
            z[i] = 0.0
            continue
        piv = b[i]
        for k in range(i):
            piv -= J[i, k] * z[k]
        z[i] = piv / J[i, i]
    for i in range(m - 1, -1, -1):
        if skip[i]:
            x[i] = 0.0
            continue
        piv = z[i]
        for k in range(i + 1, m):
            piv -= J[k, i] * x[k]
        x[i] = piv / J[i, i]


cdef void _null_split(unsigned char[:, ::1] free, bint symmetric, double[:, ::1] J,
                      double[::1] F, double[::1] p, Py_ssize_t[::1] comp,
                      double[::1] sign, Py_ssize_t[::1] stack,
                      unsigned char[::1] bip, Py_ssize_t[::1] size,
                      double[::1] proj) noexcept nogil:
    # two-colour the free-entry graph; each bipartite component gives a null
    # vector of J. Writes the null part of F into p and adds the identity on
    # the null space to J (see _kernels_py._split_residual).
    cdef Py_ssize_t n = free.shape[0], m = F.shape[0], root, u, v, k, top, ncomp = 0
    cdef Py_ssize_t lo_k, hi_k, i, j
    for u in range(m):
        comp[u] = -1
    for root in range(m):
        if comp[root] >= 0:
            continue
        bip[ncomp] = 1
        size[ncomp] = 0
        proj[ncomp] = 0.0
        comp[root] = ncomp
        sign[root] = 1.0
        stack[0] = root
        top = 1
        while top > 0:
            top -= 1
            u = stack[top]
            size[ncomp] += 1
            if symmetric:
                lo_k = 0
                hi_k = n
            elif u < n:
                lo_k = n
                hi_k = 2 * n
            else:
                lo_k = 0
                hi_k = n
            for v in range(lo_k, hi_k):
                if symmetric:
                    if not free[u, v]:
                        continue
                elif u < n:
                    if not free[u, v - n]:
                        continue
                else:
                    if not free[v, u - n]:
                        continue
                if comp[v] < 0:
                    comp[v] = ncomp
                    sign[v] = -sign[u]
                    stack[top] = v
                    top += 1
                elif sign[v] == sign[u]:
                    bip[ncomp] = 0
        ncomp += 1
    for u in range(m):
        proj[comp[u]] += sign[u] * F[u]
    for u in range(m):
        k = comp[u]
        if bip[k]:
            p[u] = sign[u] * proj[k] / size[k]
        else:
            p[u] = 0.0
    for i in range(m):
        if not bip[comp[i]]:
            continue
        for j in range(m):
            if comp[j] == comp[i]:
                J[i, j] += sign[i] * sign[j] / size[comp[i]]


cdef double _maxabs(double[::1] a) noexcept nogil:
    cdef double r = 0.0
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        if fabs(a[i]) > r:
            r = fabs(a[i])
    return r


cdef double _norm(double[::1] a) noexcept nogil:
    cdef double r = 0.0
    cdef Py_ssize_t i
    for i in range(a.shape[0]):
        r += a[i] * a[i]
    return sqrt(r)


def newton_direction(U, lo, hi, double tol, int max_iter, bint symmetric):
    cdef double[:, ::1] U_v = np.ascontiguousarray(U, dtype=np.float64)
    cdef double[:, ::1] lo_v = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[:, ::1] hi_v = np.ascontiguousarray(hi, dtype=np.float64)
    cdef Py_ssize_t n = U_v.shape[0], m = n if symmetric else 2 * n, i, j
    out = np.empty((n, n))
    cdef double[:, ::1] V = out
    cdef unsigned char[:, ::1] free = np.empty((n, n), dtype=np.uint8)
    cdef unsigned char[::1] skip = np.empty(m, dtype=np.uint8)
    cdef double[:, ::1] J = np.empty((m, m))
    cdef double[::1] mu = np.empty(m)
    cdef double[::1] F = np.empty(m)
    cdef double[::1] step = np.empty(m)
    cdef double[::1] p = np.empty(m)
    cdef double[::1] work = np.empty(m)
    cdef Py_ssize_t[::1] comp = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t[::1] stack = np.empty(m, dtype=np.intp)
    cdef Py_ssize_t[::1] size = np.empty(m, dtype=np.intp)
    cdef unsigned char[::1] bip = np.empty(m, dtype=np.uint8)
    cdef double[::1] sign = np.empty(m)
    cdef double[::1] proj = np.empty(m)
    cdef double[::1] rhs = np.empty(m)
    cdef double[::1] r = np.zeros(n)
    cdef double[::1] c = np.zeros(n)
    cdef double g = 0.0, scale = 1.0, res, best = INFINITY, t
    cdef int it = 0, since_best = 0
    cdef bint converged = False
    cdef Kink* kinks = <Kink*>malloc(2 * n * n * sizeof(Kink))
    if kinks == NULL:
        raise MemoryError()

    try:
        with nogil:
            for i in range(n):
                for j in range(n):
                    r[i] += U_v[i, j]
                    c[j] += U_v[i, j]
                    if fabs(U_v[i, j]) > scale:
                        scale = fabs(U_v[i, j])
                    g += U_v[i, j]
            # unconstrained-box optimum of the multipliers as warm start
            for i in range(n):
                if symmetric:
                    mu[i] = -(2.0 / n) * (r[i] - g / (2.0 * n))
                else:
                    mu[i] = -(r[i] - g / (2.0 * n)) / n
                    mu[n + i] = -(c[i] - g / (2.0 * n)) / n
            _dual_direction(U_v, lo_v, hi_v, mu, symmetric, V, free, F)
            while it < max_iter:
                it += 1
                res = _maxabs(F)
                if res <= tol * scale:
                    converged = True
                    break
                if res < 0.5 * best:
                    best = res
                    since_best = 0
                else:
                    since_best += 1
                    if since_best >= STALL_ITERS and res <= STALL_TOL * scale:
                        converged = True
                        break
                _jacobian(free, symmetric, J)
                _null_split(free, symmetric, J, F, p, comp, sign, stack, bip, size, proj)
                for i in range(m):
                    rhs[i] = F[i] - p[i]
                _psd_solve(J, rhs, step, work, skip)
                if _norm(p) > 0.5 * _norm(F):
                    for i in range(m):
                        work[i] = -p[i]
                    t = _line_search(U_v, lo_v, hi_v, mu, work, symmetric, INFINITY, kinks)
                    for i in range(m):
                        mu[i] -= t * p[i]
                else:
                    for i in range(m):
                        work[i] = -step[i]
                    t = _line_search(U_v, lo_v, hi_v, mu, work, symmetric, 1.0, kinks)
                    for i in range(m):
                        mu[i] -= t * step[i]
                _dual_direction(U_v, lo_v, hi_v, mu, symmetric, V, free, F)
            else:
                converged = _maxabs(F) <= tol * scale
    finally:
        c_free(kinks)
    return out, it, converged


def exact_line_search(U, lo, hi, mu, d, bint symmetric, double cap=INFINITY):
    cdef double[:, ::1] U_v = np.ascontiguousarray(U, dtype=np.float64)
    cdef double[:, ::1] lo_v = np.ascontiguousarray(lo, dtype=np.float64)
    cdef double[:, ::1] hi_v = np.ascontiguousarray(hi, dtype=np.float64)
    cdef double[::1] mu_v = np.ascontiguousarray(mu, dtype=np.float64)
    cdef double[::1] d_v = np.ascontiguousarray(d, dtype=np.float64)
    cdef Py_ssize_t n = U_v.shape[0]
    cdef Kink* kinks = <Kink*>malloc(2 * n * n * sizeof(Kink))
    cdef double t
    if kinks == NULL:
        raise MemoryError()
    try:
        t = _line_search(U_v, lo_v, hi_v, mu_v, d_v, symmetric, cap, kinks)
    finally:
        c_free(kinks)
    return t


def psd_solve(J, b):
    """Solve ``J x = b`` for PSD ``J``, skipping numerically zero pivots."""
    cdef double[:, ::1] Jc = np.array(J, dtype=np.float64, order="C", copy=True)
    cdef double[::1] bv = np.ascontiguousarray(b, dtype=np.float64)
    cdef Py_ssize_t m = Jc.shape[0]
    x = np.empty(m)
    cdef double[::1] xv = x
    cdef double[::1] z = np.empty(m)
    cdef unsigned char[::1] skip = np.empty(m, dtype=np.uint8)
    _psd_solve(Jc, bv, xv, z, skip)
    return x

"""Numba twins of the kernels in ``_kernels_numpy``.

Same signatures, same status codes.  The linear solves are a hand-rolled
LU with partial pivoting that reports failure through a flag instead of
raising, which keeps the frequency loop a single-exit body that numba can
parallelize, and keeps results independent of the thread count (no BLAS).
"""

import numpy as np
from numba import njit, prange

RESID_RTOL = 1e-8
DEGEN_RTOL = 1e-12

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_DEGENERATE = 2


@njit(cache=True)
def _lu_solve(a, b, out):
    # Gaussian elimination with partial pivoting on local copies.
    # Returns False on a zero pivot; out is valid only when True.
    n = a.shape[0]
    lu = a.copy()
    x = b.copy()
    for col in range(n):
        piv = col
        best = abs(lu[col, col])
        for row in range(col + 1, n):
            v = abs(lu[row, col])
            if v > best:
                best = v
                piv = row
        if best == 0.0:
            return False
        if piv != col:
            for c2 in range(n):
                tmp = lu[col, c2]
                lu[col, c2] = lu[piv, c2]
                lu[piv, c2] = tmp
            tmpb = x[col]
            x[col] = x[piv]
            x[piv] = tmpb
        pivval = lu[col, col]
        for row in range(col + 1, n):
            f = lu[row, col] / pivval
            lu[row, col] = 0.0
            for c2 in range(col + 1, n):
                lu[row, c2] -= f * lu[col, c2]
            x[row] -= f * x[col]
    for row in range(n - 1, -1, -1):
        acc = x[row]
        for c2 in range(row + 1, n):
            acc -= lu[row, c2] * out[c2]
        out[row] = acc / lu[row, row]
    return True


@njit(cache=True)
def _resid_ok(q, x, b):
    n = q.shape[0]
    rn = 0.0
    bn = 0.0
    for i in range(n):
        acc = -b[i]
        for j in range(n):
            acc += q[i, j] * x[j]
        rn += acc.real * acc.real + acc.imag * acc.imag
        bn += b[i].real * b[i].real + b[i].imag * b[i].imag
    return np.sqrt(rn) <= RESID_RTOL * np.sqrt(bn)


@njit(cache=True)
def _finite(x):
    for i in range(x.shape[0]):
        if not (np.isfinite(x[i].real) and np.isfinite(x[i].imag)):
            return False
    return True


@njit(cache=True)
def solve_status(q, b, loading, allow_load):
    """Solve q x = b; see the numpy twin for the status codes."""
    n = q.shape[0]
    x = np.zeros(n, np.complex128)
    if _lu_solve(q, b, x) and _finite(x) and _resid_ok(q, x, b):
        return x, 0
    if allow_load:
        tr = 0.0
        for i in range(n):
            tr += q[i, i].real
        load = loading * (tr / n)
        if load > 0.0:
            ql = q.copy()
            for i in range(n):
                ql[i, i] += load
            x2 = np.zeros(n, np.complex128)
            if _lu_solve(ql, b, x2) and _finite(x2):
                return x2, 1
    for i in range(n):
        x[i] = 0.0
    return x, 2


@njit(cache=True, parallel=True)
def constrained_sweep(r, yy, w, tvec, tpvec, mvec, pvec, ppvec,
                      omegas, omegas_p, loading, error_policy):
    """Njit twin of ``_kernels_numpy.constrained_sweep``."""
    k = omegas.shape[0]
    kp = omegas_p.shape[0]
    d = r.shape[0]
    s = yy.shape[1]
    filters = np.empty((k, kp, d), np.complex128)
    alphas = np.empty((k, kp), np.complex128)
    status = np.zeros((k, kp), np.int64)
    allow_load = (not error_policy) and loading > 0.0
    nan = complex(np.nan, np.nan)
    for flat in prange(k * kp):
        i = flat // kp
        j = flat % kp
        om = omegas[i]
        omp = omegas_p[j]
        g = np.zeros(d, np.complex128)
        for ss in range(s):
            ph = -(om * tvec[ss] + omp * tpvec[ss])
            wp = w[ss] * complex(np.cos(ph), np.sin(ph))
            for dd in range(d):
                g[dd] += yy[dd, ss] * wp
        a = np.empty(d, np.complex128)
        an = 0.0
        for dd in range(d):
            ph = om * pvec[dd] + omp * ppvec[dd]
            a[dd] = mvec[dd] * complex(np.cos(ph), np.sin(ph))
            an += a[dd].real * a[dd].real + a[dd].imag * a[dd].imag
        q = np.empty((d, d), np.complex128)
        for r1 in range(d):
            for c1 in range(d):
                q[r1, c1] = r[r1, c1] - g[r1] * g[c1].conjugate()
        for r1 in range(d):
            q[r1, r1] = complex(q[r1, r1].real, 0.0)
            for c1 in range(r1 + 1, d):
                v = 0.5 * (q[r1, c1] + q[c1, r1].conjugate())
                q[r1, c1] = v
                q[c1, r1] = v.conjugate()
        x, code = solve_status(q, a, loading, allow_load)
        ok = code != 2
        if ok:
            den = complex(0.0, 0.0)
            xn = 0.0
            for dd in range(d):
                den += a[dd].conjugate() * x[dd]
                xn += x[dd].real * x[dd].real + x[dd].imag * x[dd].imag
            if abs(den) <= DEGEN_RTOL * np.sqrt(an) * np.sqrt(xn):
                status[i, j] = STATUS_DEGENERATE
                ok = False
            else:
                alpha = complex(0.0, 0.0)
                for dd in range(d):
                    h = x[dd] / den
                    filters[i, j, dd] = h
                    alpha += h.conjugate() * g[dd]
                alphas[i, j] = alpha
        else:
            status[i, j] = STATUS_SINGULAR
        if not ok:
            alphas[i, j] = nan
            for dd in range(d):
                filters[i, j, dd] = nan
    return filters, alphas, status


@njit(cache=True)
def step2_normal_eqs(filters, alphas, okmask, x, known_mask, y_known, omegas):
    """Njit twin of ``_kernels_numpy.step2_normal_eqs``."""
    n = known_mask.shape[0]
    m = filters.shape[1]
    l = n - m + 1
    u = 0
    colmap = np.empty(n, np.int64)
    knownmap = np.empty(n, np.int64)
    nk = 0
    for c in range(n):
        if known_mask[c]:
            colmap[c] = -1
            knownmap[c] = nk
            nk += 1
        else:
            colmap[c] = u
            knownmap[c] = -1
            u += 1
    gram = np.zeros((u, u), np.complex128)
    rhs = np.zeros(u, np.complex128)
    if u == 0:
        return gram, rhs
    d = np.empty(l, np.complex128)
    for kbin in range(okmask.shape[0]):
        if not okmask[kbin]:
            continue
        om = omegas[kbin]
        for t in range(l):
            ph = om * t
            acc = alphas[kbin] * x[t] * complex(np.cos(ph), np.sin(ph))
            for j in range(m):
                c = t + j
                if known_mask[c]:
                    acc -= filters[kbin, j].conjugate() * y_known[knownmap[c]]
            d[t] = acc
        for t in range(l):
            for j1 in range(m):
                u1 = colmap[t + j1]
                if u1 < 0:
                    continue
                rhs[u1] += filters[kbin, j1] * d[t]
                for j2 in range(m):
                    u2 = colmap[t + j2]
                    if u2 >= 0:
                        gram[u1, u2] += filters[kbin, j1] * filters[kbin, j2].conjugate()
    return gram, rhs


@njit(cache=True)
def objective_value(filters, alphas, okmask, y_full, x, omegas):
    """Njit twin of ``_kernels_numpy.objective_value``."""
    m = filters.shape[1]
    l = y_full.shape[0] - m + 1
    total = 0.0
    for kbin in range(okmask.shape[0]):
        if not okmask[kbin]:
            continue
        om = omegas[kbin]
        for t in range(l):
            acc = complex(0.0, 0.0)
            for j in range(m):
                acc += filters[kbin, j].conjugate() * y_full[t + j]
            ph = om * t
            acc -= alphas[kbin] * x[t] * complex(np.cos(ph), np.sin(ph))
            total += acc.real * acc.real + acc.imag * acc.imag
    return total

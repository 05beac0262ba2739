"""Pure-numpy compute kernels.

Each public function here has an @njit twin in ``_kernels_numba`` with the
same signature and semantics; ``_backend.kernels()`` picks which module a
caller gets.  Keep the two in lockstep.

``constrained_sweep`` is the shared workhorse: it evaluates the closed-form
minimum of sum_s w_s |H* y_s - conj(w_s)/|w_s|^2 ...| -- concretely, for each
frequency pair (omega, omega') it forms

    g = sum_s w_s exp(-i(omega t_s + omega' t'_s)) y_s
    q = r - g g*
    a = mvec .* exp(i(omega pvec + omega' ppvec))
    h = q^{-1} a / (a* q^{-1} a),   alpha = h* g

The index vectors make the same code serve 1-D records (t'_s = 0), 2-D
records (t_s, t'_s enumerate the snapshot grid) and segmented records
(t_s = absolute anchor positions).
"""

import numpy as np

RESID_RTOL = 1e-8
DEGEN_RTOL = 1e-12

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_DEGENERATE = 2


def solve_status(q, b, loading, allow_load):
    """Solve q x = b, returning (x, code).

    code 0: plain solve met the residual test; 1: solved after adding
    relative diagonal loading; 2: failed (x is zeros).  The residual test
    gates only the plain solve: a loaded system is nonsingular whenever
    trace(q) > 0, and near-singular inputs cannot meet the plain bound in
    double precision no matter how the solve is carried out, so any finite
    loaded solution is the accepted regularized answer.
    """
    n = q.shape[0]
    bnorm = np.linalg.norm(b)
    x = _plain_solve(q, b)
    if x is not None and np.linalg.norm(q @ x - b) <= RESID_RTOL * bnorm:
        return x, 0
    if allow_load:
        load = loading * (np.trace(q).real / n)
        if load > 0.0:
            ql = q + load * np.eye(n)
            x2 = _plain_solve(ql, b)
            if x2 is not None:
                return x2, 1
    return np.zeros(n, dtype=np.complex128), 2


def _plain_solve(q, b):
    try:
        x = np.linalg.solve(q, b)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(x.view(np.float64))):
        return None
    return x


def _solve_batch(qs, bs):
    """Stacked plain solves with per-item residual acceptance."""
    k = bs.shape[0]
    try:
        xs = np.linalg.solve(qs, bs[..., None])[..., 0]
        finite = np.all(np.isfinite(xs.view(np.float64)), axis=1)
        xs[~finite] = 0.0
    except np.linalg.LinAlgError:
        xs = np.zeros_like(bs)
        finite = np.zeros(k, dtype=bool)
        for i in range(k):
            xi = _plain_solve(qs[i], bs[i])
            if xi is not None:
                xs[i] = xi
                finite[i] = True
    resid = np.linalg.norm(np.einsum("kij,kj->ki", qs, xs) - bs, axis=1)
    ok = finite & (resid <= RESID_RTOL * np.linalg.norm(bs, axis=1))
    return xs, ok


def constrained_sweep(r, yy, w, tvec, tpvec, mvec, pvec, ppvec,
                      omegas, omegas_p, loading, error_policy):
    """Closed-form constrained filters over a frequency-pair grid.

    r        (d, d)  Hermitian second-moment matrix of the snapshots
    yy       (d, s)  snapshot columns
    w        (s,)    normalized conjugate weights (reference or 1/L)
    tvec     (s,)    first-axis anchor of each snapshot, float64
    tpvec    (s,)    second-axis anchor of each snapshot
    mvec     (d,)    constraint modulation (reference window, or ones)
    pvec     (d,)    first-axis tap offset of each filter coefficient
    ppvec    (d,)    second-axis tap offset
    omegas   (k,)    first-axis frequencies, radians per sample
    omegas_p (kp,)   second-axis frequencies
    loading  float   relative diagonal loading for the retry solve
    error_policy bool  True forbids the loaded retry (record singular)

    Returns (filters (k, kp, d), alphas (k, kp), status (k, kp)).  Failed
    points carry NaN entries and a nonzero status code.
    """
    k = omegas.shape[0]
    kp = omegas_p.shape[0]
    d = r.shape[0]
    filters = np.full((k, kp, d), complex(np.nan, np.nan), dtype=np.complex128)
    alphas = np.full((k, kp), complex(np.nan, np.nan), dtype=np.complex128)
    status = np.zeros((k, kp), dtype=np.int64)
    allow_load = (not error_policy) and loading > 0.0
    for j in range(kp):
        omp = omegas_p[j]
        phases = np.exp(-1j * (np.outer(tvec, omegas) + (omp * tpvec)[:, None]))
        gs = (yy @ (w[:, None] * phases)).T
        avecs = mvec[None, :] * np.exp(
            1j * (np.outer(omegas, pvec) + (omp * ppvec)[None, :]))
        qs = r[None, :, :] - gs[:, :, None] * gs[:, None, :].conj()
        qs = 0.5 * (qs + np.swapaxes(qs, 1, 2).conj())
        xs, ok = _solve_batch(qs, avecs)
        for i in np.flatnonzero(~ok):
            if allow_load:
                xi, code = solve_status(qs[i], avecs[i], loading, True)
                if code != 2:
                    xs[i] = xi
                    ok[i] = True
        dens = np.einsum("kd,kd->k", avecs.conj(), xs)
        scale = np.linalg.norm(avecs, axis=1) * np.linalg.norm(xs, axis=1)
        for i in range(k):
            if not ok[i]:
                status[i, j] = STATUS_SINGULAR
                continue
            if np.abs(dens[i]) <= DEGEN_RTOL * scale[i]:
                status[i, j] = STATUS_DEGENERATE
                continue
            h = xs[i] / dens[i]
            filters[i, j] = h
            alphas[i, j] = h.conj() @ gs[i]
    return filters, alphas, status


def step2_normal_eqs(filters, alphas, okmask, x, known_mask, y_known, omegas):
    """Normal equations for the missing samples, accumulated bin-ascending.

    Returns (gram, rhs) with gram = sum_k B_k* B_k and rhs = sum_k B_k* d_k,
    where B_k holds the missing-sample columns of the k-th banded filter
    operator and d_k the per-bin target minus the known-sample contribution.
    """
    n = known_mask.shape[0]
    m = filters.shape[1]
    l = n - m + 1
    known_idx = np.flatnonzero(known_mask)
    miss_idx = np.flatnonzero(~known_mask)
    u = miss_idx.shape[0]
    gram = np.zeros((u, u), dtype=np.complex128)
    rhs = np.zeros(u, dtype=np.complex128)
    if u == 0:
        return gram, rhs
    rows = np.arange(l)[:, None]
    cols = rows + np.arange(m)[None, :]
    tphase = np.arange(l)
    for kbin in np.flatnonzero(okmask):
        op = np.zeros((l, n), dtype=np.complex128)
        op[rows, cols] = filters[kbin].conj()[None, :]
        zk = alphas[kbin] * x[:l] * np.exp(1j * omegas[kbin] * tphase)
        dk = zk - op[:, known_idx] @ y_known
        bk = op[:, miss_idx]
        gram += bk.conj().T @ bk
        rhs += bk.conj().T @ dk
    return gram, rhs


def objective_value(filters, alphas, okmask, y_full, x, omegas):
    """Sum over usable bins and snapshots of |H* Y(t) - alpha x_t e^{i w t}|^2."""
    m = filters.shape[1]
    l = y_full.shape[0] - m + 1
    win = np.lib.stride_tricks.sliding_window_view(y_full, m)
    idx = np.flatnonzero(okmask)
    if idx.shape[0] == 0:
        return 0.0
    filt = win @ filters[idx].conj().T
    tphase = np.arange(l)[:, None]
    targ = alphas[idx][None, :] * x[:l, None] * np.exp(
        1j * tphase * omegas[idx][None, :])
    return float(np.sum(np.abs(filt - targ) ** 2))

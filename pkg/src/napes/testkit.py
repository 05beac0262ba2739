"""Independent oracles and synthetic-signal generation.

The oracles here re-solve the constrained fit from scratch as a bordered
KKT system, on purpose sharing no code with the closed forms they check:
with theta = [conj(h); alpha], every residual h* Y(t) - alpha x_t e^{i w t}
is linear in theta, so the problem is an equality-constrained linear least
squares and stationarity plus feasibility give

    [ E^H E   -conj(c) ] [ theta  ]   [ 0 ]
    [ c^T        0     ] [ lambda ] = [ 1 ]

where row t of E is [Y(t)^T, -x_t e^{i w t}] and c = [a; 0] carries the
constraint vector a.  Everything is assembled with explicit loops.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystemError
from .gapped import SegmentedSignal

NOISE_KINDS = ("constant", "unit_modulus_random_phase", "given_sequence")


@dataclass(frozen=True)
class SinusoidSpec:
    """One component: amplitude (complex) at frequency omega in [0, 2*pi)."""

    amplitude: complex
    omega: float

    def __post_init__(self):
        a = complex(self.amplitude)
        if not (np.isfinite(a.real) and np.isfinite(a.imag) and np.isfinite(self.omega)):
            raise ValueError("amplitude and omega must be finite")
        if not 0.0 <= self.omega < 2.0 * np.pi:
            raise ValueError("omega must lie in [0, 2*pi)")


@dataclass(frozen=True)
class NoiseModel:
    """Reference-sequence model: constant ones, random unit-modulus phases
    seeded by `seed`, or a caller-supplied sequence."""

    kind: str
    seed: int = 0
    sequence: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"kind must be one of {NOISE_KINDS}")
        if self.kind == "given_sequence" and self.sequence is None:
            raise ValueError("given_sequence requires a sequence")


def _solve_bordered(e, c):
    d = c.shape[0]
    a = e.conj().T @ e
    kkt = np.zeros((d + 1, d + 1), dtype=np.complex128)
    kkt[:d, :d] = a
    kkt[:d, d] = -c.conj()
    kkt[d, :d] = c
    rhs = np.zeros(d + 1, dtype=np.complex128)
    rhs[d] = 1.0
    try:
        sol = np.linalg.solve(kkt, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError("bordered KKT matrix is singular") from exc
    if not np.all(np.isfinite(sol.view(np.float64))):
        raise SingularSystemError("bordered KKT solve returned non-finite values")
    theta = sol[:d]
    feas = abs(c @ theta - 1.0)
    if feas > 1e-10:
        raise SingularSystemError(f"constraint residual {feas:.3e} exceeds 1e-10")
    return theta


def kkt_oracle(yy, x, omega, m):
    """Constrained-fit oracle from snapshot columns yy (m rows).

    x is the reference sequence (length at least max(l, m)) or None for
    the unmodulated case.  Returns (h, alpha).  Raises SingularSystemError
    when the stacked system cannot be solved or feasibility fails.
    """
    yy = np.asarray(yy, dtype=np.complex128)
    l = yy.shape[1]
    if yy.shape[0] != m:
        raise ValueError(f"yy has {yy.shape[0]} rows, expected m={m}")
    xarr = None if x is None else np.asarray(x, dtype=np.complex128)
    e = np.zeros((l, m + 1), dtype=np.complex128)
    for t in range(l):
        for j in range(m):
            e[t, j] = yy[j, t]
        xt = 1.0 if xarr is None else xarr[t]
        e[t, m] = -xt * np.exp(1j * omega * t)
    c = np.zeros(m + 1, dtype=np.complex128)
    for j in range(m):
        xj = 1.0 if xarr is None else xarr[j]
        c[j] = xj * np.exp(1j * omega * j)
    theta = _solve_bordered(e, c)
    return theta[:m].conj(), complex(theta[m])


def kkt_oracle_2d(data, x, omega, omega_p, m, m_p):
    """2-D oracle from the raw (n, n') record; extraction is its own loops.

    Returns (h, alpha) with h the column-major flattened filter of length
    m * m'.  x is the (n, n') reference or None.
    """
    data = np.asarray(data, dtype=np.complex128)
    n, n_p = data.shape
    l = n - m + 1
    l_p = n_p - m_p + 1
    if l < 1 or l_p < 1:
        raise ValueError("window larger than the record")
    xarr = None if x is None else np.asarray(x, dtype=np.complex128)
    d = m * m_p
    e = np.zeros((l * l_p, d + 1), dtype=np.complex128)
    for tp in range(l_p):
        for t in range(l):
            s = t + tp * l
            for pp in range(m_p):
                for p in range(m):
                    e[s, p + pp * m] = data[t + p, tp + pp]
            xt = 1.0 if xarr is None else xarr[t, tp]
            e[s, d] = -xt * np.exp(1j * (omega * t + omega_p * tp))
    c = np.zeros(d + 1, dtype=np.complex128)
    for pp in range(m_p):
        for p in range(m):
            xj = 1.0 if xarr is None else xarr[p, pp]
            c[p + pp * m] = xj * np.exp(1j * (omega * p + omega_p * pp))
    theta = _solve_bordered(e, c)
    return theta[:d].conj(), complex(theta[d])


def fit_objective(yy, x, omega, h, alpha):
    """Plain-loop value of sum_t |h* Y(t) - alpha x_t e^{i omega t}|^2."""
    yy = np.asarray(yy, dtype=np.complex128)
    m, l = yy.shape
    xarr = None if x is None else np.asarray(x, dtype=np.complex128)
    total = 0.0
    for t in range(l):
        acc = 0.0 + 0.0j
        for j in range(m):
            acc += np.conj(h[j]) * yy[j, t]
        xt = 1.0 if xarr is None else xarr[t]
        acc -= alpha * xt * np.exp(1j * omega * t)
        total += abs(acc) ** 2
    return total


def fit_objective_2d(data, x, omega, omega_p, h, alpha, m, m_p):
    """2-D counterpart of fit_objective over all window anchors."""
    data = np.asarray(data, dtype=np.complex128)
    n, n_p = data.shape
    l = n - m + 1
    l_p = n_p - m_p + 1
    xarr = None if x is None else np.asarray(x, dtype=np.complex128)
    total = 0.0
    for tp in range(l_p):
        for t in range(l):
            acc = 0.0 + 0.0j
            for pp in range(m_p):
                for p in range(m):
                    acc += np.conj(h[p + pp * m]) * data[t + p, tp + pp]
            xt = 1.0 if xarr is None else xarr[t, tp]
            acc -= alpha * xt * np.exp(1j * (omega * t + omega_p * tp))
            total += abs(acc) ** 2
    return total


def project_constraint(h, a):
    """Nearest vector to h meeting a* h' = 1 (shift along a)."""
    a = np.asarray(a, dtype=np.complex128)
    h = np.asarray(h, dtype=np.complex128)
    return h + a * (1.0 - a.conj() @ h) / (a.conj() @ a)


def gen_signal(specs, noise_model, n, residual_snr_db, seed):
    """Synthesize y_t = sum_j a_j x_t e^{i omega_j t} + residual.

    The reference x comes from noise_model (its own seed field drives the
    random-phase kind); the residual is complex white noise scaled to the
    requested SNR relative to the clean component, drawn from a stream
    keyed on `seed`.  Returns (y, x), deterministic for fixed inputs.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if noise_model.kind == "constant":
        x = np.ones(n, dtype=np.complex128)
    elif noise_model.kind == "unit_modulus_random_phase":
        rng = np.random.default_rng([noise_model.seed, 0])
        x = np.exp(2j * np.pi * rng.random(n))
    else:
        x = np.asarray(noise_model.sequence, dtype=np.complex128)
        if x.shape != (n,):
            raise ValueError(f"given sequence has shape {x.shape}, expected ({n},)")
        x = x.copy()
    t = np.arange(n)
    clean = np.zeros(n, dtype=np.complex128)
    for spec in specs:
        clean += complex(spec.amplitude) * x * np.exp(1j * spec.omega * t)
    y = clean.copy()
    if residual_snr_db is not None:
        power = float(np.mean(np.abs(clean) ** 2))
        var = power * 10.0 ** (-residual_snr_db / 10.0)
        if var > 0.0:
            rng = np.random.default_rng([seed, 1])
            y = clean + np.sqrt(var / 2.0) * (
                rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return y, x


def drop_segments(y, gaps, x=None):
    """Mask out the listed (start, length) gaps of y as missing samples.

    Gaps must be in range and pairwise disjoint.  Returns a
    SegmentedSignal carrying the surviving samples (and x, if given).
    """
    y = np.asarray(y, dtype=np.complex128)
    n = y.shape[0]
    mask = np.ones(n, dtype=bool)
    taken = sorted((int(s), int(ln)) for s, ln in gaps)
    prev_end = 0
    for start, length in taken:
        if length < 1:
            raise ValueError(f"gap length {length} must be >= 1")
        if start < 0 or start + length > n:
            raise ValueError(f"gap [{start}, {start + length}) outside record of length {n}")
        if start < prev_end:
            raise ValueError("gaps overlap")
        prev_end = start + length
        mask[start:start + length] = False
    return SegmentedSignal.from_full(y, mask, x)

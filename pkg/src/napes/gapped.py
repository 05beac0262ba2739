"""Spectrum estimation and missing-sample recovery for gapped records.

A record with missing stretches is handled by cycling three steps:
(1) once, an initial spectrum built only from windows that avoid the gaps
(or from the zero-filled record when too few such windows exist); (2) a
least-squares fill of the missing samples given the current filter bank,
via the banded operators that realize t -> h* Y(t) as a matrix acting on
the record; (3) a fresh spectrum from the filled record.  Steps 2 and 3
each minimize the same separable objective

    J = sum_k sum_t | h_k* Y(t) - alpha_k x_t e^{i omega_k t} |^2

exactly in their own block of variables, so J is nonincreasing from the
second cycle on (the first cycle starts from an initializer built with
its own window length, which J does not measure).
"""

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import ZeroNoiseWindowError
from .linalg import DEFAULT_SOLVE, HermitianSolveConfig, hermitian_solve
from .snapshots import FrequencyGrid, SnapshotPlan
from .spectral1d import Spectrum1D, spectrum


@dataclass(frozen=True)
class SegmentedSignal:
    """A record of length n with a known/missing mask.

    mask[t] True means sample t is observed; y_known lists the observed
    values in index order.  x is the reference sequence over the full
    record (known everywhere, gaps or not); None means constant one.
    """

    mask: np.ndarray
    y_known: np.ndarray
    x: np.ndarray | None = None

    def __post_init__(self):
        mask = np.asarray(self.mask, dtype=bool)
        yk = np.asarray(self.y_known, dtype=np.complex128)
        if mask.ndim != 1 or mask.size == 0:
            raise ValueError("mask must be a nonempty 1-D bool array")
        if yk.shape != (int(mask.sum()),):
            raise ValueError(
                f"y_known has {yk.shape[0]} values for {int(mask.sum())} known positions")
        x = self.x
        if x is not None:
            x = np.asarray(x, dtype=np.complex128)
            if x.shape != mask.shape:
                raise ValueError("x must cover the full record")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "y_known", yk)
        object.__setattr__(self, "x", x)

    @classmethod
    def from_full(cls, y, mask, x=None):
        y = np.asarray(y, dtype=np.complex128)
        mask = np.asarray(mask, dtype=bool)
        if y.shape != mask.shape:
            raise ValueError("y and mask must have the same shape")
        return cls(mask=mask, y_known=y[mask], x=x)

    @property
    def n(self):
        return self.mask.size

    @property
    def n_missing(self):
        return int(self.n - self.mask.sum())

    def zero_filled(self):
        """Record with zeros in place of the missing samples."""
        return self.fill(np.zeros(self.n_missing, dtype=np.complex128))

    def fill(self, y_missing):
        """Full record with y_missing placed at the masked-out positions."""
        y_missing = np.asarray(y_missing, dtype=np.complex128)
        if y_missing.shape != (self.n_missing,):
            raise ValueError(f"expected {self.n_missing} missing values")
        out = np.empty(self.n, dtype=np.complex128)
        out[self.mask] = self.y_known
        out[~self.mask] = y_missing
        return out

    def known_runs(self):
        """Maximal (start, length) runs of known samples, in order."""
        runs = []
        start = None
        for t in range(self.n):
            if self.mask[t]:
                if start is None:
                    start = t
            elif start is not None:
                runs.append((start, t - start))
                start = None
        if start is not None:
            runs.append((start, self.n - start))
        return runs

    def segment_lengths(self):
        """Alternating known/missing run lengths.

        Zero-length known runs pad either end when the record starts or
        ends on a gap, so the list always starts and ends known and has
        odd length.
        """
        lengths = []
        known = bool(self.mask[0])
        count = 0
        for t in range(self.n):
            if bool(self.mask[t]) == known:
                count += 1
            else:
                lengths.append(count)
                known = not known
                count = 1
        lengths.append(count)
        if not bool(self.mask[0]):
            lengths.insert(0, 0)
        if not bool(self.mask[-1]):
            lengths.append(0)
        return lengths


@dataclass(frozen=True)
class GappedConfig:
    """Knobs of the cyclic reconstruction.

    m0 is the initialization window length, defaulting to floor(n/2);
    the working window m for the fill/re-estimate cycles defaults to m0
    (capped at floor(n/2)).  delta is the convergence threshold on the
    largest change of any amplitude or filled sample between cycles.
    """

    grid: FrequencyGrid
    m0: int | None = None
    m: int | None = None
    delta: float = 1e-6
    max_iter: int = 100
    solve_cfg: HermitianSolveConfig = field(default_factory=HermitianSolveConfig)

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError("delta must be > 0")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class ReconstructionResult:
    """Filled samples, final spectrum, and the per-cycle objective trace."""

    y_missing: np.ndarray
    spectrum: Spectrum1D
    objective_trace: np.ndarray
    iterations: int
    converged: bool


def feasibility(m0, segments):
    """True when gap-free windows outnumber the initialization length m0."""
    count = sum(max(0, length - m0 + 1) for _, length in segments.known_runs())
    return count > m0


def filter_operator(h, plan):
    """(l, n) banded matrix realizing t -> h* Y(t) on a length-n record.

    Row t carries conj(h) in columns t .. t+m-1, so op @ y stacks the
    filter outputs over all snapshots.
    """
    h = np.asarray(h, dtype=np.complex128)
    if h.shape != (plan.m,):
        raise ValueError(f"filter length {h.shape} does not match plan m={plan.m}")
    op = np.zeros((plan.l, plan.n), dtype=np.complex128)
    rows = np.arange(plan.l)[:, None]
    op[rows, rows + np.arange(plan.m)[None, :]] = h.conj()[None, :]
    return op


def target_vector(alpha, x, omega, l):
    """Per-snapshot targets alpha x_t e^{i omega t} for t = 0..l-1."""
    xl = np.ones(l, dtype=np.complex128) if x is None \
        else np.asarray(x, dtype=np.complex128)[:l]
    return alpha * xl * np.exp(1j * omega * np.arange(l))


def split_known_unknown(op, mask):
    """Columns of op at known positions and at missing positions."""
    mask = np.asarray(mask, dtype=bool)
    return op[:, mask], op[:, ~mask]


def init_step1a(segments, m0, grid, solve_cfg=DEFAULT_SOLVE):
    """Initial spectrum from snapshots that avoid every gap.

    Snapshots are anchored at each position t whose window [t, t+m0) lies
    inside a single known run.  Anchors keep their absolute position in
    the matched vector's phase and in the reference weights, so the
    amplitudes refer to the same time origin as the full-record
    estimator.  Requires feasibility(m0, segments).
    """
    if not feasibility(m0, segments):
        raise ValueError("not enough gap-free windows for this m0")
    anchors = []
    for start, length in segments.known_runs():
        anchors.extend(range(start, start + length - m0 + 1))
    anchors = np.asarray(anchors, dtype=np.int64)
    y0 = segments.zero_filled()
    yy = np.empty((m0, anchors.size), dtype=np.complex128)
    for s, t in enumerate(anchors):
        yy[:, s] = y0[t:t + m0]
    if segments.x is None:
        w = np.full(anchors.size, 1.0 / anchors.size, dtype=np.complex128)
        mvec = np.ones(m0, dtype=np.complex128)
        norm = 1.0 / anchors.size
    else:
        xa = segments.x[anchors]
        energy = float(np.sum(np.abs(xa) ** 2))
        if energy == 0.0:
            raise ZeroNoiseWindowError("reference has zero energy on the anchors")
        w = xa.conj() / energy
        mvec = segments.x[:m0].copy()
        norm = 1.0 / energy
    r = (yy @ yy.conj().T) * norm
    r = 0.5 * (r + r.conj().T)
    ker = kernels()
    filters, alphas, status = ker.constrained_sweep(
        r, yy, w, anchors.astype(np.float64), np.zeros(anchors.size),
        mvec, np.arange(m0, dtype=np.float64), np.zeros(m0),
        grid.omegas, np.zeros(1), solve_cfg.loading,
        solve_cfg.singular_policy == "error")
    return Spectrum1D(grid=grid, filters=filters[:, 0, :],
                      alphas=alphas[:, 0], status=status[:, 0])


def init_step1b(segments, grid, solve_cfg=DEFAULT_SOLVE):
    """Fallback initialization: zero-fill the gaps, estimate with m = n//2."""
    plan = SnapshotPlan.from_data_length(segments.n, max(1, segments.n // 2))
    return spectrum(segments.zero_filled(), segments.x, plan, grid, solve_cfg)


def estimate_missing(spec, segments, plan, solve_cfg=DEFAULT_SOLVE):
    """Least-squares fill of the missing samples for a fixed filter bank.

    Minimizes J over the missing values with the filters and amplitudes
    of spec held fixed; bins with nonzero status are excluded.  Solves
    (sum_k B_k* B_k) y_u = sum_k B_k* d_k with d_k the per-bin target
    minus the known-sample contribution, accumulated bin-ascending.
    Raises SingularMatrixError when the Gram sum cannot be solved under
    solve_cfg.
    """
    if plan.n != segments.n or plan.m != spec.filters.shape[1]:
        raise ValueError("plan inconsistent with the segments or the spectrum")
    if segments.n_missing == 0:
        return np.zeros(0, dtype=np.complex128)
    xarr = np.ones(segments.n, dtype=np.complex128) if segments.x is None \
        else segments.x
    ker = kernels()
    gram, rhs = ker.step2_normal_eqs(
        spec.filters, spec.alphas, spec.ok, xarr,
        segments.mask, segments.y_known, spec.grid.omegas)
    return hermitian_solve(gram, rhs, solve_cfg)


def reestimate(y_full, x, plan, grid, solve_cfg=DEFAULT_SOLVE):
    """Spectrum of the filled record (plain sweep; exists for loop symmetry)."""
    return spectrum(y_full, x, plan, grid, solve_cfg)


def objective(y_full, x, spec, plan):
    """J summed over the usable bins of spec against the filled record."""
    y_full = np.asarray(y_full, dtype=np.complex128)
    if plan.n != y_full.shape[0] or plan.m != spec.filters.shape[1]:
        raise ValueError("plan inconsistent with the record or the spectrum")
    xarr = np.ones(y_full.shape[0], dtype=np.complex128) if x is None \
        else np.asarray(x, dtype=np.complex128)
    ker = kernels()
    return ker.objective_value(spec.filters, spec.alphas, spec.ok,
                               y_full, xarr, spec.grid.omegas)


def _delta(old, new, yu_prev, yu):
    if np.any(old.ok != new.ok):
        return np.inf
    both = new.ok
    da = float(np.max(np.abs(new.alphas[both] - old.alphas[both]))) \
        if np.any(both) else np.inf
    if yu.size == 0:
        return da
    if yu_prev is None:
        return np.inf
    return max(da, float(np.max(np.abs(yu - yu_prev))))


def cyclic_optimize(segments, config):
    """Alternating reconstruction of a gapped record.

    Parameters
    ----------
    segments : SegmentedSignal (carries the reference sequence).
    config : GappedConfig; config.grid fixes the analyzed bins.

    Returns a ReconstructionResult.  objective_trace[c] is J right after
    the cycle-c re-estimation and is nonincreasing from the second entry
    on.  converged means the largest amplitude change and the largest
    filled-sample change both reached config.delta or less before
    max_iter; non-convergence is reported, not raised.
    """
    n = segments.n
    half = max(1, n // 2)
    m0 = config.m0 if config.m0 is not None else half
    if not 1 <= m0 <= n:
        raise ValueError(f"initialization window m0={m0} outside [1, {n}]")
    m = config.m if config.m is not None else min(m0, half)
    if not 1 <= m <= half:
        raise ValueError(f"working window m={m} outside [1, {half}]")
    plan = SnapshotPlan.from_data_length(n, m)
    if feasibility(m0, segments):
        spec = init_step1a(segments, m0, config.grid, config.solve_cfg)
    else:
        spec = init_step1b(segments, config.grid, config.solve_cfg)
    trace = []
    yu_prev = None
    yu = np.zeros(0, dtype=np.complex128)
    converged = False
    iterations = 0
    for _ in range(config.max_iter):
        iterations += 1
        prev_plan = SnapshotPlan.from_data_length(n, spec.filters.shape[1])
        yu = estimate_missing(spec, segments, prev_plan, config.solve_cfg)
        y_full = segments.fill(yu)
        new = reestimate(y_full, segments.x, plan, config.grid, config.solve_cfg)
        trace.append(objective(y_full, segments.x, new, plan))
        delta = _delta(spec, new, yu_prev, yu)
        spec = new
        yu_prev = yu
        if delta <= config.delta:
            converged = True
            break
    return ReconstructionResult(
        y_missing=yu, spectrum=spec,
        objective_trace=np.asarray(trace, dtype=np.float64),
        iterations=iterations, converged=converged)

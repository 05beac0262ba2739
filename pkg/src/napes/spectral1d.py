"""Matched-filter-bank amplitude spectra for 1-D records.

Two estimators share one closed form.  Both fit, at each frequency omega,
a length-m filter h and a complex amplitude alpha minimizing

    sum_t | h* Y(t) - alpha x_t e^{i omega t} |^2
    subject to  h* (X_m .* A_m(omega)) = 1,

where Y(t) are the overlapping snapshots of the record.  With x identically
one this is the classic APES filter bank (the target is a pure cisoid and
the constraint vector is the steering vector).  With a known reference
sequence x it is the reference-modulated variant: the estimated component
is alpha x_t e^{i omega t} and the constraint pins the filter's response to
the modulated steering vector X_m .* A_m.

The closed form, with a = X_m .* A_m, is

    g(omega) = sum_t w_t e^{-i omega t} Y(t),  w_t = conj(x_t) / ||X_l||^2
    q = r - g g*,  r = sum_t w'_t Y(t) Y(t)*,   w'_t = |x_t|^2 / ||X_l||^2
    h = q^{-1} a / (a* q^{-1} a),  alpha = h* g

(for APES both weight vectors collapse to 1/l).
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import (DegenerateDenominatorError, SingularMatrixError,
                     ZeroNoiseWindowError)
from .linalg import DEFAULT_SOLVE
from .snapshots import FrequencyGrid, SnapshotPlan, data_matrix, steering

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_DEGENERATE = 2


@dataclass(frozen=True)
class CovarianceBundle:
    """Second-moment matrix r, matched vector g, and residual q = r - g g*."""

    r: np.ndarray
    g: np.ndarray
    q: np.ndarray


@dataclass(frozen=True)
class FilterEstimate:
    """Filter h and amplitude alpha at a single frequency."""

    omega: float
    h: np.ndarray
    alpha: complex


@dataclass(frozen=True)
class Spectrum1D:
    """Per-bin estimates over a grid; status 0 marks usable bins.

    filters[k] and alphas[k] are NaN wherever status[k] != 0
    (1: singular normal matrix, 2: degenerate constraint denominator).
    """

    grid: FrequencyGrid
    filters: np.ndarray
    alphas: np.ndarray
    status: np.ndarray

    def __post_init__(self):
        k = len(self.grid)
        if self.filters.shape[0] != k or self.alphas.shape != (k,) \
                or self.status.shape != (k,):
            raise ValueError("per-bin arrays must match the grid length")

    @property
    def ok(self):
        return self.status == STATUS_OK

    def estimate(self, k):
        return FilterEstimate(float(self.grid.omegas[k]),
                              self.filters[k].copy(), complex(self.alphas[k]))


def _weights(x, plan):
    """Matched-vector weights, constraint modulation and normalizer.

    The returned weights enter g = sum_t w_t e^{-i omega t} Y(t); the
    normalizer scales the plain snapshot sum into r.  For APES (x None)
    both are 1/l; for a reference x they are conj(x_t)/||X_l||^2 and
    1/||X_l||^2.
    """
    if x is None:
        w = np.full(plan.l, 1.0 / plan.l, dtype=np.complex128)
        mvec = np.ones(plan.m, dtype=np.complex128)
        return w, mvec, 1.0 / plan.l
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 1 or x.shape[0] < plan.n:
        raise ValueError(f"reference length {x.shape} shorter than record n={plan.n}")
    xl = x[:plan.l]
    energy = float(np.sum(np.abs(xl) ** 2))
    if energy == 0.0:
        raise ZeroNoiseWindowError("reference window has zero energy")
    return xl.conj() / energy, x[:plan.m].copy(), 1.0 / energy


def sweep_arrays(y, x, plan, omegas, config=DEFAULT_SOLVE):
    """Run the closed form over an arbitrary frequency array.

    Returns (filters (k, m), alphas (k,), status (k,)).  Per-bin failures
    are recorded in status, never raised.
    """
    y = np.asarray(y, dtype=np.complex128)
    yy = data_matrix(y, plan)
    w, mvec, norm = _weights(x, plan)
    r = (yy @ yy.conj().T) * norm
    r = 0.5 * (r + r.conj().T)
    tvec = np.arange(plan.l, dtype=np.float64)
    tzero = np.zeros(plan.l, dtype=np.float64)
    pvec = np.arange(plan.m, dtype=np.float64)
    pzero = np.zeros(plan.m, dtype=np.float64)
    ker = kernels()
    filters, alphas, status = ker.constrained_sweep(
        r, yy, w, tvec, tzero, mvec, pvec, pzero,
        np.asarray(omegas, dtype=np.float64), np.zeros(1, dtype=np.float64),
        config.loading, config.singular_policy == "error")
    return filters[:, 0, :], alphas[:, 0], status[:, 0]


def apes_g(yy, omega):
    """Matched vector (1/l) sum_t e^{-i omega t} Y(t) from snapshot columns."""
    l = yy.shape[1]
    phases = np.exp(-1j * omega * np.arange(l))
    return yy @ phases / l


def napes_g(yy, x, omega):
    """Reference-weighted matched vector sum_t w_t e^{-i omega t} Y(t)."""
    l = yy.shape[1]
    xl = np.asarray(x, dtype=np.complex128)[:l]
    energy = float(np.sum(np.abs(xl) ** 2))
    if energy == 0.0:
        raise ZeroNoiseWindowError("reference window has zero energy")
    phases = np.exp(-1j * omega * np.arange(l))
    return yy @ (xl.conj() * phases) / energy


def covariance_bundle(yy, x, omega):
    """Assemble (r, g, q) for snapshot columns yy and reference x (None: APES).

    r is the plain snapshot second moment scaled by 1/l (APES) or by the
    reciprocal reference energy (modulated case); q = r - g g*.
    """
    l = yy.shape[1]
    if x is None:
        g = apes_g(yy, omega)
        r = yy @ yy.conj().T / l
    else:
        xl = np.asarray(x, dtype=np.complex128)[:l]
        energy = float(np.sum(np.abs(xl) ** 2))
        if energy == 0.0:
            raise ZeroNoiseWindowError("reference window has zero energy")
        g = napes_g(yy, x, omega)
        r = yy @ yy.conj().T / energy
    r = 0.5 * (r + r.conj().T)
    q = r - np.outer(g, g.conj())
    return CovarianceBundle(r=r, g=g, q=0.5 * (q + q.conj().T))


def _point(y, x, plan, omega, config):
    filters, alphas, status = sweep_arrays(
        y, x, plan, np.asarray([omega], dtype=np.float64), config)
    if status[0] == STATUS_SINGULAR:
        raise SingularMatrixError(f"normal matrix singular at omega={omega}")
    if status[0] == STATUS_DEGENERATE:
        raise DegenerateDenominatorError(f"constraint denominator vanished at omega={omega}")
    return FilterEstimate(float(omega), filters[0], complex(alphas[0]))


def apes_point(y, plan, omega, config=DEFAULT_SOLVE):
    """APES filter and amplitude of record y at a single frequency.

    Parameters
    ----------
    y : complex record of length plan.n.
    plan : SnapshotPlan.
    omega : frequency in radians per sample.
    config : HermitianSolveConfig for the q-solve.

    Returns a FilterEstimate.  Raises SingularMatrixError or
    DegenerateDenominatorError on numerical failure at this point.
    """
    return _point(y, None, plan, omega, config)


def napes_point(y, x, plan, omega, config=DEFAULT_SOLVE):
    """Reference-modulated filter and amplitude at a single frequency.

    Same contract as apes_point, plus the reference sequence x (length at
    least plan.n).  Raises ZeroNoiseWindowError when the first l reference
    samples have zero energy.
    """
    if x is None:
        raise ValueError("x is required; use apes_point for the unmodulated case")
    return _point(y, x, plan, omega, config)


def spectrum(y, x, plan, grid, config=DEFAULT_SOLVE):
    """Estimate filters and amplitudes over a whole frequency grid.

    Parameters
    ----------
    y : complex record of length plan.n.
    x : reference sequence (length >= plan.n), or None for plain APES.
    plan : SnapshotPlan.
    grid : FrequencyGrid.
    config : HermitianSolveConfig.

    Returns a Spectrum1D.  Numerical failures at individual bins are
    recorded in its status array rather than raised, so one bad bin does
    not abort the sweep.
    """
    filters, alphas, status = sweep_arrays(y, x, plan, grid.omegas, config)
    return Spectrum1D(grid=grid, filters=filters, alphas=alphas, status=status)


def apes_spectrum(y, plan, grid, config=DEFAULT_SOLVE):
    """APES spectrum over a grid (reference identically one)."""
    return spectrum(y, None, plan, grid, config)

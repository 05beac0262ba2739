"""Two-dimensional version of the filter-bank estimators.

The m x m' window anchored at (t, t') is flattened column-major into a
snapshot of dimension d = m m', and the target component at a frequency
pair is alpha x(t, t') e^{i(omega t + omega' t')}.  The constraint vector
is the flattened window of x Hadamard the Kronecker steering vector
kron(a_{m'}(omega'), a_m(omega)), matching the snapshot layout.  Closed
form and failure handling are identical to the 1-D case.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import (DegenerateDenominatorError, SingularMatrixError,
                     ZeroNoiseWindowError)
from .linalg import DEFAULT_SOLVE
from .snapshots import FrequencyGrid, SnapshotPlan2D, data_matrix_2d
from .spectral1d import CovarianceBundle

STATUS_OK = 0
STATUS_SINGULAR = 1
STATUS_DEGENERATE = 2


@dataclass(frozen=True)
class FilterEstimate2D:
    """Flattened filter h (length m m') and amplitude at one frequency pair."""

    omega: float
    omega_p: float
    h: np.ndarray
    alpha: complex


@dataclass(frozen=True)
class Spectrum2D:
    """Estimates over the Cartesian product of two grids.

    filters has shape (k, k', m m'); alphas and status are (k, k').
    Failed pairs carry NaN and a nonzero status, as in Spectrum1D.
    """

    grid: FrequencyGrid
    grid_p: FrequencyGrid
    filters: np.ndarray
    alphas: np.ndarray
    status: np.ndarray

    def __post_init__(self):
        k, kp = len(self.grid), len(self.grid_p)
        if self.filters.shape[:2] != (k, kp) or self.alphas.shape != (k, kp) \
                or self.status.shape != (k, kp):
            raise ValueError("per-pair arrays must match the two grid lengths")

    @property
    def ok(self):
        return self.status == STATUS_OK

    def estimate(self, k, k_p):
        return FilterEstimate2D(
            float(self.grid.omegas[k]), float(self.grid_p.omegas[k_p]),
            self.filters[k, k_p].copy(), complex(self.alphas[k, k_p]))


def _weights2d(x, plan):
    m, l = plan.rows.m, plan.rows.l
    m_p, l_p = plan.cols.m, plan.cols.l
    if x is None:
        s = l * l_p
        return (np.full(s, 1.0 / s, dtype=np.complex128),
                np.ones(m * m_p, dtype=np.complex128), 1.0 / s)
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim != 2 or x.shape[0] < plan.rows.n or x.shape[1] < plan.cols.n:
        raise ValueError(f"reference shape {x.shape} smaller than the record")
    xl = x[:l, :l_p].flatten(order="F")
    energy = float(np.sum(np.abs(xl) ** 2))
    if energy == 0.0:
        raise ZeroNoiseWindowError("reference window has zero energy")
    mvec = x[:m, :m_p].flatten(order="F")
    return xl.conj() / energy, mvec, 1.0 / energy


def sweep_arrays_2d(data, x, plan, omegas, omegas_p, config=DEFAULT_SOLVE):
    """Closed form over arbitrary per-axis frequency arrays.

    Returns (filters (k, k', m m'), alphas (k, k'), status (k, k')).
    """
    data = np.asarray(data, dtype=np.complex128)
    yy = data_matrix_2d(data, plan)
    w, mvec, norm = _weights2d(x, plan)
    r = (yy @ yy.conj().T) * norm
    r = 0.5 * (r + r.conj().T)
    m, l = plan.rows.m, plan.rows.l
    m_p, l_p = plan.cols.m, plan.cols.l
    tvec = np.tile(np.arange(l, dtype=np.float64), l_p)
    tpvec = np.repeat(np.arange(l_p, dtype=np.float64), l)
    pvec = np.tile(np.arange(m, dtype=np.float64), m_p)
    ppvec = np.repeat(np.arange(m_p, dtype=np.float64), m)
    ker = kernels()
    return ker.constrained_sweep(
        r, yy, w, tvec, tpvec, mvec, pvec, ppvec,
        np.asarray(omegas, dtype=np.float64),
        np.asarray(omegas_p, dtype=np.float64),
        config.loading, config.singular_policy == "error")


def g2d(data, x, omega, omega_p, plan):
    """Matched vector sum_{t,t'} w(t,t') e^{-i(omega t + omega' t')} Y(t,t').

    Weights are 1/(l l') for x None, else conj(x(t,t')) over the window
    energy.  Raises ZeroNoiseWindowError on a zero-energy reference window.
    """
    data = np.asarray(data, dtype=np.complex128)
    yy = data_matrix_2d(data, plan)
    w, _, _ = _weights2d(x, plan)
    l, l_p = plan.rows.l, plan.cols.l
    tvec = np.tile(np.arange(l), l_p)
    tpvec = np.repeat(np.arange(l_p), l)
    phases = np.exp(-1j * (omega * tvec + omega_p * tpvec))
    return yy @ (w * phases)


def q2d(data, x, omega, omega_p, plan):
    """(r, g, q) bundle for the 2-D snapshots; see the 1-D covariance_bundle."""
    data = np.asarray(data, dtype=np.complex128)
    yy = data_matrix_2d(data, plan)
    w, _, norm = _weights2d(x, plan)
    l, l_p = plan.rows.l, plan.cols.l
    tvec = np.tile(np.arange(l), l_p)
    tpvec = np.repeat(np.arange(l_p), l)
    g = yy @ (w * np.exp(-1j * (omega * tvec + omega_p * tpvec)))
    r = (yy @ yy.conj().T) * norm
    r = 0.5 * (r + r.conj().T)
    q = r - np.outer(g, g.conj())
    return CovarianceBundle(r=r, g=g, q=0.5 * (q + q.conj().T))


def _point(data, x, plan, omega, omega_p, config):
    filters, alphas, status = sweep_arrays_2d(
        data, x, plan, np.asarray([omega], dtype=np.float64),
        np.asarray([omega_p], dtype=np.float64), config)
    if status[0, 0] == STATUS_SINGULAR:
        raise SingularMatrixError(
            f"normal matrix singular at ({omega}, {omega_p})")
    if status[0, 0] == STATUS_DEGENERATE:
        raise DegenerateDenominatorError(
            f"constraint denominator vanished at ({omega}, {omega_p})")
    return FilterEstimate2D(float(omega), float(omega_p),
                            filters[0, 0], complex(alphas[0, 0]))


def apes2d_point(data, plan, omega, omega_p, config=DEFAULT_SOLVE):
    """2-D APES filter and amplitude at one frequency pair.

    data is the (n, n') complex record; the filter comes back flattened
    column-major (length m m').  Raises SingularMatrixError or
    DegenerateDenominatorError on numerical failure.
    """
    return _point(data, None, plan, omega, omega_p, config)


def napes2d_point(data, x, plan, omega, omega_p, config=DEFAULT_SOLVE):
    """Reference-modulated 2-D estimate at one frequency pair.

    x is the (n, n') reference sequence.  Raises ZeroNoiseWindowError when
    the l x l' reference window has zero energy; otherwise as apes2d_point.
    """
    if x is None:
        raise ValueError("x is required; use apes2d_point for the unmodulated case")
    return _point(data, x, plan, omega, omega_p, config)


def spectrum2d(data, x, plan, grid, grid_p, config=DEFAULT_SOLVE):
    """Estimates over grid x grid_p; per-pair failures land in status."""
    filters, alphas, status = sweep_arrays_2d(
        data, x, plan, grid.omegas, grid_p.omegas, config)
    return Spectrum2D(grid=grid, grid_p=grid_p, filters=filters,
                      alphas=alphas, status=status)

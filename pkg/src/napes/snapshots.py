"""Snapshot extraction, steering vectors and frequency grids.

A record y of length n yields l = n - m + 1 overlapping snapshots
Y(t) = (y_t, ..., y_{t+m-1}).  In 2-D the m x m' window starting at
(t, t') is flattened column-major, so entry p + p' m is y[t+p, t'+p'].
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SnapshotPlan:
    """Window length m, snapshot count l, record length n = m + l - 1."""

    m: int
    l: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.l < 1:
            raise ValueError("m and l must be >= 1")
        if self.n != self.m + self.l - 1:
            raise ValueError(f"n must equal m + l - 1, got {self.n}")

    @classmethod
    def from_data_length(cls, n, m):
        """Plan covering a full record of length n with window m."""
        return cls(m=m, l=n - m + 1, n=n)


@dataclass(frozen=True)
class SnapshotPlan2D:
    """Per-axis plans; axis 0 is rows, axis 1 is columns."""

    rows: SnapshotPlan
    cols: SnapshotPlan

    @classmethod
    def from_data_shape(cls, shape, m, m_p):
        return cls(SnapshotPlan.from_data_length(shape[0], m),
                   SnapshotPlan.from_data_length(shape[1], m_p))


@dataclass(frozen=True)
class FrequencyGrid:
    """Strictly increasing frequencies in [0, 2*pi), radians per sample."""

    omegas: np.ndarray

    def __post_init__(self):
        om = np.asarray(self.omegas, dtype=np.float64)
        if om.ndim != 1 or om.size == 0:
            raise ValueError("grid must be a nonempty 1-D array")
        if not np.all(np.isfinite(om)):
            raise ValueError("grid frequencies must be finite")
        if np.any(om < 0.0) or np.any(om >= 2.0 * np.pi):
            raise ValueError("grid frequencies must lie in [0, 2*pi)")
        if om.size > 1 and np.any(np.diff(om) <= 0.0):
            raise ValueError("grid frequencies must be strictly increasing")
        om = om.copy()
        om.flags.writeable = False
        object.__setattr__(self, "omegas", om)

    @classmethod
    def uniform(cls, k):
        """k bins at 2*pi*j/k for j = 0..k-1."""
        if k < 1:
            raise ValueError("k must be >= 1")
        return cls(2.0 * np.pi * np.arange(k) / k)

    def __len__(self):
        return self.omegas.size


def steering(omega, k):
    """Steering vector (1, e^{i omega}, ..., e^{i omega (k-1)})."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return np.exp(1j * omega * np.arange(k))


def steering2d(omega, omega_p, k, k_p):
    """Vec'd 2-D steering vector: kron(steering(omega_p), steering(omega))."""
    return np.kron(steering(omega_p, k_p), steering(omega, k))


def snapshot_vector(y, t, m):
    """Copy of the length-m window of y starting at t."""
    y = np.asarray(y)
    if t < 0 or t + m > y.shape[0]:
        raise ValueError(f"window [{t}, {t + m}) outside record of length {y.shape[0]}")
    return y[t:t + m].copy()


def data_matrix(y, plan):
    """m x l matrix whose column t is the snapshot starting at t."""
    y = np.asarray(y, dtype=np.complex128)
    if y.ndim != 1 or y.shape[0] != plan.n:
        raise ValueError(f"record length {y.shape} does not match plan n={plan.n}")
    win = np.lib.stride_tricks.sliding_window_view(y, plan.m)
    return np.ascontiguousarray(win.T)


def snapshot2d(ymat, t, t_p, m, m_p):
    """Column-major flattening of the m x m' window anchored at (t, t')."""
    ymat = np.asarray(ymat)
    if t < 0 or t_p < 0 or t + m > ymat.shape[0] or t_p + m_p > ymat.shape[1]:
        raise ValueError(f"window anchored at ({t}, {t_p}) outside {ymat.shape} record")
    return ymat[t:t + m, t_p:t_p + m_p].flatten(order="F")


def data_matrix_2d(ymat, plan):
    """(m m') x (l l') matrix; column t + t' l is the vec'd window at (t, t')."""
    ymat = np.asarray(ymat, dtype=np.complex128)
    if ymat.shape != (plan.rows.n, plan.cols.n):
        raise ValueError(
            f"record shape {ymat.shape} does not match plan ({plan.rows.n}, {plan.cols.n})")
    m, l = plan.rows.m, plan.rows.l
    m_p, l_p = plan.cols.m, plan.cols.l
    win = np.lib.stride_tricks.sliding_window_view(ymat, (m, m_p))
    cols = win.transpose(2, 3, 0, 1).reshape(m * m_p, l * l_p, order="F")
    return np.ascontiguousarray(cols)

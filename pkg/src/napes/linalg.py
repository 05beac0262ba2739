"""Complex array primitives and the regularized Hermitian solve."""

from dataclasses import dataclass

import numpy as np

from . import _kernels_numpy
from .errors import NonHermitianError, SingularMatrixError

HERMITIAN_RTOL = 1e-10


@dataclass(frozen=True)
class HermitianSolveConfig:
    """Policy for solving Hermitian systems that may be near-singular.

    A plain solve is attempted first and accepted when the residual
    satisfies ||q x - b|| <= 1e-8 ||b||.  Otherwise, with
    singular_policy "load", the system is re-solved with the diagonal
    shifted by loading * trace(q)/n; with "error" the failure raises.
    """

    loading: float = 1e-8
    singular_policy: str = "load"

    def __post_init__(self):
        if not self.loading >= 0.0:
            raise ValueError("loading must be >= 0")
        if self.singular_policy not in ("load", "error"):
            raise ValueError("singular_policy must be 'load' or 'error'")


DEFAULT_SOLVE = HermitianSolveConfig()


def hadamard(a, b):
    """Elementwise product of two equally shaped arrays."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")
    return a * b


def kron(a, b):
    """Kronecker product, b-index fastest: out[i*len(b)+j] = a[i] b[j]."""
    return np.kron(np.asarray(a), np.asarray(b))


def vec(m):
    """Column-major flattening of a matrix."""
    return np.asarray(m).flatten(order="F")


def outer(u, v):
    """Rank-one matrix u v* (second argument conjugated)."""
    return np.outer(np.asarray(u), np.conj(np.asarray(v)))


def hermitian_solve(q, b, config=DEFAULT_SOLVE):
    """Solve q x = b for Hermitian q under the configured loading policy.

    Parameters
    ----------
    q : (n, n) complex array, Hermitian within max|q - q*| <= 1e-10 max|q|.
        The symmetrized (q + q*)/2 is what gets factored.
    b : (n,) complex array.
    config : HermitianSolveConfig.

    Raises
    ------
    NonHermitianError
        Asymmetry beyond the tolerance.
    SingularMatrixError
        No residual-passing solution under the policy.
    """
    q = np.asarray(q, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if q.ndim != 2 or q.shape[0] != q.shape[1]:
        raise ValueError(f"q must be square, got shape {q.shape}")
    if b.shape != (q.shape[0],):
        raise ValueError(f"b has shape {b.shape}, expected ({q.shape[0]},)")
    scale = np.max(np.abs(q)) if q.size else 0.0
    asym = np.max(np.abs(q - q.conj().T)) if q.size else 0.0
    if asym > HERMITIAN_RTOL * scale:
        raise NonHermitianError(
            f"asymmetry {asym:.3e} exceeds {HERMITIAN_RTOL:.0e} * {scale:.3e}")
    qh = 0.5 * (q + q.conj().T)
    allow_load = config.singular_policy == "load" and config.loading > 0.0
    x, code = _kernels_numpy.solve_status(qh, b, config.loading, allow_load)
    if code == 2:
        raise SingularMatrixError(
            f"no solution within residual tolerance (policy={config.singular_policy})")
    return x

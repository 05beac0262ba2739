"""Filter-bank amplitude spectra with a known reference sequence.

1-D and 2-D estimators (classic and reference-modulated), plus cyclic
missing-sample reconstruction for gapped records.  Kernels run on numba
when available; NAPES_BACKEND=numpy selects the pure-numpy path and
NAPES_THREADS caps numba parallelism.
"""

from ._backend import HAS_NUMBA, backend_name
from .errors import (DataFormatError, DegenerateDenominatorError, NapesError,
                     NonHermitianError, SingularMatrixError,
                     SingularSystemError, ZeroNoiseWindowError)
from .gapped import (GappedConfig, ReconstructionResult, SegmentedSignal,
                     cyclic_optimize, estimate_missing, feasibility,
                     filter_operator, init_step1a, init_step1b, objective,
                     reestimate, split_known_unknown, target_vector)
from .linalg import (DEFAULT_SOLVE, HermitianSolveConfig, hadamard,
                     hermitian_solve, kron, outer, vec)
from .snapshots import (FrequencyGrid, SnapshotPlan, SnapshotPlan2D,
                        data_matrix, data_matrix_2d, snapshot2d,
                        snapshot_vector, steering, steering2d)
from .spectral1d import (CovarianceBundle, FilterEstimate, Spectrum1D,
                         apes_g, apes_point, apes_spectrum, covariance_bundle,
                         napes_g, napes_point, spectrum)
from .spectral2d import (FilterEstimate2D, Spectrum2D, apes2d_point, g2d,
                         napes2d_point, q2d, spectrum2d)
from .testkit import (NoiseModel, SinusoidSpec, drop_segments, fit_objective,
                      fit_objective_2d, gen_signal, kkt_oracle, kkt_oracle_2d,
                      project_constraint)

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA", "backend_name",
    "DataFormatError", "DegenerateDenominatorError", "NapesError",
    "NonHermitianError", "SingularMatrixError", "SingularSystemError",
    "ZeroNoiseWindowError",
    "GappedConfig", "ReconstructionResult", "SegmentedSignal",
    "cyclic_optimize", "estimate_missing", "feasibility", "filter_operator",
    "init_step1a", "init_step1b", "objective", "reestimate",
    "split_known_unknown", "target_vector",
    "DEFAULT_SOLVE", "HermitianSolveConfig", "hadamard", "hermitian_solve",
    "kron", "outer", "vec",
    "FrequencyGrid", "SnapshotPlan", "SnapshotPlan2D", "data_matrix",
    "data_matrix_2d", "snapshot2d", "snapshot_vector", "steering",
    "steering2d",
    "CovarianceBundle", "FilterEstimate", "Spectrum1D", "apes_g",
    "apes_point", "apes_spectrum", "covariance_bundle", "napes_g",
    "napes_point", "spectrum",
    "FilterEstimate2D", "Spectrum2D", "apes2d_point", "g2d", "napes2d_point",
    "q2d", "spectrum2d",
    "NoiseModel", "SinusoidSpec", "drop_segments", "fit_objective",
    "fit_objective_2d", "gen_signal", "kkt_oracle", "kkt_oracle_2d",
    "project_constraint",
]

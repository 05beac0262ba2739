"""Exception types shared across the package."""


class NapesError(Exception):
    """Base class for errors raised by this package."""


class NonHermitianError(NapesError):
    """A matrix expected to be Hermitian exceeds the asymmetry tolerance."""


class SingularMatrixError(NapesError):
    """A linear system could not be solved to the required residual."""


class ZeroNoiseWindowError(NapesError):
    """The reference-sequence window has zero energy and cannot normalize."""


class DegenerateDenominatorError(NapesError):
    """The constraint normalizer a* Q^{-1} a vanished."""


class SingularSystemError(NapesError):
    """The stacked least-squares system of an oracle is numerically singular."""


class DataFormatError(NapesError):
    """An input dataset violates the documented file layout."""

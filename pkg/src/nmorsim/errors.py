"""Exception and warning types shared across the package."""


class NmorError(Exception):
    """Base class for all package-specific errors."""


class InvalidParams(NmorError):
    """A parameter set violates a hard physical or numerical precondition."""


class DegenerateDenominator(NmorError):
    """A closed-form denominator is (numerically) zero; the steady state is
    not determined by the analytic formulas for this parameter set."""


class NotConverged(NmorError):
    """An iterative/numerical procedure failed its built-in convergence check."""


class SolverDiverged(NmorError):
    """Field propagation left the validity region (runaway amplitudes)."""


class ZeroField(NmorError):
    """An operation that needs nonzero field amplitudes received zero."""


class InvalidReference(NmorError):
    """Reference detector levels are unusable (non-positive sum)."""


class InvalidSignals(NmorError):
    """Detector signals are unusable (non-positive sum)."""


class WindowTooShort(NmorError):
    """Sliding-average window shorter than two samples."""


class ZeroVariance(NmorError):
    """A correlation was requested for a channel with no fluctuation power."""


class DegenerateMoments(NmorError):
    """All fluctuation moments vanish; the closed-form correlation is 0/0."""


class NoPeak(NmorError):
    """A correlation function has no resolvable peak (no half-maximum crossing)."""


class ParseError(NmorError):
    """A data file could not be parsed.

    Carries the 1-based line number when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class NonuniformGrid(NmorError):
    """Imported samples are not on a uniform time grid."""


class ConfigError(NmorError):
    """Configuration file or option is invalid."""


class PhysicalityWarning(UserWarning):
    """Parameters are formally accepted but physically questionable."""


class RegimeViolation(UserWarning):
    """An asymptotic formula was evaluated far outside its validity regime."""

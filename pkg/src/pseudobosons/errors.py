"""Exception types raised by the toolkit.

Every error that carries a diagnostic quantity (an offending eigenvalue, a
singular value list, a condition estimate) exposes it as an attribute so
callers can report it without parsing messages.
"""


class PseudoBosonError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(PseudoBosonError):
    """Operands have incompatible dimensions or an index is out of range."""


class InvalidDimensionError(PseudoBosonError):
    """Requested truncation size is too small to hold a ladder operator."""


class NotHermitianError(PseudoBosonError):
    def __init__(self, message, deviation=None):
        super().__init__(message)
        self.deviation = deviation


class NotPositiveDefiniteError(PseudoBosonError):
    def __init__(self, message, eigenvalue=None):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class ExponentOverflowError(PseudoBosonError):
    """Matrix exponential would overflow double precision."""

    def __init__(self, message, norm_estimate=None):
        super().__init__(message)
        self.norm_estimate = norm_estimate


class NoVacuumError(PseudoBosonError):
    """The trust block of a lowering operator has no numerical kernel."""

    def __init__(self, message, relative_sigma=None):
        super().__init__(message)
        self.relative_sigma = relative_sigma


class DegenerateVacuumError(PseudoBosonError):
    """Numerical kernel dimension is two or more."""

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class NormalizationError(PseudoBosonError):
    """The two vacua are numerically orthogonal, so no rescaling can give
    overlap one."""

    def __init__(self, message, overlap=None):
        super().__init__(message)
        self.overlap = overlap


class TruncationOverrunError(PseudoBosonError):
    """Ladder generation was asked to climb past the trusted block."""


class UnderSpannedError(PseudoBosonError):
    """Too few vectors to test completeness on the requested block."""


class IllConditionedError(PseudoBosonError):
    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class CommutationError(PseudoBosonError):
    """A constructed pair fails [a, b] = 1 on its trust block."""

    def __init__(self, message, defect=None):
        super().__init__(message)
        self.defect = defect


class DomainExceededError(PseudoBosonError):
    """Coherent-state series tail is not under control at this amplitude."""

    def __init__(self, message, tail_bound=None):
        super().__init__(message)
        self.tail_bound = tail_bound


class QuadratureConvergenceError(PseudoBosonError):
    """Quadrature failed its convergence gates.

    `trace` holds (label, value) pairs describing what was observed, e.g.
    node-doubling deltas or the radial growth ratio of the integrand.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = tuple(trace) if trace is not None else ()


class InsufficientDataError(PseudoBosonError):
    """Not enough samples to classify a growth trend."""


class ParameterError(PseudoBosonError):
    """Model parameters outside their admissible range."""


class ConfigError(PseudoBosonError):
    """Run configuration failed to parse or validate."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line

"""Exception hierarchy shared by all strz modules.

The CLI maps these categories onto distinct exit codes, so new error
types should subclass one of the existing categories.
"""


class StrzError(Exception):
    """Base class for all errors raised by this package."""


class PreconditionError(StrzError):
    """An argument violates a documented precondition."""


class DimensionError(PreconditionError):
    """Space dimension outside the supported range."""


class RegimeError(PreconditionError):
    """Exponents belong to the wrong criticality regime for the operation."""


class SupportEscapeError(StrzError):
    """Significant mass lies in the outer shell of the periodic box."""


class SingularityError(StrzError):
    """Potential evaluated at a singular time (pseudoconformal t <= 0)."""


class PartitionError(StrzError):
    """The requested interval partition cannot be produced."""


class UnsplittableSliceError(PartitionError):
    """A single time slice already exceeds the norm threshold; refine dt."""


class CannotPartitionError(PartitionError):
    """No partition can shrink piece norms below the threshold (r = inf)."""


class NonContractionError(StrzError):
    """Fixed-point iteration failed to contract within the iteration budget."""


class ConvergenceError(StrzError):
    """An iterative solver stagnated before reaching its tolerance."""


class EmptyConstraintError(PreconditionError):
    """Constraint weight is nonpositive everywhere; the constraint set is empty."""


class CalibrationError(StrzError):
    """No threshold in the search range made the reference runs contract."""


class DivergentNormError(StrzError):
    """A schedule whose analytic potential norm diverges was requested."""


class SnapshotFormatError(StrzError):
    """Binary field snapshot is malformed or has an unsupported version."""


class ConfigError(StrzError):
    """Experiment configuration is malformed or fails validation."""

"""Exception types shared across the package."""


class PhasekitError(Exception):
    """Base class for all phasekit errors."""


class NonPowerOfTwo(PhasekitError):
    """Grid size is not a power of two (or is below the minimum of 8)."""


class DegenerateInterval(PhasekitError):
    """Position interval has zero or negative length."""


class BoundaryLeak(PhasekitError):
    """A state (or evolved distribution) does not decay at the grid edge."""


class InvalidSpec(PhasekitError):
    """Malformed or out-of-range state specification."""


class WeightMismatch(PhasekitError):
    """Mixture weights are negative or do not sum to one."""


class GridMismatch(PhasekitError):
    """Operands live on different grids (or carry different constants)."""


class WrongKind(PhasekitError):
    """Operation applied to a distribution of the wrong kind."""


class StepTooLarge(PhasekitError):
    """Time step violates the advection/force step bounds."""


class InvariantViolation(PhasekitError):
    """A container invariant (normalization, hermiticity, ...) is broken."""

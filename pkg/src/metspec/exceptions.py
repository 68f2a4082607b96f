"""Exception hierarchy shared by all modules."""


class MetSpecError(Exception):
    """Base class for all library errors."""


class DomainError(MetSpecError, ValueError):
    """A point or input lies outside the domain of a space or formula."""


class ParameterError(MetSpecError, ValueError):
    """An operation parameter is invalid."""


class PreconditionError(MetSpecError):
    """A stated precondition of an operation does not hold."""


class UnsupportedSpaceError(MetSpecError):
    """The operation is not defined for this kind of space."""


class HorizonExhaustedError(MetSpecError):
    """No qualifying index was found within the computed horizon."""


class ConvergenceError(MetSpecError):
    """A declared limit was not reached within tolerance."""


class InvariantViolation(MetSpecError):
    """A sampled invariant failed beyond its tolerance."""


class PropagationError(MetSpecError):
    """Iterating a map produced an invalid point."""

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"invalid point produced at step {step}: {cause}")


class UnsupportedMapError(MetSpecError):
    """The operation is not defined for this kind of map."""

"""Exception hierarchy shared by the solver modules and the CLI."""


class SandboxGameError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(SandboxGameError, ValueError):
    """Input that does not describe a valid setting or strategy."""


class EmptyUniverse(ValidationError):
    pass


class NegativeEntry(ValidationError):
    pass


class DefendedExceedsExistence(ValidationError):
    pass


class ZeroExistence(ValidationError):
    """A machine type with no real machines; drop it before building the setting."""


class ExistenceNotNormalized(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class UndefinedStrategy(ValidationError):
    pass


class WrongClass(ValidationError):
    """A closed-form solver was called on a setting outside its regime."""


class SolverError(SandboxGameError):
    """Raised when a solver cannot run for reasons other than bad input."""


class UniverseTooLarge(SolverError):
    pass


class GridTooLarge(SolverError):
    pass


class GenerationStalled(SolverError):
    pass

"""Exception and warning types shared across the package."""


class ShapeError(ValueError):
    """Operands have incompatible or invalid shapes."""


class DomainError(ValueError):
    """A value lies outside the mathematical domain of an operation."""


class FormatError(ValueError):
    """A serialized file is malformed. Carries the byte offset of the defect."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class GuardError(ValueError):
    """A guarded size or resource limit was exceeded."""


class DivergenceError(RuntimeError):
    """An iterative optimization produced a non-finite objective."""

    def __init__(self, message: str, step: int):
        super().__init__(f"{message} (step {step})")
        self.step = step


class ConvergenceWarning(UserWarning):
    """An iterative solver stopped before reaching its tolerance."""


class TapeWarning(UserWarning):
    """A gradient request could not be satisfied from the recorded tape."""

"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the domain where a formula or field is defined."""


class PreconditionError(ValueError):
    """Operation called on data that does not satisfy its preconditions."""


class SolverFailure(RuntimeError):
    """Integration ended before the requested span; carries partial data."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class NonFiniteFieldError(FloatingPointError):
    def __init__(self, s, y):
        super().__init__(f"non-finite vector field value at s={s!r}, y={list(map(float, y))!r}")
        self.s = s
        self.y = y

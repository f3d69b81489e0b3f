"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A precondition on user-supplied input was violated."""


class DegenerateObjectiveError(ValidationError):
    """All raw coefficients were zero; no objective remains after normalization."""


class ParameterError(ValidationError):
    """Requested drift parameters are unachievable; carries a diagnostic."""

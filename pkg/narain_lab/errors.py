"""Exception hierarchy shared by all narain_lab modules."""


class NarainLabError(Exception):
    """Base class for every error raised by narain_lab."""


class DomainError(NarainLabError, ValueError):
    """An input lies outside the domain of an operation."""


class BudgetError(NarainLabError):
    """An enumeration cutoff exceeds the configured budget."""

    def __init__(self, message: str, required: int | None = None):
        super().__init__(message)
        self.required = required


class ConventionError(NarainLabError, AssertionError):
    """An identity that must hold exactly failed; a sign or ordering convention is off."""


class InputError(NarainLabError):
    """Malformed JSON or CSV input."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location

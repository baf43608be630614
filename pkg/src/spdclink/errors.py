"""Exception and warning types shared across the package."""


class ScenarioParseError(ValueError):
    """A scenario file could not be parsed (bad syntax, unknown unit, ...)."""


class ValidationError(ValueError):
    """A parsed scenario violates one or more field constraints.

    ``problems`` is a list of ``(field_path, message)`` pairs so callers can
    report every violation at once.
    """

    def __init__(self, problems):
        self.problems = list(problems)
        lines = [f"{path}: {msg}" for path, msg in self.problems]
        super().__init__("invalid scenario:\n  " + "\n  ".join(lines))


class DegenerateInputError(ValueError):
    """Inputs are formally valid but make the requested quantity undefined."""


class UnsortedStreamError(ValueError):
    """A time-tag stream violates the nondecreasing-timestamp contract."""


class TagBudgetError(RuntimeError):
    """Expected tag count exceeds the configured memory cap."""


class GainRegimeWarning(UserWarning):
    """Gain is outside the low-gain regime where the truncation is trusted."""

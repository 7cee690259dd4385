"""Error classes shared by the library and the CLI.

Every error carries a class tag, a location and a remediation hint so the
CLI can print a uniform one-line diagnostic and pick the exit code.
"""

from __future__ import annotations


class SylowTowerError(Exception):
    kind = "user-input"
    exit_code = 1
    default_hint = "check the input description"

    def __init__(self, message: str, location: str = "", hint: str | None = None):
        super().__init__(message)
        self.message = message
        self.location = location or "/"
        self.hint = hint or self.default_hint

    def describe(self) -> str:
        return f"error[{self.kind}] at {self.location}: {self.message} (hint: {self.hint})"

    def __str__(self) -> str:
        return self.describe()


class UserInputError(SylowTowerError):
    """Malformed or inconsistent input data."""


class PreconditionError(UserInputError):
    """A hypothesis of a construction does not hold for the given input."""

    default_hint = "the construction's hypothesis fails for this input; choose a different prime or tower"


class CapacityError(SylowTowerError):
    kind = "capacity"
    exit_code = 2
    default_hint = "raise the bound through the SYLOWTOWER_* environment variables or shrink the instance"


class TheoryViolation(SylowTowerError):
    """Raised when a step that is guaranteed to succeed mathematically fails.

    This signals an implementation bug, never bad input.
    """

    kind = "theory-violation"
    exit_code = 3
    default_hint = "this indicates a bug in sylowtower; please report the input that triggered it"

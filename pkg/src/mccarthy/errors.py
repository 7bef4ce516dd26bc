"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or out-of-range input."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class NotAnAutomorphism(ValueError):
    """The proposed basis images do not form a basis."""


class GrowthError(ValueError):
    """A representative does not have the growth an operation requires."""


class UnsupportedInput(ValueError):
    """Input is valid but outside what the implemented constructions handle."""


class PipelineError(RuntimeError):
    """An internal postcondition of a construction failed."""


class HypothesisError(ValueError):
    """The hypotheses of a construction are not met.

    ``clause`` names the violated hypothesis.
    """

    def __init__(self, clause, message):
        self.clause = clause
        super().__init__(f"hypothesis {clause} violated: {message}")


class WrongCaseError(ValueError):
    """An operation was invoked in the wrong branch of the case analysis."""

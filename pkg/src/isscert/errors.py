class DomainError(ValueError):
    """An argument lies outside the mathematical domain of a function."""


class ConfigurationError(ValueError):
    """Invalid or inconsistent run parameters."""


class MappingFormatError(ValueError):
    """A mapping table document could not be parsed."""

    def __init__(self, message, line=None, column=None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line = line
        self.column = column


class MappingValidationError(ValueError):
    """A mapping table parsed fine but does not match what the caller expects."""


class InvariantViolation(RuntimeError):
    """A runtime invariant of the certification procedure was broken."""

"""Exception types raised across the package."""


class StructuralError(ValueError):
    """Malformed in-memory structure (ragged rows, bad shapes)."""


class ParseError(ValueError):
    """A text file could not be parsed.

    ``lineno`` is 1-based and refers to the offending line of the file.
    """

    def __init__(self, message, lineno=None, path=None):
        self.lineno = lineno
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if lineno is not None:
            where += f"{lineno}:"
        super().__init__(f"{where} {message}" if where else message)


class InfeasibleInstanceError(ValueError):
    """Two examples share identical inputs but disagree on a target."""

    def __init__(self, message, target=None):
        self.target = target
        super().__init__(message)


class EmptyProblemError(ValueError):
    """Preprocessing left no learnable targets."""

class RandTuranError(Exception):
    pass


class GraphParseError(RandTuranError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DomainError(RandTuranError, ValueError):
    """An input falls outside the domain where a quantity is defined."""


class ResourceError(RandTuranError, RuntimeError):
    """A computation would exceed what can be done exactly in reasonable time."""


class BudgetExceeded(ResourceError):
    """A search ran past its configured node or time budget."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial

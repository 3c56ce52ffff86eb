"""Exception types shared across the package."""


class ContractViolation(ValueError):
    """An operation was called with arguments outside its contract."""


class EdgeListParseError(ValueError):
    """An edge-list line could not be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class SizeGuardError(RuntimeError):
    """An exhaustive oracle was asked for more work than its guard allows."""

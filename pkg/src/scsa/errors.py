"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Invalid input: bad grid, mismatched shapes, out-of-range parameter."""


class ConditionViolation(DomainError):
    """A structural precondition of a bound does not hold for the given data."""

    def __init__(self, condition, message):
        super().__init__(f"{condition}: {message}")
        self.condition = condition


class NumericError(ArithmeticError):
    """An iterative numerical kernel failed to converge."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class CsvFormatError(DomainError):
    def __init__(self, path, row, message):
        super().__init__(f"{path}: row {row}: {message}")
        self.path = path
        self.row = row

"""Exception types raised across the package."""


class IcsaError(Exception):
    """Base class for all package errors."""


class ValidationError(IcsaError, ValueError):
    """Input failed a precondition check (CLI exit code 2)."""


class NumericalError(IcsaError, ArithmeticError):
    """A numerical procedure failed (CLI exit code 3)."""


class InvalidMatrix(ValidationError):
    pass


class InvalidDimension(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class TooFewRows(ValidationError):
    pass


class InsufficientSubsetSize(ValidationError):
    pass


class InvalidColumnKind(ValidationError):
    pass


class EmptyOutlierSet(ValidationError):
    pass


class ConditionNotMet(ValidationError):
    pass


class IngestError(ValidationError):
    def __init__(self, message, row=None, column=None):
        loc = []
        if row is not None:
            loc.append(f"row {row}")
        if column is not None:
            loc.append(f"column {column!r}")
        if loc:
            message = f"{message} ({', '.join(loc)})"
        super().__init__(message)
        self.row = row
        self.column = column


class SchemaError(ValidationError):
    pass


class SingularScatter(NumericalError):
    def __init__(self, message, eigenvalue=None, stage=None):
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
        self.eigenvalue = eigenvalue
        self.stage = stage


class NotConverged(NumericalError):
    """Iteration limit reached; ``last`` holds the final iterate."""

    def __init__(self, message, last=None, stage=None):
        if stage is not None:
            message = f"[{stage}] {message}"
        super().__init__(message)
        self.last = last
        self.stage = stage


class DegenerateRow(NumericalError):
    pass


class SingularDesign(NumericalError):
    pass


class DegenerateResponse(NumericalError):
    pass


class UndefinedNormalization(NumericalError):
    pass


class UndefinedRatio(NumericalError):
    pass

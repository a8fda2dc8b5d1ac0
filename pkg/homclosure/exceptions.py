class LogicError(Exception):
    """Base exception for homclosure toolkit errors."""

    pass


class ParseError(LogicError):
    """Raised when formula, structure or domino text cannot be parsed."""

    def __init__(self, message: str, line: int = 0, column: int = 0) -> None:
        self.line = line
        self.column = column
        if line:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class UnknownSymbolError(LogicError):
    """Raised when a formula or structure mentions a symbol outside its signature."""

    pass


class ArityMismatchError(LogicError):
    """Raised when an atom or tuple length disagrees with the declared arity."""

    pass


class SignatureError(LogicError):
    """Raised when a signature is malformed or a fresh symbol clashes."""

    pass


class FormulaValidationError(LogicError):
    """Raised when a formula is not acceptable for the requested operation."""

    pass


class StructureValidationError(LogicError):
    """Raised when structure validation fails."""

    pass


class FragmentError(LogicError):
    """Raised when an input lies outside the fragment an operation supports."""

    pass


class BudgetExceededError(LogicError):
    """Raised when a bounded search exceeds its configured budget."""

    pass


class HomError(LogicError):
    """Raised for invalid homomorphisms and illegal merge requests."""

    pass


class ReductionError(LogicError):
    """Raised when a reduction gadget receives malformed input."""

    pass


class LoadError(LogicError):
    """Raised when a file cannot be loaded."""

    pass

class Z3HardnessError(Exception):
    """Base exception for all z3hardness errors."""

    pass


class CapacityError(Z3HardnessError):
    """Raised when a table, outcome space or search exceeds its cap."""

    pass


class ShapeError(Z3HardnessError):
    """Raised when arities, block maps or tables do not fit together."""

    pass


class FoldingError(Z3HardnessError):
    """Raised when an operation that needs a folded table gets an unfolded one."""

    pass


class KindMismatchError(Z3HardnessError):
    """Raised when a predicate kind or reduction chain does not match."""

    pass


class ParseError(Z3HardnessError):
    """Raised when a JSON document cannot be decoded."""

    pass


class ValidationError(Z3HardnessError):
    """Raised when input parameters are invalid."""

    pass

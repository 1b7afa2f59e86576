"""Exception types shared across the package."""


class FknLabError(Exception):
    """Base class for every error raised by this package."""


class StructureError(FknLabError, ValueError):
    """Malformed value: wrong table length, bad entry, invalid partition."""


class DimensionMismatchError(FknLabError, ValueError):
    """Operands live on hypercubes of different dimension."""


class CapacityError(FknLabError, ValueError):
    """Variable count beyond the exactness cap (m <= 26)."""


class ParseError(FknLabError, ValueError):
    """Text format error, carrying a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class BalanceError(FknLabError, ValueError):
    """An operation required an exactly mean-zero random variable."""


class AtomLimitError(FknLabError, RuntimeError):
    """Convolution support would exceed the configured atom cap."""


class SearchSpaceError(FknLabError, ValueError):
    """Exhaustive probe search space exceeds the configured budget."""


class VerificationError(FknLabError, ArithmeticError):
    """An identity that must hold exactly failed; indicates an internal bug."""

"""Exception hierarchy for bulk-reach.

Every failure raised by the package derives from BulkReachError so callers
(the CLI in particular) can catch one type. Most classes also derive from the
closest built-in exception so generic handlers keep working.
"""


class BulkReachError(Exception):
    """Base class for all package errors."""


class ChangeError(BulkReachError, ValueError):
    """A change cannot be applied to the current graph."""


class NodeRangeError(BulkReachError, IndexError):
    """A node id lies outside 0..n-1, or the node domain is empty."""


class GuardExceededError(BulkReachError):
    """An exhaustive computation would exceed its size guard."""


class WeightError(BulkReachError, ValueError):
    """A weight assignment violates a precondition."""


class NonInvertibleError(BulkReachError, ArithmeticError):
    """A power series or polynomial matrix has no inverse."""


class BoundMismatchError(BulkReachError, ValueError):
    """Operands disagree on truncation bound or shape."""


class RetriesExhaustedError(BulkReachError):
    """A randomized construction did not certify within its retry budget."""


class PrimeSearchError(BulkReachError):
    """No prime within the bit budget satisfies the search condition.

    Attributes:
        level: Greedy level that failed, or None for a plain separation search.
        largest_prime_tried: The last prime examined before giving up.
    """

    def __init__(
        self, message: str, largest_prime_tried: int, level: int | None = None
    ) -> None:
        super().__init__(message)
        self.level = level
        self.largest_prime_tried = largest_prime_tried


class FormatError(BulkReachError, ValueError):
    """A text file does not follow its format.

    Attributes:
        line_number: 1-based line number of the offending line (0 if unknown).
    """

    def __init__(self, message: str, line_number: int = 0) -> None:
        super().__init__(f"line {line_number}: {message}" if line_number else message)
        self.line_number = line_number


class GraphError(BulkReachError, ValueError):
    """A graph or tree decomposition violates its structural invariants."""


class SeriesPreconditionError(BulkReachError, ArithmeticError):
    """A truncated-series update was given operands outside its domain.

    The low-rank update needs C = I (mod x) and a change without constant
    terms; otherwise the correction would not vanish mod x.
    """

"""Exception and warning types raised across the package."""


class TruncationWarning(UserWarning):
    """Population leaks past the retained Fock levels by more than tolerance."""


class DomainError(ValueError):
    """A parameter lies outside the range where the quantity is defined."""


class IndexOutOfSpace(IndexError):
    pass


class ZeroTrace(ValueError):
    pass


class NotHermitian(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class ProblemTooLarge(RuntimeError):
    """The dense representation needed for a request exceeds the size limit."""


class UnsupportedClosedForm(ValueError):
    """A closed-form Wigner function was requested for a family that has none."""


class ParseError(ValueError):
    """Malformed state specification text.

    ``position`` is the 0-based character offset where parsing failed.
    """

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.message = message
        self.position = position

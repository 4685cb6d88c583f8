"""Exception hierarchy shared by all hahnkit modules."""


class HahnkitError(Exception):
    """Base class for all errors raised by this package."""


class ContextMismatch(HahnkitError):
    """Operands belong to different field contexts."""


class DivisionByZero(HahnkitError):
    """Multiplicative inverse of the zero element was requested."""


class ZeroPolynomial(HahnkitError):
    """An operation that needs a nonzero polynomial got the zero polynomial."""


class NotMonic(HahnkitError):
    """A monic polynomial was required."""


class CannotInvert(HahnkitError):
    """Series inversion failed: the support is empty (exact zero, or zero to
    the available precision)."""


class PrecisionRequired(HahnkitError):
    """An exact series with infinite inverse support was inverted without a
    precision cap."""


class NotIntegral(HahnkitError):
    """Residue of a series that may have negative valuation."""


class InsufficientPrecision(HahnkitError):
    """The tracked precision is too small to decide the question asked."""


class NotHenselReady(HahnkitError):
    """The Newton/Hensel convergence precondition v(g(y0)) > 2*v(g'(y0))
    does not hold (or is not known to hold)."""


class UnboundVariable(HahnkitError):
    """A term mentions a variable that the assignment does not cover."""


class BadUnit(HahnkitError):
    """The chosen integer unit is divisible by the residue characteristic."""


class InvalidF(HahnkitError):
    """The auxiliary polynomial f does not satisfy its preconditions
    (monic, residue rootless, f'(0) a unit / nonzero constant term)."""


class ShapeError(HahnkitError):
    """A formula does not have the syntactic shape an operation requires."""


class ParseError(HahnkitError):
    """Syntax error in one of the textual grammars; carries the position."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos

"""Exception taxonomy for the whole package."""


class BlockingSetsError(Exception):
    """Base class for all package errors."""


# --- field construction and arithmetic ---

class NotPrimeError(BlockingSetsError):
    pass


class ReduciblePolynomialError(BlockingSetsError):
    pass


class NoTableEntryError(BlockingSetsError):
    """No Conway polynomial shipped for the requested (p, t)."""


class ZeroInverseError(BlockingSetsError, ZeroDivisionError):
    pass


class SpecMismatchError(BlockingSetsError):
    """Operands belong to different field specs (or different spaces)."""


class BadDivisorError(BlockingSetsError):
    """Subfield degree does not divide the extension degree."""


# --- projective spaces ---

class RangeError(BlockingSetsError):
    """Rank or dimension outside the valid range."""


class EmptyInputError(BlockingSetsError):
    pass


class NotHyperplaneError(BlockingSetsError):
    pass


class CentreInSetError(BlockingSetsError):
    """Projection centre lies in the point set."""


class CentreInHyperplaneError(BlockingSetsError):
    """Projection centre lies in the target hyperplane."""


# --- field reduction / spreads ---

class DimensionMismatchError(BlockingSetsError):
    pass


class NotASublineError(BlockingSetsError):
    """p0+1 collinear points that are not a rank-2 linear set."""


class XNotOnElementError(BlockingSetsError):
    """Base point x does not lie on the expected spread element."""


# --- blocking-set analytics ---

class NotBlockingError(BlockingSetsError):
    pass


class NotApplicableError(BlockingSetsError):
    """Hypotheses of the requested classification are not met."""


class GapViolationError(BlockingSetsError):
    """Intersection count falls strictly inside the forbidden gap."""


class NotFoundError(BlockingSetsError):
    """Search exhausted without finding the required subspace."""


# --- linear sets and reconstruction ---

class TooLargeError(BlockingSetsError):
    """Exhaustive search refused: small side exceeds the size bound."""


class BadParamsError(BlockingSetsError):
    pass


class NoSublineSecantError(BlockingSetsError):
    """No (p0+1)-secant through any point of the set: reconstruction
    has no admissible base point."""


# --- CLI / file formats ---

class ParseError(BlockingSetsError):
    pass


class IoError(BlockingSetsError):
    pass

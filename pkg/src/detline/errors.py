"""Exception types shared across the package."""


class DetlineError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(DetlineError):
    """Operator domains/codomains are not compatible."""


class NotExact(DetlineError):
    """A six-term sequence failed its exactness rank conditions."""


class NotFredholm(DetlineError):
    """An asymptotic fiber matrix is singular or non-square."""


class NotDeterminantClass(DetlineError):
    """Operator is not identity-plus-finitely-supported in fiber form."""


class NotFiniteRank(DetlineError):
    """Operator entries are not supported on finite boxes."""


class NotTraceClassDifference(DetlineError):
    """Difference of two operators is not finitely supported."""


class IndexMismatch(DetlineError):
    """Two operators that should share a Fredholm index do not."""


class NotComplementary(DetlineError):
    """Stabilisation data does not live on complementary slots."""


class NotQuasiIso(DetlineError):
    """Induced kernel/cokernel maps are not invertible."""


class NotInvertible(DetlineError):
    """A fiber matrix (or whole operator) has no inverse."""


class IdealViolation(DetlineError):
    """Idempotent arguments do not differ by an ideal element."""


class Uncertified(DetlineError):
    """A loop is missing its nonvanishing certificate."""


class Unstable(DetlineError):
    """Window-stability certification failed."""


class BranchJump(DetlineError):
    """Logarithm branch tracking saw a jump larger than pi/2."""


class ExponentRange(DetlineError):
    """Closed-form formula asked for outside its exponent range."""


class ParseError(DetlineError):
    """Malformed textual input (CLI monomial/loop syntax)."""

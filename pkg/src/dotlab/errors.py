"""Exception types raised by the dotlab modules."""


class DotLabError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatch(DotLabError, ValueError):
    pass


class SingularInput(DotLabError, ValueError):
    """The point lies on the pole set ``|x|^2 + a_d = 0`` of the transformation map."""


class NonFiniteResult(DotLabError, ArithmeticError):
    pass


class DegenerateAbsent(DotLabError, ValueError):
    """Raised when ``|a_bar|^2 + a_d <= 0`` so no degenerate hyperplane exists."""


class EmptyDomain(DotLabError, ValueError):
    pass


class OriginInside(DotLabError, ValueError):
    pass


class ScaleOverflow(DotLabError, OverflowError):
    pass


class InsufficientScales(DotLabError, ValueError):
    pass


class SizeOverflow(DotLabError, OverflowError):
    """A brute-force enumeration would exceed its configured budget."""

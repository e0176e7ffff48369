"""Exception types shared across the package."""


class ExplainError(Exception):
    """Base class for errors raised by this package."""


class ImageSizeError(ExplainError, ValueError):
    """Input image is too small to be explained."""


class ParameterError(ExplainError, ValueError):
    """A configuration parameter is outside its valid range."""


class ShapeError(ExplainError, ValueError):
    """Array shapes or lengths do not line up."""


class TransportError(ExplainError, RuntimeError):
    """A remote classifier could not be reached, even after retries."""


class ProtocolError(ExplainError, RuntimeError):
    """A remote classifier answered with a malformed response."""


class UndefinedRSquaredError(ExplainError, ArithmeticError):
    """R^2 is undefined because the true values have zero variance."""

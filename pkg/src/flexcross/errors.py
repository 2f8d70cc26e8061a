"""Exception hierarchy shared by all flexcross modules."""


class FlexcrossError(Exception):
    """Base class for every error raised by this package."""


class InputError(FlexcrossError, ValueError):
    """Malformed arguments: wrong dimensions, out-of-range indices."""


class InvalidDataError(FlexcrossError, ValueError):
    """Gram matrix or coefficients violate the construction conditions."""


class DegenerateError(FlexcrossError):
    """A simplex, frame or denominator degenerated beyond tolerance."""


class InvalidPointError(FlexcrossError, ValueError):
    """A vector is not a valid point of the model."""


class NotTimelikeError(FlexcrossError):
    """A hyperbolic vertex vector failed to be time-like."""


class InconsistentSignsError(FlexcrossError):
    """Supplied vertex signs disagree with the ones forced by the geometry."""


class UnsupportedError(FlexcrossError):
    """Operation is not defined for this geometry or dimension."""


class IndeterminateError(FlexcrossError):
    """Random probing failed to find a generic ray, value or point."""


class InconclusiveError(FlexcrossError):
    """A feasibility margin fell inside the undecidable band."""


class ConcurrencyError(FlexcrossError):
    """Bisecting hyperplanes do not meet in a single projective point."""


class ClassificationError(FlexcrossError):
    """A link quadrangle matches none of the known flexible types."""


class NotApplicableError(FlexcrossError):
    """A check's hypothesis is not satisfied by the given input."""

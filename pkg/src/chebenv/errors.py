"""Exception types raised by the library."""


class EnvelopeError(Exception):
    """Base class for all library errors."""


class DenominatorNearZero(EnvelopeError):
    """The weight polynomial w (nearly) vanishes inside the parameter domain."""


class DimensionMismatch(EnvelopeError, ValueError):
    pass


class DegenerateImage(EnvelopeError):
    """The sampled image of the family has zero extent in both coordinates."""


class DegenerateTriangle(EnvelopeError, ValueError):
    pass


class NumericalFailure(EnvelopeError):
    """A linear algebra routine failed to converge."""


class EmptyZeroSet(EnvelopeError):
    """No zero of the envelope function was found in the searched region."""

"""Exception types raised by the library."""


class NonPolarError(ValueError):
    """A set (or the support of a weight on it) is too small to carry potential theory."""


class UnboundedWeightError(ValueError):
    """A weight cannot be used in a sup-norm problem because it is unbounded on the set."""


class SzegoError(ValueError):
    """The Szego quantity of a weight vanishes, so the requested bound is trivial."""


class ResolutionError(ValueError):
    """A quadrature is too coarse for the requested polynomial degree."""


class ScaleError(ValueError):
    """A brute-force oracle was asked to run beyond its desk-scale limits."""

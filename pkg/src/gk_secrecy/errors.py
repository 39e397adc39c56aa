"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class NonConvergenceError(ArithmeticError):
    """A series, quadrature or contour evaluation missed its error target."""


class UnsupportedShapeError(ValueError):
    """A Meijer-G instance is not one of the supported shapes."""


class LargeShapeError(UnsupportedShapeError):
    """A Meijer-G parameter is too large to evaluate without overflow.

    Callers are expected to route to the analytic large-shape limit
    (Nakagami-m / Rayleigh) instead.
    """

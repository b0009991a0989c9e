"""Exception types shared across the package."""


class RegimeError(ValueError):
    """An operation was asked for outside its parameter regime.

    Typical causes: sqrt of the discriminant requested while it is negative,
    or the logarithmic borderline correction requested away from the
    borderline.
    """


class WeightOverflowError(ArithmeticError):
    """The exponential weight would overflow where the integrand is nonzero.

    Weighted integrals are only meaningful while the discrete weight stays
    finite and resolved; the caller must shrink the data support or enlarge
    the truncation radius.
    """

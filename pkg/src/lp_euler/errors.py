"""Exceptions raised by lp-euler."""

__all__ = [
    "ShapeError",
    "NonRealFieldError",
    "FieldFormatError",
    "SupportError",
    "DivergenceError",
    "HomogeneousMultiplierError",
    "EnvelopeHorizonError",
    "BlowUpError",
]


class ShapeError(ValueError):
    """
    Lattice data does not match the grid.

    Parameters
    ----------
    axis: int or None
        The first axis whose length disagrees with the grid. ``None`` if the
        number of axes itself is wrong.
    message: str
        Human readable description.
    """

    def __init__(self, message, axis=None):
        super().__init__(message)
        self.axis = axis


class NonRealFieldError(ValueError):
    """The coefficients are not conjugate symmetric."""

    def __init__(self, message="non-real field"):
        super().__init__(message)


class FieldFormatError(ValueError):
    """
    A field file could not be decoded.

    Parameters
    ----------
    code: str
        One of ``"header"``, ``"dimension"``, ``"payload length"`` or
        ``"checksum"``.
    message: str
        Human readable description.
    """

    codes = ("header", "dimension", "payload length", "checksum")

    def __init__(self, code, message):
        if code not in self.codes:
            raise ValueError(f"Unknown field format error code {code!r}")
        super().__init__(f"{code}: {message}")
        self.code = code


class SupportError(ValueError):
    """A field has frequencies outside the declared support."""


class DivergenceError(ValueError):
    """A vector field expected to be divergence free is not."""


class HomogeneousMultiplierError(ValueError):
    """A homogeneous multiplier was applied to a field with a mean."""

    def __init__(
        self, message="homogeneous multiplier on non-mean-free field"
    ):
        super().__init__(message)


class EnvelopeHorizonError(ValueError):
    """The Gronwall envelope was evaluated at or beyond its horizon."""

    def __init__(self, message="past envelope horizon"):
        super().__init__(message)


class BlowUpError(RuntimeError):
    """Non-finite values appeared during time stepping."""

    def __init__(self, message="numerical blow-up"):
        super().__init__(message)

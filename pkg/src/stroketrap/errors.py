"""Exception types shared across the package."""


class StrokeTrapError(Exception):
    """Base class for all package errors."""


class InvalidInputError(StrokeTrapError):
    """An argument violates a documented precondition."""


class DegenerateGeometryError(StrokeTrapError):
    """Geometry that cannot form the requested shape (coincident centers,
    collinear or self-intersecting quadrilaterals)."""


class InvalidTransformError(StrokeTrapError):
    """An affine transform with a singular matrix."""


class UnsupportedTransformError(StrokeTrapError):
    """A transform outside the supported similarity subgroup (circles must
    map to circles)."""

"""Exception types shared across the package."""


class PolymerionError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PolymerionError):
    """Invalid model, region, or run configuration."""


class WrapError(ConfigError):
    """A periodic wrap identified two sites of the same bond.

    Raised when the torus is too small for the interaction range, so a
    bond's projection onto the torus is not one-to-one. The message names
    the offending bond.
    """


class NumericalError(PolymerionError):
    """A computation could not be completed reliably.

    Used for oversized exact diagonalizations, non-convergent iterations,
    and failed certified root brackets.
    """

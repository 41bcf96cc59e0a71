"""Exception types shared across the codec."""

from __future__ import annotations


class DecodeFailure(Exception):
    """The payload could not be recovered."""


class UnsupportedRate(ValueError):
    pass


class DimensionMismatch(ValueError):
    pass


class LengthMismatch(ValueError):
    pass


class EpochTooShort(ValueError):
    pass


class QuadNotFound(Exception):
    """No usable screen quadrilateral in the accumulator image."""


class SingularHomography(ValueError):
    pass


class DegeneratePatch(ValueError):
    """A patch with zero variance cannot be correlated."""


class ConfigError(ValueError):
    pass


class InvalidStore(ValueError):
    """A frame directory is missing, malformed or inconsistent with its manifest."""

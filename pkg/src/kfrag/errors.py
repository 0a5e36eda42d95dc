"""Exception types shared across the toolkit."""

from __future__ import annotations


class FragmentationError(Exception):
    """Base class for all toolkit errors."""


class ParameterError(FragmentationError, ValueError):
    """Invalid or mutually inconsistent arguments."""


class ThresholdError(FragmentationError):
    """Too few fragments are available for reconstruction."""

    def __init__(self, message: str, missing: tuple[int, ...] | list[int] = ()):
        super().__init__(message)
        self.missing = tuple(missing)


class IntegrityError(FragmentationError):
    """Stored or reconstructed data failed a consistency check."""


class StorageError(FragmentationError):
    """A storage backend operation failed."""

    def __init__(self, message: str, site: int | None = None):
        super().__init__(message)
        self.site = site

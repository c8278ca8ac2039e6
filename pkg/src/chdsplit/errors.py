"""Exception hierarchy.

Every error carries a ``category`` equal to its class name so the CLI can
print a one-line, machine-parsable failure reason.
"""

from __future__ import annotations


class SplitError(Exception):
    """Base class for all errors raised by chdsplit."""

    @property
    def category(self) -> str:
        return type(self).__name__


class PartitionTooSmall(SplitError, ValueError):
    pass


class SizesExceedDataset(SplitError, ValueError):
    pass


class EmptyDataset(SplitError, ValueError):
    pass


class IoError(SplitError, OSError):
    pass


class InvalidSpec(SplitError, ValueError):
    pass


class EmptyPixels(SplitError, ValueError):
    pass


class MixedConfigs(SplitError, ValueError):
    pass


class DegenerateReference(SplitError, ValueError):
    pass


class KTooLarge(SplitError, ValueError):
    pass


class InvalidK(SplitError, ValueError):
    pass


class ClassTooSmall(SplitError, ValueError):
    def __init__(self, label: str, message: str | None = None):
        self.label = label
        super().__init__(message or f"class {label!r} is too small")


class NonFiniteInput(SplitError, ValueError):
    pass


class MissingBand(SplitError, KeyError):
    def __init__(self, band: str):
        self.band = band
        super().__init__(band)

    def __str__(self) -> str:
        return f"missing band {self.band!r}"


class SchemaMismatch(SplitError, ValueError):
    pass


class FingerprintMismatch(SplitError, ValueError):
    pass

"""Typed errors shared across the package.

Every failure surfaced by parsers, transforms, and the pipeline is one of
these classes, so callers (and the CLI exit-code mapping) can dispatch on
type instead of message text.
"""


class FaceSignError(Exception):
    """Base class for all package errors."""


class MalformedInput(FaceSignError, ValueError):
    """Input bytes/file/JSON violate the expected format."""


class EmptySequence(FaceSignError, ValueError):
    """A landmark sequence has no frames, or no frame with a detected face."""


class InvalidSegmentation(FaceSignError, ValueError):
    """Segment boundaries or permutation order are inconsistent."""


class ShapeError(FaceSignError, ValueError):
    """Array dimensions do not match the configured model or tensor layout."""


class ProfileMismatch(FaceSignError, ValueError):
    """Data recorded under one detector profile was fed to another."""


class EmptyDataset(FaceSignError, ValueError):
    """A dataset split required to be nonempty has no samples."""


class DegenerateSplit(FaceSignError, ValueError):
    """A stratified split left some class without validation samples."""


class UnsupportedVersion(FaceSignError, ValueError):
    """A persisted file declares a format version this build cannot read."""


class IoFailure(FaceSignError, OSError):
    """Reading or writing dataset artifacts failed at the OS level."""


class TruncationWarning(UserWarning):
    """A sequence longer than the target length was cut to fit."""


class FillForwardWarning(UserWarning):
    """Frames without a detected face were replaced by neighboring frames."""

"""Video-to-landmark extraction adapter for the facesign pipeline."""

from .backends import (
    DetectorUnavailable,
    Dlib68Backend,
    Mediapipe468Backend,
    SyntheticBackend,
    make_backend,
)
from .extract import ExtractionJob, VideoUnreadable, extract

__version__ = "0.1.0"

__all__ = [
    "DetectorUnavailable",
    "Dlib68Backend",
    "ExtractionJob",
    "Mediapipe468Backend",
    "SyntheticBackend",
    "VideoUnreadable",
    "extract",
    "make_backend",
]

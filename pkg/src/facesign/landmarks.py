"""Domain types for 2-D facial landmark data.

Coordinates are pixels as produced by a landmark detector until
`preprocess.normalize_sequence` rescales them to dimensionless face units.
All types are immutable after construction (arrays are made read-only), so
they are safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import NamedTuple, Optional

import numpy as np

from .errors import EmptySequence, MalformedInput


class SentenceType(IntEnum):
    """Three-way sentence-type label; integer codes double as class indices."""

    AFFIRMATIVE = 0
    YES_NO_QUESTION = 1
    WH_QUESTION = 2

    @property
    def wire_name(self) -> str:
        """Lower-case name used in manifests and CLI output."""
        return self.name.lower()

    @classmethod
    def from_wire(cls, name: str) -> "SentenceType":
        try:
            return cls[name.upper()]
        except KeyError:
            raise MalformedInput(f"unknown sentence type {name!r}") from None


class Point2(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class DetectorProfile:
    """Fixed landmark topology of one face-landmark detector.

    `feature_dim` is always 2 * landmark_count: each frame flattens to the
    interleaved coordinate vector (x0, y0, x1, y1, ...).
    """

    name: str
    landmark_count: int
    nose_tip_index: int

    def __post_init__(self) -> None:
        if self.landmark_count < 1:
            raise MalformedInput(f"landmark_count must be >= 1, got {self.landmark_count}")
        if not 0 <= self.nose_tip_index < self.landmark_count:
            raise MalformedInput(
                f"nose_tip_index {self.nose_tip_index} out of range for "
                f"{self.landmark_count} landmarks"
            )

    @property
    def feature_dim(self) -> int:
        return 2 * self.landmark_count


OPENPOSE_70 = DetectorProfile("openpose70", landmark_count=70, nose_tip_index=30)
MEDIAPIPE_468 = DetectorProfile("mediapipe468", landmark_count=468, nose_tip_index=1)
DLIB_68 = DetectorProfile("dlib68", landmark_count=68, nose_tip_index=30)

PROFILES = {p.name: p for p in (OPENPOSE_70, MEDIAPIPE_468, DLIB_68)}


def get_profile(name: str) -> DetectorProfile:
    try:
        return PROFILES[name]
    except KeyError:
        raise MalformedInput(
            f"unknown detector profile {name!r}; expected one of {sorted(PROFILES)}"
        ) from None


def _freeze(arr: np.ndarray) -> np.ndarray:
    # always copy: freezing must never flip the writeable flag on a caller's array
    out = np.array(arr, dtype=np.float64, order="C")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class LandmarkFrame:
    """One video frame's landmark points, shape (landmark_count, 2).

    `absent` marks frames where the detector found no face; such frames
    carry all-zero coordinates by contract.
    """

    points: np.ndarray
    absent: bool = False

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise MalformedInput(f"frame points must have shape (N, 2), got {pts.shape}")
        if not np.isfinite(pts).all():
            raise MalformedInput("frame contains non-finite coordinates")
        if self.absent and pts.any():
            raise MalformedInput("absent frame must have all-zero coordinates")
        object.__setattr__(self, "points", _freeze(pts))

    @property
    def num_points(self) -> int:
        return self.points.shape[0]

    def point(self, i: int) -> Point2:
        x, y = self.points[i]
        return Point2(float(x), float(y))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkFrame):
            return NotImplemented
        return self.absent == other.absent and np.array_equal(self.points, other.points)

    __hash__ = None  # type: ignore[assignment]


def absent_frame(profile: DetectorProfile) -> LandmarkFrame:
    """All-zero frame standing in for a failed detection."""
    return LandmarkFrame(np.zeros((profile.landmark_count, 2)), absent=True)


@dataclass(frozen=True, eq=False)
class LandmarkSequence:
    """Ordered landmark frames of one video under a single detector profile."""

    profile: DetectorProfile
    frames: tuple
    fps: Optional[float] = None

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if not frames:
            raise EmptySequence("sequence has no frames")
        for i, frame in enumerate(frames):
            if frame.num_points != self.profile.landmark_count:
                raise MalformedInput(
                    f"frame {i} has {frame.num_points} points, profile "
                    f"{self.profile.name} expects {self.profile.landmark_count}"
                )
        if all(f.absent for f in frames):
            raise EmptySequence("no frame contains a detected face")
        if self.fps is not None:
            fps = float(self.fps)
            if not np.isfinite(fps) or fps <= 0:
                raise MalformedInput(f"fps must be finite and positive, got {self.fps}")
            object.__setattr__(self, "fps", fps)

    def __len__(self) -> int:
        return len(self.frames)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LandmarkSequence):
            return NotImplemented
        return (
            self.profile == other.profile
            and self.fps == other.fps
            and len(self.frames) == len(other.frames)
            and all(a == b for a, b in zip(self.frames, other.frames))
        )

    __hash__ = None  # type: ignore[assignment]

    def replace_frames(self, frames) -> "LandmarkSequence":
        """New sequence with the same profile/fps and different frames."""
        return LandmarkSequence(self.profile, tuple(frames), self.fps)

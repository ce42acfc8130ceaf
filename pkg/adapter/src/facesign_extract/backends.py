"""Face-landmark detector backends.

A backend turns one BGR video frame into an (N, 2) float64 pixel-coordinate
array, or None when no face is found. Real detectors are imported lazily so
the adapter degrades cleanly (exit 4) on machines without them; the
synthetic backend exists so the extraction plumbing and output format can
be exercised everywhere.

Only x and y are emitted; detectors that also estimate depth have it
discarded here.
"""

from __future__ import annotations

from typing import Optional, Protocol

import numpy as np


class DetectorUnavailable(RuntimeError):
    """The requested detector (or its model file) cannot be loaded."""


class DetectorBackend(Protocol):
    name: str
    landmark_count: int

    def detect(self, frame_bgr: np.ndarray) -> Optional[np.ndarray]:
        """Landmarks for the first detected face, in pixels, or None."""
        ...


class Mediapipe468Backend:
    """MediaPipe face mesh, single face, 468 landmarks.

    The refined (478-point, with irises) model variant is rejected: the
    downstream profile is defined for exactly 468 points.
    """

    name = "mediapipe468"
    landmark_count = 468

    def __init__(self):
        try:
            import mediapipe as mp
        except ImportError as exc:
            raise DetectorUnavailable(
                "mediapipe is not installed (pip install facesign-extract[mediapipe])"
            ) from exc
        self._mesh = mp.solutions.face_mesh.FaceMesh(
            static_image_mode=False,
            max_num_faces=1,
            refine_landmarks=False,
        )

    def detect(self, frame_bgr: np.ndarray) -> Optional[np.ndarray]:
        height, width = frame_bgr.shape[:2]
        rgb = frame_bgr[:, :, ::-1]
        result = self._mesh.process(rgb)
        if not result.multi_face_landmarks:
            return None
        face = result.multi_face_landmarks[0].landmark
        if len(face) != self.landmark_count:
            raise DetectorUnavailable(
                f"detector produced {len(face)} landmarks, expected "
                f"{self.landmark_count}; incompatible face-mesh model variant"
            )
        pts = np.array([(lm.x * width, lm.y * height) for lm in face], dtype=np.float64)
        return pts


class Dlib68Backend:
    """dlib frontal face detector + 68-point shape predictor."""

    name = "dlib68"
    landmark_count = 68

    def __init__(self, model_path: Optional[str] = None):
        try:
            import dlib
        except ImportError as exc:
            raise DetectorUnavailable(
                "dlib is not installed (pip install facesign-extract[dlib])"
            ) from exc
        if not model_path:
            raise DetectorUnavailable(
                "dlib68 needs a shape-predictor model file (--dlib-model PATH, "
                "the 68-landmark predictor)"
            )
        try:
            self._predictor = dlib.shape_predictor(model_path)
        except RuntimeError as exc:
            raise DetectorUnavailable(f"cannot load dlib model {model_path!r}: {exc}") from exc
        self._detector = dlib.get_frontal_face_detector()

    def detect(self, frame_bgr: np.ndarray) -> Optional[np.ndarray]:
        gray = np.ascontiguousarray(frame_bgr.mean(axis=2).astype(np.uint8))
        boxes = self._detector(gray, 1)
        if not boxes:
            return None
        shape = self._predictor(gray, boxes[0])
        if shape.num_parts != self.landmark_count:
            raise DetectorUnavailable(
                f"detector produced {shape.num_parts} landmarks, expected "
                f"{self.landmark_count}; wrong shape-predictor model"
            )
        return np.array(
            [(shape.part(i).x, shape.part(i).y) for i in range(shape.num_parts)],
            dtype=np.float64,
        )


class SyntheticBackend:
    """Deterministic stand-in detector for tests and demos.

    Emits a frame-index-dependent ring of points around the image center
    through the same extraction path the real backends use; every
    `absent_every`-th frame reports no face.
    """

    name = "synthetic"

    def __init__(self, landmark_count: int, absent_every: int = 0):
        self.landmark_count = landmark_count
        self.absent_every = absent_every
        self._frame_index = -1

    def detect(self, frame_bgr: np.ndarray) -> Optional[np.ndarray]:
        self._frame_index += 1
        if self.absent_every and (self._frame_index + 1) % self.absent_every == 0:
            return None
        height, width = frame_bgr.shape[:2]
        n = self.landmark_count
        theta = 2.0 * np.pi * (np.arange(n) / n + self._frame_index / 100.0)
        radius = min(width, height) * (0.25 + 0.05 * np.sin(self._frame_index / 7.0))
        return np.column_stack(
            [width / 2.0 + radius * np.cos(theta), height / 2.0 + radius * np.sin(theta)]
        )


PROFILE_LANDMARKS = {"mediapipe468": 468, "dlib68": 68}


def make_backend(profile: str, backend: str = "auto",
                 dlib_model: Optional[str] = None) -> DetectorBackend:
    if profile not in PROFILE_LANDMARKS:
        raise ValueError(f"unknown profile {profile!r}; expected one of {sorted(PROFILE_LANDMARKS)}")
    if backend == "synthetic":
        return SyntheticBackend(PROFILE_LANDMARKS[profile])
    if profile == "mediapipe468":
        return Mediapipe468Backend()
    return Dlib68Backend(model_path=dlib_model)

"""Video -> canonical landmark JSONL extraction.

The output format is the classifier pipeline's interchange schema: one
header line, then one frame record per video frame in order, with
``"absent": true`` (and zero points) where the detector found no face.
Coordinates are pixels; downstream normalization handles scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

import cv2
import numpy as np

from .backends import DetectorBackend, PROFILE_LANDMARKS


class VideoUnreadable(RuntimeError):
    """The input video cannot be opened or yields no frames."""


@dataclass(frozen=True)
class ExtractionJob:
    video_path: Union[str, Path]
    profile: str
    output_path: Union[str, Path]

    def __post_init__(self) -> None:
        if self.profile not in PROFILE_LANDMARKS:
            raise ValueError(
                f"unknown profile {self.profile!r}; expected one of "
                f"{sorted(PROFILE_LANDMARKS)}"
            )


def _frame_record(index: int, points: Optional[np.ndarray], landmark_count: int) -> dict:
    if points is None:
        return {
            "type": "frame",
            "index": index,
            "absent": True,
            "points": [[0.0, 0.0]] * landmark_count,
        }
    if points.shape != (landmark_count, 2):
        raise ValueError(
            f"backend returned shape {points.shape}, expected ({landmark_count}, 2)"
        )
    if not np.isfinite(points).all():
        raise ValueError(f"backend returned non-finite coordinates at frame {index}")
    return {"type": "frame", "index": index, "points": points.tolist()}


def extract(job: ExtractionJob, backend: DetectorBackend) -> int:
    """Run the detector over every frame; returns the number of frames written."""
    landmark_count = PROFILE_LANDMARKS[job.profile]
    if backend.landmark_count != landmark_count:
        raise ValueError(
            f"backend emits {backend.landmark_count} landmarks but profile "
            f"{job.profile} requires {landmark_count}"
        )

    capture = cv2.VideoCapture(str(job.video_path))
    if not capture.isOpened():
        raise VideoUnreadable(f"cannot open video {job.video_path}")
    try:
        fps = capture.get(cv2.CAP_PROP_FPS)
        fps = float(fps) if fps and fps > 0 else None

        frames_written = 0
        with open(job.output_path, "w", encoding="utf-8") as out:
            header = {
                "type": "header",
                "profile": job.profile,
                "fps": fps,
                "landmarks": landmark_count,
            }
            out.write(json.dumps(header) + "\n")
            while True:
                ok, frame = capture.read()
                if not ok:
                    break
                points = backend.detect(frame)
                record = _frame_record(frames_written, points, landmark_count)
                out.write(json.dumps(record) + "\n")
                frames_written += 1
    finally:
        capture.release()

    if frames_written == 0:
        Path(job.output_path).unlink(missing_ok=True)
        raise VideoUnreadable(f"video {job.video_path} yields no frames")
    return frames_written

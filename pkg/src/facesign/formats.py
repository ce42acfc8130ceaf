"""File formats: per-frame detector JSON, canonical JSONL, and CSV.

The canonical interchange format is line-delimited JSON:

    {"type": "header", "profile": "openpose70", "fps": 30.0, "landmarks": 70}
    {"type": "frame", "index": 0, "points": [[x0, y0], [x1, y1], ...]}
    ...

Frame indices run 0..T-1 consecutively. Frames where the detector found no
face additionally carry ``"absent": true`` (with zero points). Coordinates
are written with Python's shortest round-trip float rendering, so
read(write(seq)) reproduces every float64 bit-exactly.
"""

from __future__ import annotations

import json
import re
import warnings
from contextlib import contextmanager
from pathlib import Path
from typing import IO, Optional, Union

import numpy as np

from .errors import EmptySequence, FillForwardWarning, MalformedInput
from .landmarks import (
    DetectorProfile,
    LandmarkFrame,
    LandmarkSequence,
    absent_frame,
    get_profile,
)

PathOrFile = Union[str, Path, IO[str]]


def _reject_constant(token: str):
    raise MalformedInput(f"non-finite number {token!r} in JSON input")


def _loads(text: Union[str, bytes]) -> object:
    try:
        return json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc


def _as_finite_float(value: object, context: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise MalformedInput(f"{context}: expected a number, got {value!r}")
    out = float(value)
    if not np.isfinite(out):
        raise MalformedInput(f"{context}: non-finite value {value!r}")
    return out


def parse_openpose_frame(data: Union[bytes, str], profile: DetectorProfile) -> LandmarkFrame:
    """Parse one OpenPose per-frame JSON document into a LandmarkFrame.

    The document holds a ``people`` array whose entries carry
    ``face_keypoints_2d``: a flat (x, y, confidence) * N list. Confidence is
    discarded. An empty ``people`` array yields an absent frame; when several
    people are present the first entry is used (single-signer videos).
    """
    doc = _loads(data)
    if not isinstance(doc, dict) or "people" not in doc:
        raise MalformedInput("OpenPose frame JSON must be an object with a 'people' key")
    people = doc["people"]
    if not isinstance(people, list):
        raise MalformedInput("'people' must be an array")
    if not people:
        return absent_frame(profile)
    person = people[0]
    if not isinstance(person, dict) or "face_keypoints_2d" not in person:
        raise MalformedInput("person entry lacks 'face_keypoints_2d'")
    flat = person["face_keypoints_2d"]
    expected = 3 * profile.landmark_count
    if not isinstance(flat, list) or len(flat) != expected:
        got = len(flat) if isinstance(flat, list) else type(flat).__name__
        raise MalformedInput(
            f"face_keypoints_2d must hold {expected} numbers "
            f"((x, y, confidence) x {profile.landmark_count}), got {got}"
        )
    values = [_as_finite_float(v, "face_keypoints_2d") for v in flat]
    pts = np.asarray(values, dtype=np.float64).reshape(profile.landmark_count, 3)[:, :2]
    return LandmarkFrame(pts)


_DIGITS = re.compile(r"\d+")


def _frame_index(path: Path) -> int:
    runs = _DIGITS.findall(path.stem)
    if not runs:
        raise MalformedInput(f"{path.name}: no frame index digits in filename")
    return int(runs[-1])


def load_sequence_openpose(
    directory: Union[str, Path],
    profile: DetectorProfile,
    fps: Optional[float] = None,
) -> LandmarkSequence:
    """Load a directory of OpenPose per-frame JSON files as one sequence.

    Files are ordered by the numeric frame index embedded in each filename
    (the ``*_%012d_keypoints.json`` convention). Absent frames are replaced
    by a copy of the most recent detected frame; leading absent frames by
    the first detected frame. A sequence with no detected face at all is an
    error.
    """
    directory = Path(directory)
    files = sorted(directory.glob("*.json"), key=lambda p: p.name)
    if not files:
        raise EmptySequence(f"{directory}: no frames found")
    indexed = []
    for path in files:
        indexed.append((_frame_index(path), path))
    indexed.sort(key=lambda item: item[0])
    seen = set()
    for idx, path in indexed:
        if idx in seen:
            raise MalformedInput(f"{path.name}: duplicate frame index {idx}")
        seen.add(idx)

    frames = []
    for _, path in indexed:
        try:
            frames.append(parse_openpose_frame(path.read_text(encoding="utf-8"), profile))
        except MalformedInput as exc:
            raise MalformedInput(f"{path}: {exc}") from exc

    first_present = next((i for i, f in enumerate(frames) if not f.absent), None)
    if first_present is None:
        raise EmptySequence(f"{directory}: all frames lack a detected face")

    filled = 0
    last = frames[first_present]
    out = []
    for i, frame in enumerate(frames):
        if frame.absent:
            out.append(LandmarkFrame(last.points.copy()))
            filled += 1
        else:
            last = frame
            out.append(frame)
    if filled:
        warnings.warn(
            f"{directory}: filled {filled} absent frame(s) from neighbors",
            FillForwardWarning,
            stacklevel=2,
        )
    return LandmarkSequence(profile, tuple(out), fps)


@contextmanager
def _open_text(target: PathOrFile, mode: str):
    if isinstance(target, (str, Path)):
        with open(target, mode, encoding="utf-8", newline="") as handle:
            yield handle
    else:
        yield target


def write_canonical(seq: LandmarkSequence, sink: PathOrFile) -> None:
    """Write a sequence in the canonical JSONL format (see module docstring)."""
    with _open_text(sink, "w") as out:
        header = {
            "type": "header",
            "profile": seq.profile.name,
            "fps": seq.fps,
            "landmarks": seq.profile.landmark_count,
        }
        out.write(json.dumps(header) + "\n")
        for i, frame in enumerate(seq.frames):
            record = {"type": "frame", "index": i}
            if frame.absent:
                record["absent"] = True
            record["points"] = frame.points.tolist()
            out.write(json.dumps(record) + "\n")


def read_canonical(source: PathOrFile) -> LandmarkSequence:
    """Read a canonical JSONL sequence, validating the schema strictly."""
    with _open_text(source, "r") as handle:
        lines = enumerate(handle, start=1)
        header = None
        for lineno, raw in lines:
            if raw.strip():
                header = (lineno, _loads(raw))
                break
        if header is None:
            raise MalformedInput("empty canonical file")
        lineno, doc = header
        if not isinstance(doc, dict) or doc.get("type") != "header":
            raise MalformedInput(f"line {lineno}: first record must be the header")
        try:
            profile = get_profile(doc["profile"])
        except KeyError:
            raise MalformedInput(f"line {lineno}: header lacks 'profile'") from None
        if doc.get("landmarks") != profile.landmark_count:
            raise MalformedInput(
                f"line {lineno}: header landmarks {doc.get('landmarks')!r} does not "
                f"match profile {profile.name} ({profile.landmark_count})"
            )
        fps = doc.get("fps")
        if fps is not None:
            fps = _as_finite_float(fps, f"line {lineno}: fps")

        frames = []
        for lineno, raw in lines:
            if not raw.strip():
                continue
            rec = _loads(raw)
            if not isinstance(rec, dict) or rec.get("type") != "frame":
                raise MalformedInput(f"line {lineno}: expected a frame record")
            if rec.get("index") != len(frames):
                raise MalformedInput(
                    f"line {lineno}: frame index {rec.get('index')!r} out of order "
                    f"(expected {len(frames)})"
                )
            points = rec.get("points")
            if not isinstance(points, list) or len(points) != profile.landmark_count:
                raise MalformedInput(
                    f"line {lineno}: frame must list {profile.landmark_count} points"
                )
            pts = np.empty((profile.landmark_count, 2), dtype=np.float64)
            for i, pair in enumerate(points):
                if not isinstance(pair, list) or len(pair) != 2:
                    raise MalformedInput(f"line {lineno}: point {i} must be [x, y]")
                pts[i, 0] = _as_finite_float(pair[0], f"line {lineno}: point {i}")
                pts[i, 1] = _as_finite_float(pair[1], f"line {lineno}: point {i}")
            absent = rec.get("absent", False)
            if not isinstance(absent, bool):
                raise MalformedInput(f"line {lineno}: 'absent' must be a boolean")
            try:
                frames.append(LandmarkFrame(pts, absent=absent))
            except MalformedInput as exc:
                raise MalformedInput(f"line {lineno}: {exc}") from exc

    return LandmarkSequence(profile, tuple(frames), fps)


def read_csv_sequence(
    source: PathOrFile,
    profile: DetectorProfile,
    fps: Optional[float] = None,
) -> LandmarkSequence:
    """Read one-frame-per-row CSV with x0,y0,x1,y1,... columns.

    A single leading header row is tolerated (detected by non-numeric cells).
    """
    dim = profile.feature_dim
    frames = []
    with _open_text(source, "r") as handle:
        first_data_row = True
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            cells = line.split(",")
            if first_data_row:
                try:
                    values = [float(c) for c in cells]
                except ValueError:
                    first_data_row = False
                    continue  # header row
            else:
                try:
                    values = [float(c) for c in cells]
                except ValueError as exc:
                    raise MalformedInput(f"row {lineno}: non-numeric cell ({exc})") from exc
            first_data_row = False
            if len(values) != dim:
                raise MalformedInput(
                    f"row {lineno}: expected {dim} columns for {profile.name}, "
                    f"got {len(values)}"
                )
            arr = np.asarray(values, dtype=np.float64)
            if not np.isfinite(arr).all():
                raise MalformedInput(f"row {lineno}: non-finite value")
            frames.append(LandmarkFrame(arr.reshape(profile.landmark_count, 2)))
    if not frames:
        raise EmptySequence("CSV contains no data rows")
    return LandmarkSequence(profile, tuple(frames), fps)

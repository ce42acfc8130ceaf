"""Class-conditional synthetic landmark sequences for desk-scale experiments.

This generator is a test fixture, not a linguistic model: it encodes the
qualitative facial signatures of the three sentence types (raised eyebrows
and tucked chin for yes/no questions; repeated weak head shakes with
furrowed eyebrows for wh-questions) as simple geometric motions on a
schematic face so that the full pipeline can be exercised without any real
video data.

Coordinates use the image convention (y grows downward). Templates are
built in dimensionless face units with the nose tip at the origin and unit
mean distance to the other landmarks, then emitted pixel-like: scaled by
100 with the nose tip at (320, 240), so downstream normalization is
exercised end-to-end.

Landmark group index ranges are fixed constants per profile, documented in
`LANDMARK_GROUPS`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import formats
from .errors import EmptyDataset, IoFailure
from .landmarks import DetectorProfile, LandmarkFrame, LandmarkSequence, SentenceType
from .pipeline import DatasetManifest, ManifestEntry, save_manifest

PIXEL_SCALE = 100.0
PIXEL_NOSE = np.array([320.0, 240.0])
FRAME_RATE = 30.0


@dataclass(frozen=True)
class SynthConfig:
    """Generator settings; amplitudes/noise are in normalized face units."""

    profile: DetectorProfile
    counts: Tuple[int, int, int]
    min_frames: int = 60
    max_frames: int = 300
    noise_sigma: float = 0.02
    expression_amplitude: float = 0.15
    shake_frequency: float = 1.5
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "counts", tuple(int(c) for c in self.counts))
        if len(self.counts) != 3 or any(c < 0 for c in self.counts):
            raise ValueError(f"counts must be three non-negative integers, got {self.counts}")
        if not 1 <= self.min_frames <= self.max_frames <= 300:
            raise ValueError(
                f"need 1 <= min_frames <= max_frames <= 300, got "
                f"{self.min_frames}/{self.max_frames}"
            )
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be >= 0")
        if not self.expression_amplitude > 0:
            raise ValueError("expression_amplitude must be > 0")
        if not self.shake_frequency > 0:
            raise ValueError("shake_frequency must be > 0")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


def _ellipse(n: int, cx: float, cy: float, rx: float, ry: float,
             start: float, stop: float, endpoint: bool = True) -> np.ndarray:
    theta = np.linspace(start, stop, n, endpoint=endpoint)
    return np.column_stack([cx + rx * np.cos(theta), cy + ry * np.sin(theta)])


def _ibug_layout(landmark_count: int) -> np.ndarray:
    """Schematic 68-point face (plus 2 pupils for the 70-point variant)."""
    pts = np.zeros((landmark_count, 2))
    # jaw 0..16: arc from left temple over the chin to the right temple
    theta = np.linspace(np.pi, 0.0, 17)
    pts[0:17] = np.column_stack([-0.9 * np.cos(theta), 0.1 + 1.1 * np.sin(theta)])
    # eyebrows 17..21 (image left) and 22..26 (image right), slight arcs
    for base, x0, x1 in ((17, -0.75, -0.25), (22, 0.25, 0.75)):
        xs = np.linspace(x0, x1, 5)
        mid = (x0 + x1) / 2.0
        pts[base : base + 5] = np.column_stack([xs, -0.55 - 0.05 * (1 - ((xs - mid) / 0.25) ** 2)])
    # nose bridge 27..30, tip (index 30) at the origin
    pts[27:31] = np.column_stack([np.zeros(4), np.linspace(-0.45, 0.0, 4)])
    # nostril line 31..35
    pts[31:36] = np.column_stack([np.linspace(-0.16, 0.16, 5), np.full(5, 0.12)])
    # eyes 36..41 / 42..47: hexagons
    hexa = np.deg2rad([180.0, 120.0, 60.0, 0.0, -60.0, -120.0])
    for base, cx in ((36, -0.45), (42, 0.45)):
        pts[base : base + 6] = np.column_stack(
            [cx + 0.12 * np.cos(hexa), -0.35 - 0.06 * np.sin(hexa)]
        )
    # mouth: outer ring 48..59, inner ring 60..67
    pts[48:60] = _ellipse(12, 0.0, 0.55, 0.35, 0.18, np.pi, -np.pi, endpoint=False)
    pts[60:68] = _ellipse(8, 0.0, 0.55, 0.22, 0.08, np.pi, -np.pi, endpoint=False)
    if landmark_count == 70:
        pts[68] = (-0.45, -0.35)
        pts[69] = (0.45, -0.35)
    return pts


def _mediapipe_layout() -> np.ndarray:
    """Schematic 468-point mesh; the nose tip sits at index 1."""
    pts = np.zeros((468, 2))
    pts[0] = (0.0, -0.08)  # point just above the tip
    pts[1] = (0.0, 0.0)    # nose tip
    pts[2:6] = np.column_stack([np.zeros(4), np.linspace(-0.5, -0.15, 4)])  # bridge
    pts[6:10] = np.column_stack([np.linspace(-0.15, 0.15, 4), np.full(4, 0.12)])  # nostrils
    # eyebrows 10..34 (image left) and 35..59 (image right)
    for base, x0, x1 in ((10, -0.8, -0.2), (35, 0.2, 0.8)):
        xs = np.linspace(x0, x1, 25)
        mid = (x0 + x1) / 2.0
        pts[base : base + 25] = np.column_stack(
            [xs, -0.55 - 0.06 * (1 - ((xs - mid) / 0.3) ** 2)]
        )
    # eyes 60..89 / 90..119: 30-point rings
    for base, cx in ((60, -0.45), (90, 0.45)):
        pts[base : base + 30] = _ellipse(30, cx, -0.35, 0.14, 0.07, np.pi, -np.pi, endpoint=False)
    # mouth 120..155 outer, 156..179 inner
    pts[120:156] = _ellipse(36, 0.0, 0.55, 0.35, 0.18, np.pi, -np.pi, endpoint=False)
    pts[156:180] = _ellipse(24, 0.0, 0.55, 0.22, 0.08, np.pi, -np.pi, endpoint=False)
    # jaw 180..219: lower face arc; forehead 220..239: upper arc
    pts[180:220] = _ellipse(40, 0.0, 0.05, 0.95, 1.15, np.pi, 0.0)
    pts[220:240] = _ellipse(20, 0.0, 0.05, 0.95, 0.85, np.pi, 2 * np.pi, endpoint=False)
    # cheek/surface fill 240..467: four concentric rings of 57 points
    for ring, radius in enumerate((0.35, 0.55, 0.75, 0.9)):
        base = 240 + ring * 57
        offset = 2 * np.pi * ring / 8.0
        pts[base : base + 57] = _ellipse(
            57, 0.0, 0.1, radius, radius, offset, offset + 2 * np.pi, endpoint=False
        )
    return pts


# Index groups moved by the class dynamics, per profile.
LANDMARK_GROUPS: Dict[str, Dict[str, np.ndarray]] = {
    "openpose70": {"eyebrows": np.arange(17, 27), "jaw": np.arange(0, 17)},
    "dlib68": {"eyebrows": np.arange(17, 27), "jaw": np.arange(0, 17)},
    "mediapipe468": {"eyebrows": np.arange(10, 60), "jaw": np.arange(180, 220)},
}


@lru_cache(maxsize=None)
def _template_points(profile_name: str, landmark_count: int) -> np.ndarray:
    if profile_name == "mediapipe468":
        pts = _mediapipe_layout()
        nose_index = 1
    elif profile_name in ("openpose70", "dlib68"):
        pts = _ibug_layout(landmark_count)
        nose_index = 30
    else:
        raise ValueError(f"no template for profile {profile_name!r}")
    pts = pts - pts[nose_index]
    distances = np.sqrt((pts * pts).sum(axis=1))
    pts = pts / (distances.sum() / (landmark_count - 1))
    pts.setflags(write=False)
    return pts


def neutral_face_template(profile: DetectorProfile) -> LandmarkFrame:
    """Deterministic schematic face: nose tip at the origin, unit mean distance."""
    return LandmarkFrame(_template_points(profile.name, profile.landmark_count).copy())


def _class_offsets(
    label: SentenceType,
    length: int,
    profile: DetectorProfile,
    amplitude: float,
    shake_frequency: float,
) -> np.ndarray:
    """Per-frame additive offsets (length, N, 2) encoding the class signature."""
    base = _template_points(profile.name, profile.landmark_count)
    groups = LANDMARK_GROUPS[profile.name]
    n = profile.landmark_count
    offsets = np.zeros((length, n, 2))
    if label == SentenceType.AFFIRMATIVE:
        return offsets
    if label == SentenceType.YES_NO_QUESTION:
        # eyebrows rise and the jaw tucks toward the nose over the final third
        start = (2 * length) // 3
        span = max(length - start, 1)
        jaw = groups["jaw"]
        jaw_pts = base[jaw]
        norms = np.sqrt((jaw_pts * jaw_pts).sum(axis=1, keepdims=True))
        toward_nose = -jaw_pts / np.maximum(norms, 1e-12)
        for t in range(start, length):
            ramp = (t - start + 1) / span
            offsets[t, groups["eyebrows"], 1] = -amplitude * ramp
            offsets[t, jaw] = amplitude * ramp * toward_nose
        return offsets
    # WH question: horizontal head shake plus constantly furrowed eyebrows
    t = np.arange(length)
    shake = amplitude * np.sin(2.0 * np.pi * shake_frequency * t / FRAME_RATE)
    offsets[:, :, 0] = shake[:, np.newaxis]
    offsets[:, groups["eyebrows"], 1] += amplitude / 2.0
    return offsets


def generate_sample(
    label: SentenceType, cfg: SynthConfig, index: int
) -> Tuple[LandmarkSequence, SentenceType]:
    """One synthetic sequence; fully determined by (cfg.seed, label, index)."""
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence((cfg.seed, int(label), index)))
    )
    length = int(rng.integers(cfg.min_frames, cfg.max_frames + 1))
    base = _template_points(cfg.profile.name, cfg.profile.landmark_count)
    motion = base + _class_offsets(
        label, length, cfg.profile, cfg.expression_amplitude, cfg.shake_frequency
    )
    if cfg.noise_sigma > 0:
        motion = motion + rng.normal(0.0, cfg.noise_sigma, size=motion.shape)
    pixels = motion * PIXEL_SCALE + PIXEL_NOSE
    frames = tuple(LandmarkFrame(pixels[t]) for t in range(length))
    return LandmarkSequence(cfg.profile, frames, fps=FRAME_RATE), label


def generate_dataset(
    cfg: SynthConfig,
    out_dir: Union[str, Path],
    val_counts: Optional[Sequence[int]] = None,
) -> DatasetManifest:
    """Write canonical JSONL files per class plus a manifest.json.

    Without `val_counts` every sample is written with split "unassigned".
    With it, each class k gets cfg.counts[k] train samples followed by
    val_counts[k] val samples (sample indices continue across the boundary),
    giving an explicitly assigned split in one deterministic generation.
    """
    if val_counts is not None:
        val_counts = tuple(int(c) for c in val_counts)
        if len(val_counts) != 3 or any(c < 0 for c in val_counts):
            raise ValueError(f"val_counts must be three non-negative integers, got {val_counts}")
    else:
        val_counts = (0, 0, 0)
    total = sum(cfg.counts) + sum(val_counts)
    if total == 0:
        raise EmptyDataset("nothing to generate: all counts are zero")

    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        entries = []
        for label in SentenceType:
            k = int(label)
            n_train, n_val = cfg.counts[k], val_counts[k]
            for j in range(n_train + n_val):
                seq, _ = generate_sample(label, cfg, j)
                name = f"{label.wire_name}_{j:04d}.jsonl"
                formats.write_canonical(seq, out_dir / name)
                if sum(val_counts) == 0:
                    split = "unassigned"
                else:
                    split = "train" if j < n_train else "val"
                entries.append(ManifestEntry(path=name, label=label, split=split))
        manifest = DatasetManifest(tuple(entries))
        save_manifest(manifest, out_dir / "manifest.json")
    except OSError as exc:
        raise IoFailure(f"writing dataset to {out_dir} failed: {exc}") from exc
    return manifest

"""Deterministic transforms from raw sequences to fixed-size feature tensors.

The pipeline order is: pad to a fixed frame count, normalize each frame
around the nose tip, (training only) expand the set with segment-permutation
copies, then flatten frames into a (T, 2N) float64 tensor.

All randomness comes from numpy's PCG64 generator. The augmentation stream
for sample ``i`` is seeded from ``SeedSequence((cfg.seed, i))``, so serial
and per-sample-parallel execution produce identical output.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from .errors import InvalidSegmentation, ShapeError, TruncationWarning
from .landmarks import LandmarkFrame, LandmarkSequence, SentenceType

TARGET_LENGTH = 300

_DEGENERATE_EPS = 1e-9


def pad_to_length(seq: LandmarkSequence, length: int = TARGET_LENGTH) -> LandmarkSequence:
    """Extend a sequence to exactly ``length`` frames by repeating its final frame.

    Sequences longer than ``length`` are truncated to the first ``length``
    frames with a TruncationWarning (batch jobs keep running).
    """
    if length < 1:
        raise ValueError(f"target length must be >= 1, got {length}")
    n = len(seq.frames)
    if n == length:
        return seq
    if n > length:
        warnings.warn(
            f"sequence of {n} frames truncated to {length}",
            TruncationWarning,
            stacklevel=2,
        )
        return seq.replace_frames(seq.frames[:length])
    tail = (seq.frames[-1],) * (length - n)
    return seq.replace_frames(seq.frames + tail)


def normalize_frame(frame: LandmarkFrame, nose_tip_index: int) -> LandmarkFrame:
    """Translate the nose tip to the origin and scale to unit mean distance.

    The scale is the mean Euclidean distance from the nose tip to every other
    landmark. Frames where that mean is <= 1e-9 (all points coincide, e.g.
    absent-face zero frames) map to all-zero frames instead of dividing by
    zero.
    """
    pts = frame.points
    n = pts.shape[0]
    if not 0 <= nose_tip_index < n:
        raise ValueError(f"nose_tip_index {nose_tip_index} out of range for {n} points")
    nose = pts[nose_tip_index]
    centered = pts - nose
    if n < 2:
        return LandmarkFrame(np.zeros_like(pts), absent=frame.absent)
    distances = np.sqrt((centered * centered).sum(axis=1))
    mean_dist = distances.sum() / (n - 1)  # distance to self is 0
    if mean_dist <= _DEGENERATE_EPS:
        return LandmarkFrame(np.zeros_like(pts), absent=frame.absent)
    return LandmarkFrame(centered / mean_dist, absent=frame.absent)


def normalize_sequence(seq: LandmarkSequence) -> LandmarkSequence:
    """Apply `normalize_frame` to every frame using the profile's nose tip."""
    idx = seq.profile.nose_tip_index
    return seq.replace_frames(normalize_frame(f, idx) for f in seq.frames)


def permute_segments(
    seq: LandmarkSequence,
    boundaries: Sequence[int],
    order: Sequence[int],
) -> LandmarkSequence:
    """Reassemble the sequence from contiguous segments in a new order.

    ``boundaries`` are strictly increasing interior cut points in (0, T);
    they delimit len(boundaries) + 1 segments. ``order`` is a permutation of
    the segment indices; output position j holds segment order[j].
    """
    t = len(seq.frames)
    bounds = [int(b) for b in boundaries]
    for prev, cur in zip([0] + bounds, bounds):
        if not prev < cur < t:
            raise InvalidSegmentation(
                f"boundaries must be strictly increasing interior cuts of 0..{t}, "
                f"got {bounds}"
            )
    k = len(bounds) + 1
    if sorted(int(o) for o in order) != list(range(k)):
        raise InvalidSegmentation(
            f"order {list(order)} is not a permutation of {k} segment indices"
        )
    edges = [0] + bounds + [t]
    segments = [seq.frames[edges[i] : edges[i + 1]] for i in range(k)]
    out: Tuple[LandmarkFrame, ...] = ()
    for j in order:
        out = out + segments[int(j)]
    return seq.replace_frames(out)


@dataclass(frozen=True)
class AugmentConfig:
    """Segment-permutation augmentation settings.

    Each original sample gains ``copies_per_sample`` permuted variants. For
    each variant the segment count k is drawn uniformly from
    [min_segments, max_segments], the k-1 interior boundaries uniformly
    without replacement from 1..T-1, and the segment order uniformly from
    the permutations of k items.
    """

    copies_per_sample: int = 4
    min_segments: int = 2
    max_segments: int = 5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.copies_per_sample < 0:
            raise ValueError("copies_per_sample must be >= 0")
        if self.min_segments < 1:
            raise ValueError("min_segments must be >= 1")
        if self.max_segments < self.min_segments:
            raise ValueError("max_segments must be >= min_segments")
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")


Sample = Tuple[LandmarkSequence, SentenceType]


def augment(samples: Sequence[Sample], cfg: AugmentConfig) -> List[Sample]:
    """Expand a padded training set with permuted copies; labels are kept.

    Output order is deterministic: each original sample followed by its
    variants. The whole expansion is a pure function of (samples, cfg).
    """
    samples = list(samples)
    if not samples:
        return []
    t = len(samples[0][0].frames)
    for seq, _ in samples:
        if len(seq.frames) != t:
            raise ShapeError(
                f"augment requires equal-length sequences, got {len(seq.frames)} != {t}"
            )
    if cfg.max_segments > t:
        raise InvalidSegmentation(f"max_segments {cfg.max_segments} exceeds length {t}")

    out: List[Sample] = []
    for i, (seq, label) in enumerate(samples):
        out.append((seq, label))
        if cfg.copies_per_sample == 0:
            continue
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence((cfg.seed, i))))
        for _ in range(cfg.copies_per_sample):
            k = int(rng.integers(cfg.min_segments, cfg.max_segments + 1))
            if k > 1:
                boundaries = np.sort(rng.choice(np.arange(1, t), size=k - 1, replace=False))
            else:
                boundaries = np.empty(0, dtype=int)
            order = rng.permutation(k)
            out.append((permute_segments(seq, boundaries.tolist(), order.tolist()), label))
    return out


def to_feature_tensor(seq: LandmarkSequence, expected_length: int = TARGET_LENGTH) -> np.ndarray:
    """Flatten a padded, normalized sequence to a (T, 2N) float64 tensor.

    Row t is frame t's interleaved coordinates (x0, y0, x1, y1, ...).
    """
    if len(seq.frames) != expected_length:
        raise ShapeError(
            f"sequence must be padded to {expected_length} frames, got {len(seq.frames)}"
        )
    rows = np.empty((expected_length, seq.profile.feature_dim), dtype=np.float64)
    for t, frame in enumerate(seq.frames):
        rows[t] = frame.points.reshape(-1)
    return rows

"""Input validation helpers shared by the estimator layer and the pipeline."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import ShapeError
from .landmarks import LandmarkSequence
from .nn import NUM_CLASSES


def check_feature_array(x, expected_length: Optional[int] = None,
                        expected_dim: Optional[int] = None) -> np.ndarray:
    """Validate a stacked feature array of shape (n_samples, T, D).

    Returns a float64 view/copy. Entries must be finite.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 3:
        raise ShapeError(f"expected an (n_samples, T, D) array, got shape {arr.shape}")
    if arr.shape[1] < 1 or arr.shape[2] < 1:
        raise ShapeError(f"T and D must be >= 1, got shape {arr.shape}")
    if expected_length is not None and arr.shape[1] != expected_length:
        raise ShapeError(f"expected T={expected_length}, got {arr.shape[1]}")
    if expected_dim is not None and arr.shape[2] != expected_dim:
        raise ShapeError(f"expected D={expected_dim}, got {arr.shape[2]}")
    if not np.isfinite(arr).all():
        raise ShapeError("feature array contains non-finite values")
    return arr


def check_labels(y, n_samples: int) -> np.ndarray:
    """Validate class labels as integers in [0, 3)."""
    labels = np.asarray(y)
    if labels.ndim != 1 or labels.shape[0] != n_samples:
        raise ShapeError(f"labels must be 1-D of length {n_samples}, got shape {labels.shape}")
    as_int = labels.astype(np.intp)
    if not np.array_equal(as_int, labels):
        raise ShapeError("labels must be integers")
    if labels.size and (as_int.min() < 0 or as_int.max() >= NUM_CLASSES):
        raise ShapeError(f"labels must be in [0, {NUM_CLASSES})")
    return as_int


def check_sequences(x) -> Sequence[LandmarkSequence]:
    """Validate a list of LandmarkSequence sharing one detector profile."""
    seqs = list(x)
    if not seqs:
        raise ShapeError("expected at least one sequence")
    for i, seq in enumerate(seqs):
        if not isinstance(seq, LandmarkSequence):
            raise ShapeError(f"item {i} is not a LandmarkSequence: {type(seq).__name__}")
    names = {seq.profile.name for seq in seqs}
    if len(names) > 1:
        raise ShapeError(f"sequences mix detector profiles: {sorted(names)}")
    return seqs

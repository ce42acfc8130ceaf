from collections import Counter

import numpy as np
import pytest

from facesign import (
    DLIB_68,
    OPENPOSE_70,
    AugmentConfig,
    InvalidSegmentation,
    LandmarkFrame,
    LandmarkSequence,
    SentenceType,
    ShapeError,
    augment,
    normalize_frame,
    normalize_sequence,
    pad_to_length,
    permute_segments,
    to_feature_tensor,
)
from facesign.errors import TruncationWarning

from conftest import random_sequence


def test_pad_extends_with_final_frame():
    seq = random_sequence(OPENPOSE_70, num_frames=120, seed=0)
    out = pad_to_length(seq, 300)
    assert len(out) == 300
    for i in range(120):
        assert out.frames[i] == seq.frames[i]
    for i in range(120, 300):
        assert out.frames[i] == seq.frames[119]


def test_pad_identity_at_target_length():
    seq = random_sequence(OPENPOSE_70, num_frames=300, seed=1)
    assert pad_to_length(seq, 300) is seq


def test_pad_truncates_with_warning(tiny_profile):
    seq = random_sequence(tiny_profile, num_frames=347, seed=2)
    with pytest.warns(TruncationWarning):
        out = pad_to_length(seq, 300)
    assert len(out) == 300
    assert all(out.frames[i] == seq.frames[i] for i in range(300))


def test_pad_length_property(tiny_profile):
    for n, target in [(1, 7), (7, 7), (13, 7), (5, 300)]:
        seq = random_sequence(tiny_profile, num_frames=n, seed=n)
        if n > target:
            with pytest.warns(TruncationWarning):
                out = pad_to_length(seq, target)
        else:
            out = pad_to_length(seq, target)
        assert len(out) == target


def test_normalize_symmetric_cross():
    # nose at (100,100); four points at distance 2 -> all land at distance 1
    pts = np.array(
        [[102.0, 100.0], [98.0, 100.0], [100.0, 100.0], [100.0, 102.0], [100.0, 98.0]]
    )
    out = normalize_frame(LandmarkFrame(pts), nose_tip_index=2)
    expected = np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    assert np.allclose(out.points, expected, atol=1e-15)


def test_normalize_invariants_random():
    rng = np.random.default_rng(7)
    for _ in range(50):
        pts = rng.normal(50.0, 30.0, size=(68, 2))
        out = normalize_frame(LandmarkFrame(pts), nose_tip_index=30)
        nose = out.points[30]
        assert np.abs(nose).max() < 1e-12
        d = np.sqrt((out.points**2).sum(axis=1))
        assert abs(d.sum() / 67 - 1.0) < 1e-9


def test_normalize_idempotent():
    rng = np.random.default_rng(8)
    pts = rng.normal(0.0, 5.0, size=(70, 2))
    once = normalize_frame(LandmarkFrame(pts), 30)
    twice = normalize_frame(once, 30)
    assert np.abs(twice.points - once.points).max() < 1e-9


def test_normalize_degenerate_all_same():
    pts = np.full((10, 2), 3.25)
    out = normalize_frame(LandmarkFrame(pts), 0)
    assert not out.points.any()


def test_normalize_sequence_similarity_invariance():
    seq = random_sequence(OPENPOSE_70, num_frames=10, seed=9, scale=10.0)
    base = normalize_sequence(seq)
    rng = np.random.default_rng(10)
    for _ in range(5):
        s = float(rng.uniform(0.1, 10.0))
        t = rng.uniform(-1000.0, 1000.0, size=2)
        frames = tuple(LandmarkFrame(f.points * s + t) for f in seq.frames)
        scaled = normalize_sequence(LandmarkSequence(OPENPOSE_70, frames, fps=seq.fps))
        for a, b in zip(scaled.frames, base.frames):
            assert np.abs(a.points - b.points).max() < 1e-9
    # the 3.7x case called out explicitly
    frames = tuple(LandmarkFrame(f.points * 3.7 + np.array([12.0, -4.0])) for f in seq.frames)
    scaled = normalize_sequence(LandmarkSequence(OPENPOSE_70, frames, fps=seq.fps))
    for a, b in zip(scaled.frames, base.frames):
        assert np.abs(a.points - b.points).max() < 1e-9


def test_normalize_sequence_passes_zero_frames(tiny_profile):
    frames = (
        LandmarkFrame(np.zeros((5, 2)), absent=True),
        LandmarkFrame(np.arange(10.0).reshape(5, 2)),
    )
    seq = LandmarkSequence(tiny_profile, frames)
    out = normalize_sequence(seq)
    assert not out.frames[0].points.any()
    assert out.frames[0].absent


def _letter_sequence(tiny_profile, letters):
    frames = tuple(
        LandmarkFrame(np.full((5, 2), float(ord(ch)))) for ch in letters
    )
    return LandmarkSequence(tiny_profile, frames)


def _letters_of(seq):
    return "".join(chr(int(f.points[0, 0])) for f in seq.frames)


def test_permute_segments_example(tiny_profile):
    seq = _letter_sequence(tiny_profile, "ABCDEF")
    out = permute_segments(seq, [2, 4], [1, 2, 0])
    assert _letters_of(out) == "CDEFAB"


def test_permute_single_segment_identity(tiny_profile):
    seq = _letter_sequence(tiny_profile, "ABCD")
    out = permute_segments(seq, [], [0])
    assert _letters_of(out) == "ABCD"


def test_permute_rejects_bad_input(tiny_profile):
    seq = _letter_sequence(tiny_profile, "ABCDEF")
    with pytest.raises(InvalidSegmentation):
        permute_segments(seq, [4, 2], [0, 1, 2])
    with pytest.raises(InvalidSegmentation):
        permute_segments(seq, [2, 6], [0, 1, 2])
    with pytest.raises(InvalidSegmentation):
        permute_segments(seq, [0, 2], [0, 1, 2])
    with pytest.raises(InvalidSegmentation):
        permute_segments(seq, [2, 4], [0, 1])
    with pytest.raises(InvalidSegmentation):
        permute_segments(seq, [2, 4], [0, 1, 1])


def test_permute_preserves_multiset_property(tiny_profile):
    # >= 1000 random draws: multiset of frames and length are preserved
    rng = np.random.default_rng(123)
    t = 30
    seq = random_sequence(tiny_profile, num_frames=t, seed=42)
    signature = lambda s: Counter(tuple(f.points.ravel()) for f in s.frames)
    before = signature(seq)
    for _ in range(1000):
        k = int(rng.integers(1, 7))
        boundaries = sorted(rng.choice(np.arange(1, t), size=k - 1, replace=False).tolist())
        order = rng.permutation(k).tolist()
        out = permute_segments(seq, boundaries, order)
        assert len(out) == t
        assert signature(out) == before


def _padded_samples(profile, n, length=40):
    return [
        (random_sequence(profile, num_frames=length, seed=i), SentenceType(i % 3))
        for i in range(n)
    ]


def test_augment_count_arithmetic(tiny_profile):
    samples = _padded_samples(tiny_profile, 302, length=24)
    cfg = AugmentConfig(copies_per_sample=4, min_segments=2, max_segments=5, seed=1)
    out = augment(samples, cfg)
    assert len(out) == 1510


def test_augment_zero_copies_identity(tiny_profile):
    samples = _padded_samples(tiny_profile, 5)
    out = augment(samples, AugmentConfig(copies_per_sample=0, seed=3))
    assert len(out) == 5
    for (sa, la), (sb, lb) in zip(out, samples):
        assert sa is sb and la is lb


def test_augment_deterministic(tiny_profile):
    samples = _padded_samples(tiny_profile, 8)
    cfg = AugmentConfig(copies_per_sample=3, min_segments=2, max_segments=6, seed=99)
    a = augment(samples, cfg)
    b = augment(samples, cfg)
    assert len(a) == len(b) == 8 * 4
    for (sa, la), (sb, lb) in zip(a, b):
        assert la == lb
        assert sa == sb


def test_augment_labels_and_multiset(tiny_profile):
    samples = _padded_samples(tiny_profile, 6)
    cfg = AugmentConfig(copies_per_sample=2, seed=5)
    out = augment(samples, cfg)
    by_source = [out[i * 3 : (i + 1) * 3] for i in range(6)]
    for (orig_seq, orig_label), group in zip(samples, by_source):
        sig = Counter(tuple(f.points.ravel()) for f in orig_seq.frames)
        for seq, label in group:
            assert label == orig_label
            assert Counter(tuple(f.points.ravel()) for f in seq.frames) == sig


def test_augment_requires_equal_lengths(tiny_profile):
    samples = [
        (random_sequence(tiny_profile, num_frames=12, seed=0), SentenceType.AFFIRMATIVE),
        (random_sequence(tiny_profile, num_frames=13, seed=1), SentenceType.AFFIRMATIVE),
    ]
    with pytest.raises(ShapeError):
        augment(samples, AugmentConfig(seed=0))


def test_augment_config_validation():
    with pytest.raises(ValueError):
        AugmentConfig(copies_per_sample=-1)
    with pytest.raises(ValueError):
        AugmentConfig(min_segments=0)
    with pytest.raises(ValueError):
        AugmentConfig(min_segments=5, max_segments=4)


def test_feature_tensor_shapes():
    seq = random_sequence(OPENPOSE_70, num_frames=300, seed=0)
    x = to_feature_tensor(seq)
    assert x.shape == (300, 140)
    assert x.dtype == np.float64
    seq68 = random_sequence(DLIB_68, num_frames=300, seed=1)
    assert to_feature_tensor(seq68).shape == (300, 136)


def test_feature_tensor_interleaving(tiny_profile):
    pts = np.arange(10.0).reshape(5, 2)
    frames = (LandmarkFrame(pts),) * 3
    seq = LandmarkSequence(tiny_profile, frames)
    x = to_feature_tensor(seq, expected_length=3)
    assert np.array_equal(x[0], np.arange(10.0))  # x0,y0,x1,y1,...


def test_feature_tensor_rejects_unpadded():
    seq = random_sequence(OPENPOSE_70, num_frames=120, seed=2)
    with pytest.raises(ShapeError):
        to_feature_tensor(seq)

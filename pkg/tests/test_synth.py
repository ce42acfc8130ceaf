import numpy as np
import pytest

from facesign import (
    DLIB_68,
    MEDIAPIPE_468,
    OPENPOSE_70,
    EmptyDataset,
    SentenceType,
    SynthConfig,
    generate_dataset,
    generate_sample,
    neutral_face_template,
    normalize_frame,
    read_canonical,
)
from facesign.synth import LANDMARK_GROUPS, PIXEL_NOSE, PIXEL_SCALE


@pytest.mark.parametrize("profile", [OPENPOSE_70, MEDIAPIPE_468, DLIB_68])
def test_template_invariants(profile):
    frame = neutral_face_template(profile)
    assert frame.num_points == profile.landmark_count
    nose = frame.points[profile.nose_tip_index]
    assert np.abs(nose).max() == 0.0
    d = np.sqrt((frame.points**2).sum(axis=1))
    assert abs(d.sum() / (profile.landmark_count - 1) - 1.0) < 1e-9


def test_template_deterministic():
    a = neutral_face_template(OPENPOSE_70)
    b = neutral_face_template(OPENPOSE_70)
    assert a == b


def test_template_already_normalized():
    frame = neutral_face_template(OPENPOSE_70)
    normalized = normalize_frame(frame, OPENPOSE_70.nose_tip_index)
    assert np.abs(normalized.points - frame.points).max() < 1e-9


def test_landmark_groups_in_range():
    for profile in (OPENPOSE_70, MEDIAPIPE_468, DLIB_68):
        groups = LANDMARK_GROUPS[profile.name]
        for name, idx in groups.items():
            assert idx.min() >= 0 and idx.max() < profile.landmark_count, (profile.name, name)
        assert profile.nose_tip_index not in groups["jaw"]


def zero_noise_config(profile=OPENPOSE_70, length=300, **kwargs):
    return SynthConfig(
        profile=profile,
        counts=(1, 1, 1),
        min_frames=length,
        max_frames=length,
        noise_sigma=0.0,
        **kwargs,
    )


def test_affirmative_zero_noise_equals_template():
    cfg = zero_noise_config(length=40)
    seq, label = generate_sample(SentenceType.AFFIRMATIVE, cfg, 0)
    assert label is SentenceType.AFFIRMATIVE
    template = neutral_face_template(OPENPOSE_70)
    expected = template.points * PIXEL_SCALE + PIXEL_NOSE
    for frame in seq.frames:
        assert np.array_equal(frame.points, expected)
    assert seq.fps == 30.0


def test_wh_question_zero_noise_spectrum():
    # all x coordinates trace the configured sinusoid; its DFT bin dominates
    length = 300
    cfg = zero_noise_config(length=length, shake_frequency=1.5)
    seq, _ = generate_sample(SentenceType.WH_QUESTION, cfg, 0)
    x0 = np.array([f.points[0, 0] for f in seq.frames])
    spectrum = np.abs(np.fft.rfft(x0 - x0.mean()))
    shake_bin = round(cfg.shake_frequency * length / 30.0)
    assert shake_bin == 15
    others = np.delete(spectrum, [0, shake_bin])
    assert spectrum[shake_bin] > 10.0 * others.max()
    # every landmark shares the same horizontal offset trace
    x_all = np.stack([f.points[:, 0] for f in seq.frames])
    offsets = x_all - x_all[0]
    assert np.abs(offsets - offsets[:, :1]).max() < 1e-9


def test_yes_no_question_dynamics():
    length = 90
    cfg = zero_noise_config(length=length)
    seq, _ = generate_sample(SentenceType.YES_NO_QUESTION, cfg, 0)
    template = neutral_face_template(OPENPOSE_70)
    expected_first = template.points * PIXEL_SCALE + PIXEL_NOSE
    groups = LANDMARK_GROUPS["openpose70"]
    # first two thirds: neutral
    assert np.array_equal(seq.frames[0].points, expected_first)
    assert np.array_equal(seq.frames[(2 * length) // 3 - 1].points, expected_first)
    # final frame: eyebrows rose (y shrank), jaw moved toward the nose
    final = seq.frames[-1].points
    brows = groups["eyebrows"]
    assert (final[brows, 1] < expected_first[brows, 1] - 1.0).all()
    jaw = groups["jaw"]
    nose_px = PIXEL_NOSE
    d_first = np.sqrt(((expected_first[jaw] - nose_px) ** 2).sum(axis=1))
    d_final = np.sqrt(((final[jaw] - nose_px) ** 2).sum(axis=1))
    assert np.allclose(d_first - d_final, cfg.expression_amplitude * PIXEL_SCALE, atol=1e-9)


def test_sample_deterministic_per_key():
    cfg = SynthConfig(profile=OPENPOSE_70, counts=(1, 1, 1), min_frames=30,
                      max_frames=90, seed=12)
    a, _ = generate_sample(SentenceType.WH_QUESTION, cfg, 4)
    b, _ = generate_sample(SentenceType.WH_QUESTION, cfg, 4)
    assert a == b
    c, _ = generate_sample(SentenceType.WH_QUESTION, cfg, 5)
    assert len(a) != len(c) or a != c


def test_lengths_within_bounds():
    cfg = SynthConfig(profile=DLIB_68, counts=(1, 1, 1), min_frames=25,
                      max_frames=40, seed=3)
    lengths = set()
    for label in SentenceType:
        for i in range(10):
            seq, _ = generate_sample(label, cfg, i)
            lengths.add(len(seq))
    assert min(lengths) >= 25 and max(lengths) <= 40
    assert len(lengths) > 1


def test_generate_dataset_counts_and_manifest(tmp_path):
    cfg = SynthConfig(profile=OPENPOSE_70, counts=(3, 2, 1), min_frames=20,
                      max_frames=30, seed=9)
    manifest = generate_dataset(cfg, tmp_path)
    files = sorted(p.name for p in tmp_path.glob("*.jsonl"))
    assert len(files) == 6
    assert len(manifest.samples) == 6
    assert all(s.split == "unassigned" for s in manifest.samples)
    assert (tmp_path / "manifest.json").exists()
    for entry in manifest.samples:
        seq = read_canonical(tmp_path / entry.path)
        assert seq.profile is OPENPOSE_70


def test_generate_dataset_378_scale(tmp_path):
    cfg = SynthConfig(profile=DLIB_68, counts=(126, 126, 126), min_frames=5,
                      max_frames=8, seed=1)
    manifest = generate_dataset(cfg, tmp_path)
    assert len(manifest.samples) == 378
    assert len(list(tmp_path.glob("*.jsonl"))) == 378


def test_generate_dataset_explicit_split(tmp_path):
    cfg = SynthConfig(profile=OPENPOSE_70, counts=(4, 4, 4), min_frames=10,
                      max_frames=12, seed=2)
    manifest = generate_dataset(cfg, tmp_path, val_counts=(2, 2, 2))
    assert len(manifest.subset("train")) == 12
    assert len(manifest.subset("val")) == 6
    assert not manifest.subset("unassigned")


def test_generate_dataset_zero_counts(tmp_path):
    cfg = SynthConfig(profile=OPENPOSE_70, counts=(0, 0, 0), min_frames=10,
                      max_frames=12, seed=2)
    with pytest.raises(EmptyDataset):
        generate_dataset(cfg, tmp_path)


def test_generate_dataset_byte_identical(tmp_path):
    cfg = SynthConfig(profile=OPENPOSE_70, counts=(2, 2, 2), min_frames=10,
                      max_frames=20, seed=33)
    a_dir, b_dir = tmp_path / "a", tmp_path / "b"
    generate_dataset(cfg, a_dir)
    generate_dataset(cfg, b_dir)
    a_files = sorted(p.name for p in a_dir.iterdir())
    b_files = sorted(p.name for p in b_dir.iterdir())
    assert a_files == b_files
    for name in a_files:
        assert (a_dir / name).read_bytes() == (b_dir / name).read_bytes(), name


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(profile=OPENPOSE_70, counts=(1, 1), min_frames=10, max_frames=20)
    with pytest.raises(ValueError):
        SynthConfig(profile=OPENPOSE_70, counts=(1, 1, 1), min_frames=30, max_frames=20)
    with pytest.raises(ValueError):
        SynthConfig(profile=OPENPOSE_70, counts=(1, 1, 1), max_frames=301)
    with pytest.raises(ValueError):
        SynthConfig(profile=OPENPOSE_70, counts=(1, 1, 1), noise_sigma=-0.1)

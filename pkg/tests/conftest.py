import numpy as np
import pytest

from facesign import DetectorProfile, LandmarkFrame, LandmarkSequence, OPENPOSE_70


@pytest.fixture
def tiny_profile():
    """5-point profile for fast in-memory transform tests (nose at index 2)."""
    return DetectorProfile("tiny5", landmark_count=5, nose_tip_index=2)


def random_frame(profile, rng, scale=100.0):
    return LandmarkFrame(rng.normal(0.0, scale, size=(profile.landmark_count, 2)))


def random_sequence(profile, num_frames, seed, fps=30.0, scale=100.0):
    rng = np.random.default_rng(seed)
    frames = tuple(random_frame(profile, rng, scale) for _ in range(num_frames))
    return LandmarkSequence(profile, frames, fps=fps)


@pytest.fixture
def openpose_sequence():
    return random_sequence(OPENPOSE_70, num_frames=12, seed=11)

"""Sentence-type classification for sign language video from facial landmarks.

The public surface re-exported here covers the common workflow: parse or
synthesize landmark sequences, preprocess them into feature tensors, train
the temporal-convolution classifier, evaluate, and persist checkpoints.
"""

from .errors import (
    DegenerateSplit,
    EmptyDataset,
    EmptySequence,
    FaceSignError,
    InvalidSegmentation,
    IoFailure,
    MalformedInput,
    ProfileMismatch,
    ShapeError,
    UnsupportedVersion,
)
from .estimator import (
    LandmarkVectorizer,
    NoseTipNormalizer,
    SegmentPermutationAugmenter,
    SentenceTypeClassifier,
    SequencePadder,
)
from .formats import (
    load_sequence_openpose,
    parse_openpose_frame,
    read_canonical,
    read_csv_sequence,
    write_canonical,
)
from .landmarks import (
    DLIB_68,
    MEDIAPIPE_468,
    OPENPOSE_70,
    PROFILES,
    DetectorProfile,
    LandmarkFrame,
    LandmarkSequence,
    Point2,
    SentenceType,
    get_profile,
)
from .metrics import EvalReport, confusion_matrix, report_from_confusion
from .pipeline import (
    DatasetManifest,
    ManifestEntry,
    ModelCheckpoint,
    Prediction,
    TrainConfig,
    evaluate,
    load_checkpoint,
    load_manifest,
    predict,
    save_checkpoint,
    save_manifest,
    split_dataset,
    train,
)
from .preprocess import (
    AugmentConfig,
    augment,
    normalize_frame,
    normalize_sequence,
    pad_to_length,
    permute_segments,
    to_feature_tensor,
)
from .synth import SynthConfig, generate_dataset, generate_sample, neutral_face_template

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "DatasetManifest",
    "DegenerateSplit",
    "DetectorProfile",
    "DLIB_68",
    "EmptyDataset",
    "EmptySequence",
    "EvalReport",
    "FaceSignError",
    "InvalidSegmentation",
    "IoFailure",
    "LandmarkFrame",
    "LandmarkSequence",
    "LandmarkVectorizer",
    "MalformedInput",
    "ManifestEntry",
    "MEDIAPIPE_468",
    "ModelCheckpoint",
    "NoseTipNormalizer",
    "OPENPOSE_70",
    "Point2",
    "Prediction",
    "ProfileMismatch",
    "PROFILES",
    "SegmentPermutationAugmenter",
    "SentenceType",
    "SentenceTypeClassifier",
    "SequencePadder",
    "ShapeError",
    "SynthConfig",
    "TrainConfig",
    "UnsupportedVersion",
    "augment",
    "confusion_matrix",
    "evaluate",
    "generate_dataset",
    "generate_sample",
    "get_profile",
    "load_checkpoint",
    "load_manifest",
    "load_sequence_openpose",
    "neutral_face_template",
    "normalize_frame",
    "normalize_sequence",
    "pad_to_length",
    "parse_openpose_frame",
    "permute_segments",
    "predict",
    "read_canonical",
    "read_csv_sequence",
    "report_from_confusion",
    "save_checkpoint",
    "save_manifest",
    "split_dataset",
    "to_feature_tensor",
    "train",
    "write_canonical",
]

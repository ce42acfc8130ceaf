"""Dataset manifests, stratified splitting, training, evaluation, persistence.

A manifest lists sample files (canonical JSONL, paths relative to a data
root) with their labels and split assignments. `train` drives the full
chain: load -> pad -> normalize -> augment (train split only) -> tensors ->
minibatch training with per-epoch validation accuracy; the checkpoint keeps
the parameters from the best validation epoch. Checkpoints are a single
JSON document (format_version 1) whose float arrays round-trip bit-exactly.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from . import formats, nn, preprocess
from .errors import (
    DegenerateSplit,
    EmptyDataset,
    IoFailure,
    MalformedInput,
    ProfileMismatch,
    ShapeError,
    UnsupportedVersion,
)
from .estimator import SentenceTypeClassifier
from .landmarks import DetectorProfile, LandmarkSequence, SentenceType
from .metrics import EvalReport, confusion_matrix, report_from_confusion
from .preprocess import AugmentConfig

SPLITS = ("train", "val", "unassigned")

CHECKPOINT_FORMAT_VERSION = 1

PathOrFile = formats.PathOrFile


@dataclass(frozen=True)
class ManifestEntry:
    path: str
    label: SentenceType
    split: str = "unassigned"
    signer: Optional[str] = None

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise MalformedInput(f"unknown split {self.split!r}; expected one of {SPLITS}")


@dataclass(frozen=True)
class DatasetManifest:
    samples: Tuple[ManifestEntry, ...]

    def __post_init__(self) -> None:
        samples = tuple(self.samples)
        object.__setattr__(self, "samples", samples)
        if not samples:
            raise EmptyDataset("manifest lists no samples")
        paths = [s.path for s in samples]
        if len(set(paths)) != len(paths):
            dupes = sorted({p for p in paths if paths.count(p) > 1})
            raise MalformedInput(f"duplicate sample paths in manifest: {dupes}")

    def subset(self, split: str) -> List[ManifestEntry]:
        if split not in SPLITS:
            raise ValueError(f"unknown split {split!r}")
        return [s for s in self.samples if s.split == split]

    def to_json_dict(self) -> dict:
        out = []
        for s in self.samples:
            rec = {"path": s.path, "label": s.label.wire_name, "split": s.split}
            if s.signer is not None:
                rec["signer"] = s.signer
            out.append(rec)
        return {"samples": out}


def manifest_from_json_dict(doc: object) -> DatasetManifest:
    if not isinstance(doc, dict) or not isinstance(doc.get("samples"), list):
        raise MalformedInput("manifest must be an object with a 'samples' array")
    entries = []
    for i, rec in enumerate(doc["samples"]):
        if not isinstance(rec, dict):
            raise MalformedInput(f"manifest sample {i} must be an object")
        try:
            path = rec["path"]
            label = SentenceType.from_wire(rec["label"])
        except KeyError as exc:
            raise MalformedInput(f"manifest sample {i} lacks key {exc}") from None
        if not isinstance(path, str) or not path:
            raise MalformedInput(f"manifest sample {i}: path must be a nonempty string")
        entries.append(
            ManifestEntry(
                path=path,
                label=label,
                split=rec.get("split", "unassigned"),
                signer=rec.get("signer"),
            )
        )
    return DatasetManifest(tuple(entries))


def load_manifest(source: PathOrFile) -> DatasetManifest:
    with formats._open_text(source, "r") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid manifest JSON: {exc}") from exc
    return manifest_from_json_dict(doc)


def save_manifest(manifest: DatasetManifest, sink: PathOrFile) -> None:
    with formats._open_text(sink, "w") as handle:
        json.dump(manifest.to_json_dict(), handle, indent=2)
        handle.write("\n")


def split_dataset(
    manifest: DatasetManifest,
    train_fraction: Optional[float] = None,
    seed: int = 0,
    train_counts: Optional[Sequence[int]] = None,
) -> DatasetManifest:
    """Stratified train/val assignment over a fully unassigned manifest.

    Per label, floor(train_fraction * count) samples go to train (assignment
    order chosen by a PCG64 permutation of the stratum), the rest to val.
    Alternatively `train_counts` fixes the exact per-class train sizes, which
    reproduces any externally specified split. A label left without
    validation samples is an error.
    """
    if (train_fraction is None) == (train_counts is None):
        raise ValueError("exactly one of train_fraction / train_counts is required")
    if train_fraction is not None and not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if any(s.split != "unassigned" for s in manifest.samples):
        raise ValueError("split_dataset requires a fully unassigned manifest")

    rng = np.random.Generator(np.random.PCG64(seed))
    assignment = {}
    for label in SentenceType:
        stratum = [i for i, s in enumerate(manifest.samples) if s.label == label]
        if train_counts is not None:
            n_train = int(train_counts[int(label)])
            if not 0 <= n_train <= len(stratum):
                raise DegenerateSplit(
                    f"train_counts[{int(label)}]={n_train} exceeds the "
                    f"{len(stratum)} samples of class {label.wire_name}"
                )
        else:
            n_train = math.floor(Fraction(train_fraction) * len(stratum))
        if n_train >= len(stratum):
            raise DegenerateSplit(
                f"class {label.wire_name} would have no validation samples "
                f"({n_train} train of {len(stratum)})"
            )
        perm = rng.permutation(len(stratum))
        for j, k in enumerate(perm):
            assignment[stratum[k]] = "train" if j < n_train else "val"

    new_samples = []
    for i, s in enumerate(manifest.samples):
        new_samples.append(
            ManifestEntry(path=s.path, label=s.label, split=assignment[i], signer=s.signer)
        )
    return DatasetManifest(tuple(new_samples))


@dataclass(frozen=True)
class TrainConfig:
    classifier: nn.ClassifierConfig
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    epochs: int = 50
    batch_size: int = 16
    learning_rate: float = 1e-4
    shuffle_seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if self.shuffle_seed < 0:
            raise ValueError("shuffle_seed must be a non-negative integer")


@dataclass(frozen=True, eq=False)
class ModelCheckpoint:
    format_version: int
    profile: DetectorProfile
    classifier: nn.ClassifierConfig
    params: nn.ModelParams
    training_fingerprint: dict


def load_split(
    manifest: DatasetManifest, split: str, data_root: Union[str, Path]
) -> List[Tuple[LandmarkSequence, SentenceType]]:
    """Load a split's canonical files in manifest order."""
    root = Path(data_root)
    out = []
    for entry in manifest.subset(split):
        path = root / entry.path
        try:
            seq = formats.read_canonical(path)
        except MalformedInput as exc:
            raise MalformedInput(f"{path}: {exc}") from exc
        except OSError as exc:
            raise IoFailure(f"{path}: {exc}") from exc
        out.append((seq, entry.label))
    return out


def _require_profile(
    samples: Sequence[Tuple[LandmarkSequence, SentenceType]], context: str
) -> DetectorProfile:
    names = {seq.profile.name for seq, _ in samples}
    if len(names) != 1:
        raise ProfileMismatch(f"{context}: sequences mix detector profiles {sorted(names)}")
    return samples[0][0].profile


def _tensor_stack(
    samples: Sequence[Tuple[LandmarkSequence, SentenceType]], length: int
) -> Tuple[np.ndarray, np.ndarray]:
    xs = np.stack([preprocess.to_feature_tensor(seq, length) for seq, _ in samples])
    ys = np.asarray([int(label) for _, label in samples], dtype=np.intp)
    return xs, ys


def train(
    manifest: DatasetManifest,
    cfg: TrainConfig,
    data_root: Union[str, Path],
) -> Tuple[ModelCheckpoint, List[dict]]:
    """Train on the manifest's train split, validating per epoch on val.

    Returns the checkpoint (best-validation-epoch parameters) and the
    per-epoch history of mean train loss and validation accuracy.
    """
    train_samples = load_split(manifest, "train", data_root)
    val_samples = load_split(manifest, "val", data_root)
    if not train_samples:
        raise EmptyDataset("manifest has no train samples")
    if not val_samples:
        raise EmptyDataset("manifest has no val samples")
    profile = _require_profile(train_samples + val_samples, "train")
    if cfg.classifier.input_channels != profile.feature_dim:
        raise ShapeError(
            f"classifier expects {cfg.classifier.input_channels} input channels but "
            f"profile {profile.name} produces {profile.feature_dim}"
        )

    length = cfg.classifier.input_length

    def prep(samples):
        return [
            (preprocess.normalize_sequence(preprocess.pad_to_length(seq, length)), label)
            for seq, label in samples
        ]

    train_prepped = preprocess.augment(prep(train_samples), cfg.augment)
    x_train, y_train = _tensor_stack(train_prepped, length)
    x_val, y_val = _tensor_stack(prep(val_samples), length)

    clf = SentenceTypeClassifier(
        conv_filters=cfg.classifier.conv_filters,
        kernel_size=cfg.classifier.kernel_size,
        hidden_units=cfg.classifier.hidden_units,
        epochs=cfg.epochs,
        batch_size=cfg.batch_size,
        learning_rate=cfg.learning_rate,
        seed=cfg.classifier.seed,
        shuffle_seed=cfg.shuffle_seed,
    )
    clf.fit(x_train, y_train, validation_data=(x_val, y_val))

    checkpoint = ModelCheckpoint(
        format_version=CHECKPOINT_FORMAT_VERSION,
        profile=profile,
        classifier=clf.config_,
        params=clf.params_,
        training_fingerprint={
            "seeds": {
                "classifier": cfg.classifier.seed,
                "augment": cfg.augment.seed,
                "shuffle": cfg.shuffle_seed,
            },
            "epochs": cfg.epochs,
            "final_train_loss": clf.history_[-1]["train_loss"],
        },
    )
    return checkpoint, clf.history_


def _forward_logits(checkpoint: ModelCheckpoint, x: np.ndarray, chunk: int = 64) -> np.ndarray:
    out = np.empty((x.shape[0], nn.NUM_CLASSES))
    for start in range(0, x.shape[0], chunk):
        logits, _ = nn.forward_batch(checkpoint.classifier, checkpoint.params, x[start : start + chunk])
        out[start : start + chunk] = logits
    return out


def evaluate(
    checkpoint: ModelCheckpoint,
    manifest: DatasetManifest,
    split: str,
    data_root: Union[str, Path],
) -> EvalReport:
    """Four-metric report of the checkpoint over one manifest split."""
    samples = load_split(manifest, split, data_root)
    if not samples:
        raise EmptyDataset(f"manifest has no {split!r} samples")
    profile = _require_profile(samples, "evaluate")
    if profile.name != checkpoint.profile.name:
        raise ProfileMismatch(
            f"checkpoint was trained on {checkpoint.profile.name}, data is {profile.name}"
        )
    length = checkpoint.classifier.input_length
    prepped = [
        (preprocess.normalize_sequence(preprocess.pad_to_length(seq, length)), label)
        for seq, label in samples
    ]
    x, y_true = _tensor_stack(prepped, length)
    y_pred = np.argmax(_forward_logits(checkpoint, x), axis=1)
    return report_from_confusion(confusion_matrix(y_true, y_pred))


@dataclass(frozen=True, eq=False)
class Prediction:
    label: SentenceType
    probabilities: np.ndarray

    def to_json_dict(self) -> dict:
        return {
            "label": self.label.wire_name,
            "probabilities": self.probabilities.tolist(),
        }


def predict(checkpoint: ModelCheckpoint, seq: LandmarkSequence) -> Prediction:
    """Classify one raw landmark sequence (argmax ties -> lowest class index)."""
    if seq.profile.name != checkpoint.profile.name:
        raise ProfileMismatch(
            f"checkpoint was trained on {checkpoint.profile.name}, sequence is "
            f"{seq.profile.name}"
        )
    length = checkpoint.classifier.input_length
    prepped = preprocess.normalize_sequence(preprocess.pad_to_length(seq, length))
    x = preprocess.to_feature_tensor(prepped, length)
    logits, _ = nn.forward(checkpoint.classifier, checkpoint.params, x)
    probs = nn.softmax(logits)
    return Prediction(label=SentenceType(int(np.argmax(logits))), probabilities=probs)


def _config_to_dict(cfg: nn.ClassifierConfig) -> dict:
    return {
        "input_channels": cfg.input_channels,
        "input_length": cfg.input_length,
        "conv_filters": cfg.conv_filters,
        "kernel_size": cfg.kernel_size,
        "hidden_units": cfg.hidden_units,
        "num_classes": cfg.num_classes,
        "seed": cfg.seed,
    }


def save_checkpoint(checkpoint: ModelCheckpoint, sink: PathOrFile) -> None:
    """Persist a checkpoint as one JSON document (floats round-trip exactly)."""
    doc = {
        "format_version": checkpoint.format_version,
        "profile": {
            "name": checkpoint.profile.name,
            "landmark_count": checkpoint.profile.landmark_count,
            "nose_tip_index": checkpoint.profile.nose_tip_index,
        },
        "classifier": _config_to_dict(checkpoint.classifier),
        "params": {name: arr.tolist() for name, arr in checkpoint.params.tensors()},
        "training_fingerprint": checkpoint.training_fingerprint,
    }
    with formats._open_text(sink, "w") as handle:
        json.dump(doc, handle)
        handle.write("\n")


def load_checkpoint(source: PathOrFile) -> ModelCheckpoint:
    with formats._open_text(source, "r") as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"invalid checkpoint JSON: {exc}") from exc
    if not isinstance(doc, dict) or "format_version" not in doc:
        raise MalformedInput("checkpoint lacks 'format_version'")
    version = doc["format_version"]
    if version != CHECKPOINT_FORMAT_VERSION:
        raise UnsupportedVersion(
            f"checkpoint format_version {version!r} is not supported "
            f"(expected {CHECKPOINT_FORMAT_VERSION})"
        )
    try:
        prof = doc["profile"]
        profile = DetectorProfile(
            name=prof["name"],
            landmark_count=prof["landmark_count"],
            nose_tip_index=prof["nose_tip_index"],
        )
        cfg = nn.ClassifierConfig(**doc["classifier"])
        raw = doc["params"]
        arrays = {}
        for name, shape in nn.expected_shapes(cfg).items():
            arr = np.asarray(raw[name], dtype=np.float64)
            if arr.shape != shape:
                raise MalformedInput(f"params.{name} has shape {arr.shape}, expected {shape}")
            arrays[name] = arr
        params = nn.ModelParams(**arrays)
        fingerprint = doc.get("training_fingerprint", {})
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MalformedInput):
            raise
        raise MalformedInput(f"checkpoint structure invalid: {exc}") from exc
    params.validate(cfg)
    return ModelCheckpoint(
        format_version=version,
        profile=profile,
        classifier=cfg,
        params=params,
        training_fingerprint=fingerprint,
    )

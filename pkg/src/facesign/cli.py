"""Command-line interface: convert, synth, train, eval, predict.

One executable with subcommands. Options may come from a single JSON config
file (``--config``); command-line flags override file values, and unknown
config keys are rejected. Exit codes are a stable scripting contract:
0 success, 2 data error (malformed/empty input), 3 usage or configuration
error (including detector-profile mismatches).

Machine-readable results go to stdout (one JSON object per prediction; the
eval summary table plus a JSON report file); warnings and diagnostics go to
stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import formats, nn, pipeline, synth
from .errors import (
    DegenerateSplit,
    EmptyDataset,
    EmptySequence,
    FaceSignError,
    IoFailure,
    MalformedInput,
    ProfileMismatch,
    ShapeError,
    UnsupportedVersion,
)
from .landmarks import PROFILES, get_profile
from .metrics import format_report_table
from .preprocess import AugmentConfig
from .synth import SynthConfig

EXIT_OK = 0
EXIT_DATA = 2
EXIT_CONFIG = 3


class ConfigError(FaceSignError):
    """Bad config file contents or inconsistent options."""


class _Parser(argparse.ArgumentParser):
    """argparse maps usage errors to exit 2; the CLI contract wants 3."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


_CONFIG_SCHEMA = {
    "profile": str,
    "data_root": str,
    "manifest": str,
    "classifier": {
        "conv_filters": int,
        "kernel_size": int,
        "hidden_units": int,
        "seed": int,
    },
    "train": {
        "epochs": int,
        "batch_size": int,
        "learning_rate": (int, float),
        "shuffle_seed": int,
    },
    "augment": {
        "copies_per_sample": int,
        "min_segments": int,
        "max_segments": int,
        "seed": int,
    },
    "synth": {
        "counts": list,
        "val_counts": list,
        "min_frames": int,
        "max_frames": int,
        "noise_sigma": (int, float),
        "expression_amplitude": (int, float),
        "shake_frequency": (int, float),
        "seed": int,
    },
    "split": {
        "train_fraction": (int, float),
        "train_counts": list,
        "seed": int,
    },
}


def load_config(path: Optional[str]) -> dict:
    """Load and validate the JSON config file; unknown keys are rejected."""
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config file must hold a JSON object")
    for key, value in doc.items():
        if key not in _CONFIG_SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        expected = _CONFIG_SCHEMA[key]
        if isinstance(expected, dict):
            if not isinstance(value, dict):
                raise ConfigError(f"config key {key!r} must be an object")
            for sub, subval in value.items():
                if sub not in expected:
                    raise ConfigError(f"unknown config key {key}.{sub!r}")
                if not isinstance(subval, expected[sub]) or isinstance(subval, bool):
                    raise ConfigError(f"config key {key}.{sub} has the wrong type")
        elif not isinstance(value, expected):
            raise ConfigError(f"config key {key!r} has the wrong type")
    return doc


def _setting(args: argparse.Namespace, flag: str, config: dict, section: str,
             key: str, default):
    """Resolution order: command-line flag, config file, default."""
    value = getattr(args, flag, None)
    if value is not None:
        return value
    section_doc = config.get(section, {})
    if isinstance(section_doc, dict) and key in section_doc:
        return section_doc[key]
    return default


def _top_setting(args: argparse.Namespace, flag: str, config: dict, key: str, default=None):
    value = getattr(args, flag, None)
    if value is not None:
        return value
    return config.get(key, default)


def cmd_convert(args: argparse.Namespace) -> int:
    profile = get_profile(args.profile)
    if args.format == "openpose":
        seq = formats.load_sequence_openpose(args.input, profile, fps=args.fps)
    else:
        seq = formats.read_csv_sequence(args.input, profile, fps=args.fps)
    formats.write_canonical(seq, args.output)
    print(json.dumps({"output": str(args.output), "frames": len(seq)}))
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    profile = get_profile(_top_setting(args, "profile", config, "profile", "openpose70"))
    counts = _setting(args, "counts", config, "synth", "counts", [126, 126, 126])
    val_counts = _setting(args, "val_counts", config, "synth", "val_counts", None)
    cfg = SynthConfig(
        profile=profile,
        counts=tuple(counts),
        min_frames=_setting(args, "min_frames", config, "synth", "min_frames", 60),
        max_frames=_setting(args, "max_frames", config, "synth", "max_frames", 300),
        noise_sigma=_setting(args, "noise_sigma", config, "synth", "noise_sigma", 0.02),
        expression_amplitude=_setting(
            args, "expression_amplitude", config, "synth", "expression_amplitude", 0.15
        ),
        shake_frequency=_setting(
            args, "shake_frequency", config, "synth", "shake_frequency", 1.5
        ),
        seed=_setting(args, "seed", config, "synth", "seed", 0),
    )
    manifest = synth.generate_dataset(cfg, args.out, val_counts=val_counts)
    print(
        json.dumps(
            {"out_dir": str(args.out), "manifest": str(Path(args.out) / "manifest.json"),
             "samples": len(manifest.samples)}
        )
    )
    return EXIT_OK


def _resolve_dataset(args: argparse.Namespace, config: dict):
    manifest_path = _top_setting(args, "manifest", config, "manifest")
    if manifest_path is None:
        raise ConfigError("a manifest is required (--manifest or config 'manifest')")
    data_root = _top_setting(args, "data_root", config, "data_root")
    if data_root is None:
        data_root = str(Path(manifest_path).parent)
    return pipeline.load_manifest(manifest_path), data_root


def _maybe_split(manifest, args, config):
    fraction = _setting(args, "train_fraction", config, "split", "train_fraction", None)
    counts = _setting(args, "train_counts", config, "split", "train_counts", None)
    if fraction is None and counts is None:
        return manifest
    seed = _setting(args, "split_seed", config, "split", "seed", 0)
    return pipeline.split_dataset(
        manifest, train_fraction=fraction, seed=seed, train_counts=counts
    )


def _peek_profile(manifest, data_root):
    first = manifest.samples[0]
    with open(Path(data_root) / first.path, encoding="utf-8") as handle:
        header = json.loads(handle.readline())
    return get_profile(header["profile"])


def cmd_train(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    manifest, data_root = _resolve_dataset(args, config)
    manifest = _maybe_split(manifest, args, config)
    profile_name = _top_setting(args, "profile", config, "profile")
    profile = get_profile(profile_name) if profile_name else _peek_profile(manifest, data_root)

    classifier = nn.ClassifierConfig(
        input_channels=profile.feature_dim,
        conv_filters=_setting(args, "conv_filters", config, "classifier", "conv_filters", 16),
        kernel_size=_setting(args, "kernel_size", config, "classifier", "kernel_size", 5),
        hidden_units=_setting(args, "hidden_units", config, "classifier", "hidden_units", 64),
        seed=_setting(args, "seed", config, "classifier", "seed", 0),
    )
    augment_cfg = AugmentConfig(
        copies_per_sample=_setting(
            args, "augment_copies", config, "augment", "copies_per_sample", 4
        ),
        min_segments=_setting(args, "min_segments", config, "augment", "min_segments", 2),
        max_segments=_setting(args, "max_segments", config, "augment", "max_segments", 5),
        seed=_setting(args, "augment_seed", config, "augment", "seed", 0),
    )
    train_cfg = pipeline.TrainConfig(
        classifier=classifier,
        augment=augment_cfg,
        epochs=_setting(args, "epochs", config, "train", "epochs", 50),
        batch_size=_setting(args, "batch_size", config, "train", "batch_size", 16),
        learning_rate=_setting(args, "learning_rate", config, "train", "learning_rate", 1e-4),
        shuffle_seed=_setting(args, "shuffle_seed", config, "train", "shuffle_seed", 0),
    )
    checkpoint, history = pipeline.train(manifest, train_cfg, data_root)
    pipeline.save_checkpoint(checkpoint, args.checkpoint)
    with open(args.history, "w", encoding="utf-8") as handle:
        json.dump(history, handle, indent=2)
        handle.write("\n")
    best = max(
        (h for h in history if h["val_accuracy"] is not None),
        key=lambda h: (h["val_accuracy"], h["epoch"]),
    )
    print(
        json.dumps(
            {
                "checkpoint": str(args.checkpoint),
                "history": str(args.history),
                "epochs": len(history),
                "best_epoch": best["epoch"],
                "best_val_accuracy": best["val_accuracy"],
            }
        )
    )
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    manifest, data_root = _resolve_dataset(args, config)
    checkpoint = pipeline.load_checkpoint(args.checkpoint)
    report = pipeline.evaluate(checkpoint, manifest, args.split, data_root)
    with open(args.out, "w", encoding="utf-8") as handle:
        json.dump(report.to_json_dict(), handle, indent=2)
        handle.write("\n")
    print(format_report_table(report))
    return EXIT_OK


def cmd_predict(args: argparse.Namespace) -> int:
    checkpoint = pipeline.load_checkpoint(args.checkpoint)
    for path in args.inputs:
        seq = formats.read_canonical(path)
        result = pipeline.predict(checkpoint, seq)
        print(json.dumps(result.to_json_dict()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="facesign", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_convert = sub.add_parser("convert", help="convert detector output to canonical JSONL")
    p_convert.add_argument("--input", "--input-dir", dest="input", required=True,
                           help="OpenPose JSON directory, or a CSV file")
    p_convert.add_argument("--format", choices=("openpose", "csv"), required=True)
    p_convert.add_argument("--profile", choices=sorted(PROFILES), required=True)
    p_convert.add_argument("--fps", type=float, default=None)
    p_convert.add_argument("--output", required=True)
    p_convert.set_defaults(func=cmd_convert)

    p_synth = sub.add_parser("synth", help="generate a synthetic dataset")
    p_synth.add_argument("--config", default=None)
    p_synth.add_argument("--out", required=True, help="output directory")
    p_synth.add_argument("--profile", choices=sorted(PROFILES), default=None)
    p_synth.add_argument("--counts", type=int, nargs=3, default=None,
                         metavar=("AFF", "YNQ", "WHQ"))
    p_synth.add_argument("--val-counts", type=int, nargs=3, default=None,
                         metavar=("AFF", "YNQ", "WHQ"),
                         help="additional per-class samples written with split=val "
                              "(making --counts the explicit train split)")
    p_synth.add_argument("--min-frames", type=int, default=None)
    p_synth.add_argument("--max-frames", type=int, default=None)
    p_synth.add_argument("--noise-sigma", type=float, default=None)
    p_synth.add_argument("--expression-amplitude", type=float, default=None)
    p_synth.add_argument("--shake-frequency", type=float, default=None)
    p_synth.add_argument("--seed", type=int, default=None)
    p_synth.set_defaults(func=cmd_synth)

    p_train = sub.add_parser("train", help="train a classifier from a manifest")
    p_train.add_argument("--config", default=None)
    p_train.add_argument("--manifest", default=None)
    p_train.add_argument("--data-root", default=None)
    p_train.add_argument("--profile", choices=sorted(PROFILES), default=None)
    p_train.add_argument("--checkpoint", default="checkpoint.json")
    p_train.add_argument("--history", default="history.json")
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--batch-size", type=int, default=None)
    p_train.add_argument("--learning-rate", type=float, default=None)
    p_train.add_argument("--seed", type=int, default=None, help="weight init seed")
    p_train.add_argument("--shuffle-seed", type=int, default=None)
    p_train.add_argument("--conv-filters", type=int, default=None)
    p_train.add_argument("--kernel-size", type=int, default=None)
    p_train.add_argument("--hidden-units", type=int, default=None)
    p_train.add_argument("--augment-copies", type=int, default=None)
    p_train.add_argument("--augment-seed", type=int, default=None)
    p_train.add_argument("--min-segments", type=int, default=None)
    p_train.add_argument("--max-segments", type=int, default=None)
    p_train.add_argument("--train-fraction", type=float, default=None,
                         help="stratified-split an unassigned manifest before training")
    p_train.add_argument("--train-counts", type=int, nargs=3, default=None)
    p_train.add_argument("--split-seed", type=int, default=None)
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a checkpoint on a manifest split")
    p_eval.add_argument("--config", default=None)
    p_eval.add_argument("--checkpoint", required=True)
    p_eval.add_argument("--manifest", default=None)
    p_eval.add_argument("--data-root", default=None)
    p_eval.add_argument("--split", choices=("train", "val"), default="val")
    p_eval.add_argument("--out", default="eval_report.json")
    p_eval.set_defaults(func=cmd_eval)

    p_predict = sub.add_parser("predict", help="classify canonical JSONL sequences")
    p_predict.add_argument("--checkpoint", required=True)
    p_predict.add_argument("inputs", nargs="+", help="canonical JSONL files")
    p_predict.set_defaults(func=cmd_predict)

    return parser


_DATA_ERRORS = (MalformedInput, EmptySequence, EmptyDataset, IoFailure, UnsupportedVersion)
_CONFIG_ERRORS = (ConfigError, ProfileMismatch, DegenerateSplit, ShapeError, ValueError)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _DATA_ERRORS as exc:
        print(f"facesign {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except _CONFIG_ERRORS as exc:
        print(f"facesign {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"facesign {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

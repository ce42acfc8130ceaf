"""CLI: extract --video PATH --profile NAME --out PATH.

Exit codes: 0 success, 2 unreadable video, 4 detector unavailable (or the
detector's output is incompatible with the requested profile).
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .backends import DetectorUnavailable, PROFILE_LANDMARKS, make_backend
from .extract import ExtractionJob, VideoUnreadable, extract

EXIT_OK = 0
EXIT_VIDEO = 2
EXIT_DETECTOR = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="facesign-extract",
        description="Run a face-landmark detector over a video and write canonical JSONL.",
    )
    parser.add_argument("--video", required=True, help="input video file")
    parser.add_argument("--profile", required=True, choices=sorted(PROFILE_LANDMARKS))
    parser.add_argument("--out", required=True, help="output JSONL path")
    parser.add_argument(
        "--backend",
        choices=("auto", "synthetic"),
        default="auto",
        help="'synthetic' replaces the real detector with a deterministic "
             "stand-in (format/testing use only)",
    )
    parser.add_argument("--dlib-model", default=None,
                        help="path to the 68-landmark dlib shape predictor")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        backend = make_backend(args.profile, backend=args.backend, dlib_model=args.dlib_model)
        frames = extract(
            ExtractionJob(video_path=args.video, profile=args.profile, output_path=args.out),
            backend,
        )
    except VideoUnreadable as exc:
        print(f"facesign-extract: error: {exc}", file=sys.stderr)
        return EXIT_VIDEO
    except DetectorUnavailable as exc:
        print(f"facesign-extract: error: {exc}", file=sys.stderr)
        return EXIT_DETECTOR
    print(json.dumps({"output": args.out, "frames": frames, "profile": args.profile}))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

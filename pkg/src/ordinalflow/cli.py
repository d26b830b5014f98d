"""Command-line surface.

Commands:
    classify     run the pipeline over a frame corpus and write a report
    evaluate     score a report against a ground-truth file
    synth        generate a synthetic corpus (frames + sidecars + truth)
    motion-dump  write per-frame motion features as JSON lines

Exit codes: 0 success, 2 parse/format error, 3 alignment error,
4 config error. ORDINALFLOW_LOG in {error, warn, info, debug} controls
logging verbosity.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from pathlib import Path

from . import __version__
from .config import config_echo, load_config
from .errors import AlignmentError, ConfigError, OrdinalFlowError, ParseError
from .frameio import load_frames, write_frames_dir, write_image, write_packed
from .fusion import PipelineParams, run_pipeline
from .metrics import evaluate
from .providers import (
    load_detection_sidecar,
    load_score_sidecar,
    write_detection_sidecar,
    write_score_sidecar,
)
from .render import render_annotated
from .report import dumps, write_atomic
from .synthgen import SceneSpec, generate

log = logging.getLogger("ordinalflow")

_LOG_LEVELS = {"error": logging.ERROR, "warn": logging.WARNING,
               "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("ORDINALFLOW_LOG", "warn").lower()
    logging.basicConfig(level=_LOG_LEVELS.get(level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ordinalflow")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("classify", help="classify a frame corpus")
    c.add_argument("--frames", required=True, help="frame directory or packed .ordv file")
    c.add_argument("--scores", help="scores sidecar (JSON lines)")
    c.add_argument("--detections", help="detections sidecar (JSON lines)")
    c.add_argument("--config", help="JSON config file")
    c.add_argument("--out", required=True, help="report JSON output path")
    c.add_argument("--annotate-dir", help="write annotated frames here")
    c.add_argument("--annotate-stride", type=int, default=1,
                   help="annotate every N-th frame (default 1)")
    c.add_argument("--trace", action="store_true", help="include per-frame trace in the report")
    c.add_argument("--no-timing", action="store_true",
                   help="write wall_clock_seconds as 0.0 for diffable reports")

    e = sub.add_parser("evaluate", help="score a report against ground truth")
    e.add_argument("--report", required=True)
    e.add_argument("--truth", required=True, help="one level per segment, one per line")
    e.add_argument("--out", help="metrics JSON output path (default: stdout)")

    s = sub.add_parser("synth", help="generate a synthetic corpus")
    s.add_argument("--out", required=True, help="output directory")
    s.add_argument("--level", type=int, required=True)
    s.add_argument("--frames", type=int, default=100, help="number of frames")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--segments", type=int, default=None,
                   help="emit N segments of 100 frames (overrides --frames)")
    s.add_argument("--width", type=int, default=224)
    s.add_argument("--height", type=int, default=224)
    s.add_argument("--noise-sigma", type=float, default=2.0)
    s.add_argument("--score-noise", type=float, default=0.0)
    s.add_argument("--packed", action="store_true", help="write a packed .ordv container")

    m = sub.add_parser("motion-dump", help="dump per-frame motion features")
    m.add_argument("--frames", required=True)
    m.add_argument("--config")
    m.add_argument("--out", required=True)
    return parser


def _load_params(config_path) -> PipelineParams:
    return load_config(config_path) if config_path else PipelineParams()


def cmd_classify(args) -> int:
    params = _load_params(args.config)
    frames = load_frames(args.frames)
    scores = load_score_sidecar(args.scores) if args.scores else None
    detections = load_detection_sidecar(args.detections) if args.detections else None
    if scores is not None and len(scores) != len(frames):
        raise AlignmentError(f"{len(frames)} frames but {len(scores)} score vectors")
    if detections is not None and len(detections) != len(frames):
        raise AlignmentError(f"{len(frames)} frames but {len(detections)} detection sets")

    log.info("classifying %d frames", len(frames))
    trace: list = []
    start = time.perf_counter()
    segments = run_pipeline(frames, scores, detections, params, frame_trace=trace)
    elapsed = time.perf_counter() - start

    if args.annotate_dir:
        out_dir = Path(args.annotate_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        stride = max(args.annotate_stride, 1)
        for fp in trace[::stride]:
            det = detections[fp.frame_index] if detections is not None else None
            annotated = render_annotated(frames[fp.frame_index], det,
                                         fp.adjusted_scores, fp.level)
            write_image(out_dir / f"{fp.frame_index:06d}.ppm", annotated)

    report = {
        "tool": "ordinalflow",
        "version": __version__,
        "config": config_echo(params),
        "n_frames": len(frames),
        "segments": [
            {
                "segment": s.segment_index,
                "frame_start": s.frame_start,
                "frame_count": s.frame_count,
                "level": s.level,
                "smoothed_level": s.smoothed_level,
                "confidence": s.confidence,
            }
            for s in segments
        ],
        "wall_clock_seconds": 0.0 if args.no_timing else elapsed,
    }
    if args.trace:
        report["frames"] = [
            {"frame": fp.frame_index, "level": fp.level, "confidence": fp.confidence}
            for fp in trace
        ]
    write_atomic(args.out, dumps(report) + "\n")
    return 0


def _read_truth(path) -> list:
    levels = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                levels.append(int(line))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: not an integer level") from exc
    return levels


def cmd_evaluate(args) -> int:
    try:
        with open(args.report, "r", encoding="utf-8") as fh:
            report = json.load(fh)
        segs = report["segments"]
        pred = [int(s["smoothed_level"]) for s in segs]
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ParseError(f"{args.report}: {exc}") from exc
    truth = _read_truth(args.truth)
    if len(truth) != len(pred):
        raise AlignmentError(f"report has {len(pred)} segments but truth has {len(truth)}")
    try:
        rep = evaluate(truth, pred)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    out = dumps({"n": rep.n, "metrics": rep.to_dict()}) + "\n"
    if args.out:
        write_atomic(args.out, out)
    else:
        sys.stdout.write(out)
    return 0


def cmd_synth(args) -> int:
    n_frames = args.segments * 100 if args.segments is not None else args.frames
    try:
        spec = SceneSpec(width=args.width, height=args.height, level=args.level,
                         seed=args.seed, frames=n_frames,
                         noise_sigma=args.noise_sigma, score_noise=args.score_noise)
        spec.validate()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    scene = generate(spec)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.packed:
        write_packed(out / "frames.ordv", scene.frames)
    else:
        write_frames_dir(out / "frames", scene.frames)
    write_score_sidecar(out / "scores.jsonl", scene.scores)
    write_detection_sidecar(out / "detections.jsonl", scene.detections)
    seg_truth = scene.segment_truth(100)
    write_atomic(out / "truth.txt", "".join(f"{lv}\n" for lv in seg_truth))
    log.info("wrote %d frames to %s", len(scene.frames), out)
    return 0


def cmd_motion_dump(args) -> int:
    from .fusion import iter_motion

    params = _load_params(args.config)
    frames = load_frames(args.frames)
    lines = []
    for feats, _mask, _comps in iter_motion(frames, params):
        lines.append(dumps({
            "frame": feats.frame_index,
            "coverage": feats.coverage,
            "intensity": feats.intensity,
            "contour_density": feats.contour_density,
            "stability": feats.stability,
            "trend": feats.trend,
        }))
    write_atomic(args.out, "\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "classify": cmd_classify,
    "evaluate": cmd_evaluate,
    "synth": cmd_synth,
    "motion-dump": cmd_motion_dump,
}


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AlignmentError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OrdinalFlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

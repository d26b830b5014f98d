"""Ordinal fusion core: alpha rules, per-frame classification,
confidence-weighted segment aggregation, and cross-segment smoothing.

Per frame the semantic score vector is reweighted by a rule-based alpha
vector derived from motion context, the adjusted argmax gives the frame
level, and max(adjusted scores) its confidence. Segments average frame
levels weighted by confidence; segment levels are then smoothed with a
centered moving average.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .bgsub import BackgroundSubtractor, SubtractorParams
from .errors import AlignmentError
from .imaging import (
    Frame,
    StructuringElement,
    closing,
    connected_components,
    opening,
    preprocess,
    to_grayscale,
)
from .motion import DEFAULT_TREND_EPS, DEFAULT_WINDOW, MotionFeatures, MotionWindow
from .providers import DetectionSet, N_LEVELS, ScoreVector

LEVELS = tuple(range(1, N_LEVELS + 1))

# coverage cut points for the motion-only fallback classifier
MOTION_ONLY_THRESHOLDS = (0.02, 0.06, 0.15, 0.30)


@dataclass
class FusionParams:
    low_motion_threshold: float = 0.05
    rule_window: int = 15
    alpha_boost: float = 1.2
    alpha_damp: float = 0.8
    boosted_levels: tuple = (4, 5)
    high_motion_coverage: float = 0.15
    high_motion_stability: float = 0.995
    presence_min_detections: int = 5
    presence_min_density: float = 40.0
    segment_smoothing_window: int = 3
    aggregator: str = "mean"
    smooth_frame_levels: bool = False

    def validate(self) -> None:
        if not 0.0 <= self.low_motion_threshold < self.high_motion_coverage <= 1.0:
            raise ValueError("coverage thresholds must satisfy 0 <= low < high <= 1")
        if not self.alpha_boost > 1.0 > self.alpha_damp > 0.0:
            raise ValueError("alpha values must satisfy boost > 1 > damp > 0")
        if self.rule_window < 1:
            raise ValueError("rule_window must be >= 1")
        if not 0.8 <= self.high_motion_stability <= 1.0:
            raise ValueError("high_motion_stability must be in [0.8, 1]")
        if self.presence_min_detections < 0 or self.presence_min_density < 0:
            raise ValueError("presence thresholds must be >= 0")
        if self.segment_smoothing_window < 1 or self.segment_smoothing_window % 2 == 0:
            raise ValueError("segment_smoothing_window must be odd and >= 1")
        if any(lv not in LEVELS for lv in self.boosted_levels):
            raise ValueError("boosted_levels must be congestion levels")
        if self.aggregator not in ("mean", "median"):
            raise ValueError("aggregator must be 'mean' or 'median'")


@dataclass
class FramePrediction:
    level: int
    confidence: float
    adjusted_scores: np.ndarray
    frame_index: int


@dataclass
class SegmentPrediction:
    segment_index: int
    level: int
    smoothed_level: int
    confidence: float
    frame_count: int
    frame_start: int


@dataclass
class PipelineParams:
    """Everything run_pipeline needs, grouped by stage."""

    target_width: int = 224
    target_height: int = 224
    kernel_radius_x: int = 2
    kernel_radius_y: int = 2
    min_area: int = 25
    segment_len: int = 100
    motion_window: int = DEFAULT_WINDOW
    trend_eps: float = DEFAULT_TREND_EPS
    motion_only: bool = False
    subtractor: SubtractorParams = field(default_factory=SubtractorParams)
    fusion: FusionParams = field(default_factory=FusionParams)

    def validate(self) -> None:
        if self.target_width <= 0 or self.target_height <= 0:
            raise ValueError("target dimensions must be positive")
        if self.min_area < 1:
            raise ValueError("min_area must be >= 1")
        if self.segment_len < 1:
            raise ValueError("segment_len must be >= 1")
        if self.motion_window < 1:
            raise ValueError("motion_window must be >= 1")
        if self.kernel_radius_x < 0 or self.kernel_radius_y < 0:
            raise ValueError("kernel radii must be >= 0")
        self.subtractor.validate()
        self.fusion.validate()


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def compute_alpha(
    mean_coverage: float,
    stability: float,
    contour_density: float,
    detection_count: int,
    params: FusionParams | None = None,
) -> np.ndarray:
    """Rule-based score multipliers from windowed motion context.

    Rule A (stalled traffic): near-zero coverage with vehicles present
    boosts the congested levels. Rule B (free flow): stable high
    coverage damps them. The coverage bands are disjoint so at most one
    rule fires.
    """
    p = params if params is not None else FusionParams()
    alpha = np.ones(N_LEVELS)
    presence = (
        detection_count >= p.presence_min_detections
        or contour_density >= p.presence_min_density
    )
    if mean_coverage < p.low_motion_threshold and presence:
        for lv in p.boosted_levels:
            alpha[lv - 1] = p.alpha_boost
    elif mean_coverage >= p.high_motion_coverage and stability >= p.high_motion_stability:
        for lv in p.boosted_levels:
            alpha[lv - 1] = p.alpha_damp
    return alpha


def adjust_and_classify(scores: ScoreVector, alpha) -> FramePrediction:
    """Elementwise reweight, then argmax (ties break to the lowest level)."""
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape != (N_LEVELS,) or not np.all(np.isfinite(alpha)) or np.any(alpha <= 0):
        raise ValueError("alpha must be 5 positive finite multipliers")
    adjusted = scores.scores * alpha
    level = int(np.argmax(adjusted)) + 1  # argmax returns the first maximum
    return FramePrediction(level, float(adjusted.max()), adjusted, scores.frame_index)


def aggregate_segment(
    frames: Sequence[FramePrediction],
    segment_index: int = 0,
    aggregator: str = "mean",
) -> SegmentPrediction:
    """Confidence-weighted level aggregate over one segment of frames."""
    if len(frames) == 0:
        raise ValueError("segment must contain at least one frame")
    conf = np.array([f.confidence for f in frames])
    levels = np.array([f.level for f in frames], dtype=np.float64)
    if np.any(conf <= 0.0):
        raise ValueError("frame confidences must be positive")
    if aggregator == "mean":
        level = round_half_up(float((conf * levels).sum() / conf.sum()))
    elif aggregator == "median":
        order = np.argsort(levels, kind="stable")
        cum = np.cumsum(conf[order])
        level = int(levels[order][np.searchsorted(cum, 0.5 * conf.sum())])
    else:
        raise ValueError("aggregator must be 'mean' or 'median'")
    return SegmentPrediction(
        segment_index=segment_index,
        level=level,
        smoothed_level=level,
        confidence=float(conf.mean()),
        frame_count=len(frames),
        frame_start=frames[0].frame_index,
    )


def smooth_segments(levels: Sequence[int], window: int = 3) -> List[int]:
    """Centered moving average, clipped at the ends, rounded half-up."""
    if window < 1 or window % 2 == 0:
        raise ValueError("smoothing window must be odd and >= 1")
    vals = [int(v) for v in levels]
    half = window // 2
    out = []
    for i in range(len(vals)):
        chunk = vals[max(0, i - half) : i + half + 1]
        out.append(round_half_up(sum(chunk) / len(chunk)))
    return out


def motion_only_scores(coverage: float, frame_index: int = 0) -> ScoreVector:
    """Fallback score vector when no semantic provider is available:
    a near-one-hot vector at the coverage-band level."""
    level = 1 + sum(coverage >= t for t in MOTION_ONLY_THRESHOLDS)
    s = np.full(N_LEVELS, 0.05)
    s[level - 1] = 1.0
    return ScoreVector(s, frame_index)


def iter_motion(frames: Sequence[Frame], params: PipelineParams | None = None):
    """Run preprocess -> bgsub -> morphology -> components -> motion
    over a frame sequence, yielding (features, mask, components) per frame.
    """
    p = params if params is not None else PipelineParams()
    p.validate()
    se = StructuringElement.ellipse(p.kernel_radius_x, p.kernel_radius_y)
    sub = BackgroundSubtractor(p.target_width, p.target_height, p.subtractor)
    window = MotionWindow(p.motion_window, p.trend_eps)
    prev_gray = None
    for t, frame in enumerate(frames):
        gray = to_grayscale(preprocess(frame, p.target_width, p.target_height))
        mask = closing(opening(sub.apply(gray), se), se)
        comps = connected_components(mask, p.min_area)
        feats = window.step(mask, prev_gray, gray, comps, frame_index=t)
        prev_gray = gray
        yield feats, mask, comps


def run_pipeline(
    frames: Sequence[Frame],
    scores: Sequence[ScoreVector] | None,
    detections: Sequence[DetectionSet] | None,
    params: PipelineParams | None = None,
    frame_trace: list | None = None,
) -> List[SegmentPrediction]:
    """Classify a frame sequence into per-segment congestion levels.

    scores/detections must be index-aligned with frames; scores may be
    None only in motion_only mode. When frame_trace is a list it is
    filled with the per-frame FramePrediction objects.
    """
    p = params if params is not None else PipelineParams()
    p.validate()
    if len(frames) == 0:
        raise AlignmentError("no frames to process")
    if not p.motion_only:
        if scores is None:
            raise AlignmentError("scores are required unless motion_only is set")
        if len(scores) != len(frames):
            raise AlignmentError(f"{len(frames)} frames but {len(scores)} score vectors")
    if detections is not None and len(detections) != len(frames):
        raise AlignmentError(f"{len(frames)} frames but {len(detections)} detection sets")

    rule_cov: deque = deque(maxlen=p.fusion.rule_window)
    preds: List[FramePrediction] = []
    for t, (feats, mask, comps) in enumerate(iter_motion(frames, p)):
        rule_cov.append(feats.coverage)
        n_det = detections[t].count if detections is not None else 0
        alpha = compute_alpha(
            float(np.mean(rule_cov)), feats.stability, feats.contour_density, n_det, p.fusion
        )
        if p.motion_only:
            sv = motion_only_scores(feats.coverage, t)
        else:
            sv = scores[t]
            if sv.frame_index != t:
                raise AlignmentError(f"score vector at position {t} has index {sv.frame_index}")
        preds.append(adjust_and_classify(sv, alpha))

    if p.fusion.smooth_frame_levels:
        smoothed = smooth_segments([fp.level for fp in preds], p.fusion.segment_smoothing_window)
        preds = [
            FramePrediction(lv, fp.confidence, fp.adjusted_scores, fp.frame_index)
            for lv, fp in zip(smoothed, preds)
        ]
    if frame_trace is not None:
        frame_trace.extend(preds)

    segments: List[SegmentPrediction] = []
    for i in range(0, len(preds), p.segment_len):
        segments.append(
            aggregate_segment(preds[i : i + p.segment_len], len(segments), p.fusion.aggregator)
        )
    smoothed_levels = smooth_segments(
        [s.level for s in segments], p.fusion.segment_smoothing_window
    )
    for seg, lv in zip(segments, smoothed_levels):
        seg.smoothed_level = lv
    return segments

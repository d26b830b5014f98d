"""Sklearn-style front end over the frame pipeline.

CongestionClassifier exposes the whole engine behind the familiar
get_params/set_params/predict surface so it composes with pipelines,
grid search, and cloning. The algorithm has no training phase; fit()
validates parameters and marks the estimator fitted.
"""
from __future__ import annotations

from typing import List, Sequence

import numpy as np
from sklearn.base import BaseEstimator

from .bgsub import SubtractorParams
from .fusion import FusionParams, PipelineParams, SegmentPrediction, run_pipeline
from .metrics import qwk
from .validation import check_aligned, check_frames, check_levels


class CongestionClassifier(BaseEstimator):
    """Ordinal 1..5 congestion classifier over frame sequences.

    predict() takes the frame list plus index-aligned score and
    detection streams and returns one smoothed level per segment.
    """

    def __init__(
        self,
        target_width=224,
        target_height=224,
        kernel_radius=2,
        min_area=25,
        segment_len=100,
        motion_window=15,
        trend_eps=0.002,
        motion_only=False,
        k_max=5,
        learning_rate=0.01,
        match_threshold_sq=16.0,
        background_ratio=0.9,
        initial_variance=225.0,
        variance_floor=4.0,
        new_component_weight=0.05,
        low_motion_threshold=0.05,
        rule_window=15,
        alpha_boost=1.2,
        alpha_damp=0.8,
        high_motion_coverage=0.15,
        high_motion_stability=0.995,
        presence_min_detections=5,
        presence_min_density=40.0,
        segment_smoothing_window=3,
        aggregator="mean",
        smooth_frame_levels=False,
    ):
        self.target_width = target_width
        self.target_height = target_height
        self.kernel_radius = kernel_radius
        self.min_area = min_area
        self.segment_len = segment_len
        self.motion_window = motion_window
        self.trend_eps = trend_eps
        self.motion_only = motion_only
        self.k_max = k_max
        self.learning_rate = learning_rate
        self.match_threshold_sq = match_threshold_sq
        self.background_ratio = background_ratio
        self.initial_variance = initial_variance
        self.variance_floor = variance_floor
        self.new_component_weight = new_component_weight
        self.low_motion_threshold = low_motion_threshold
        self.rule_window = rule_window
        self.alpha_boost = alpha_boost
        self.alpha_damp = alpha_damp
        self.high_motion_coverage = high_motion_coverage
        self.high_motion_stability = high_motion_stability
        self.presence_min_detections = presence_min_detections
        self.presence_min_density = presence_min_density
        self.segment_smoothing_window = segment_smoothing_window
        self.aggregator = aggregator
        self.smooth_frame_levels = smooth_frame_levels

    def pipeline_params(self) -> PipelineParams:
        params = PipelineParams(
            target_width=self.target_width,
            target_height=self.target_height,
            kernel_radius_x=self.kernel_radius,
            kernel_radius_y=self.kernel_radius,
            min_area=self.min_area,
            segment_len=self.segment_len,
            motion_window=self.motion_window,
            trend_eps=self.trend_eps,
            motion_only=self.motion_only,
            subtractor=SubtractorParams(
                k_max=self.k_max,
                learning_rate=self.learning_rate,
                match_threshold_sq=self.match_threshold_sq,
                background_ratio=self.background_ratio,
                initial_variance=self.initial_variance,
                variance_floor=self.variance_floor,
                new_component_weight=self.new_component_weight,
            ),
            fusion=FusionParams(
                low_motion_threshold=self.low_motion_threshold,
                rule_window=self.rule_window,
                alpha_boost=self.alpha_boost,
                alpha_damp=self.alpha_damp,
                high_motion_coverage=self.high_motion_coverage,
                high_motion_stability=self.high_motion_stability,
                presence_min_detections=self.presence_min_detections,
                presence_min_density=self.presence_min_density,
                segment_smoothing_window=self.segment_smoothing_window,
                aggregator=self.aggregator,
                smooth_frame_levels=self.smooth_frame_levels,
            ),
        )
        params.validate()
        return params

    def fit(self, X=None, y=None):
        """No training needed; validates parameters."""
        self.pipeline_params()
        self.fitted_ = True
        return self

    def predict_segments(self, frames, scores=None, detections=None) -> List[SegmentPrediction]:
        check_frames(frames)
        check_aligned(frames, scores, "score vectors")
        check_aligned(frames, detections, "detection sets")
        return run_pipeline(frames, scores, detections, self.pipeline_params())

    def predict(self, frames, scores=None, detections=None) -> np.ndarray:
        """Smoothed congestion level per segment."""
        segs = self.predict_segments(frames, scores, detections)
        return np.array([s.smoothed_level for s in segs], dtype=int)

    def score(self, frames, scores=None, detections=None, y: Sequence[int] = ()) -> float:
        """Quadratic weighted kappa of the smoothed segment levels vs y."""
        truth = check_levels(y)
        pred = self.predict(frames, scores, detections)
        if len(truth) != len(pred):
            raise ValueError(f"{len(pred)} segments but {len(truth)} truth labels")
        return qwk(truth, pred)

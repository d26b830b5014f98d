"""Ordinal traffic congestion classification from frame sequences.

The engine fuses externally supplied semantic similarity scores and
vehicle detections with internally computed background-subtraction
motion features, producing one congestion level (1..5) per fixed-length
segment of frames.
"""

__version__ = "0.1.0"

from .bgsub import BackgroundSubtractor, SubtractorParams
from .errors import (
    AlignmentError,
    ConfigError,
    NotReadyError,
    OrdinalFlowError,
    ParseError,
)
from .estimator import CongestionClassifier
from .fusion import (
    FramePrediction,
    FusionParams,
    PipelineParams,
    SegmentPrediction,
    adjust_and_classify,
    aggregate_segment,
    compute_alpha,
    run_pipeline,
    smooth_segments,
)
from .imaging import BinaryMask, Frame, StructuringElement
from .metrics import EvalReport, evaluate
from .motion import MotionFeatures, MotionWindow
from .providers import (
    Detection,
    DetectionSet,
    ScoreVector,
    StubProvider,
    cosine_similarity,
    load_detection_sidecar,
    load_score_sidecar,
    scores_from_embeddings,
    similarity_matrix,
)
from .synthgen import DensityBand, SceneSpec, SyntheticScene, default_bands, generate

__all__ = [
    "AlignmentError",
    "BackgroundSubtractor",
    "BinaryMask",
    "ConfigError",
    "CongestionClassifier",
    "DensityBand",
    "Detection",
    "DetectionSet",
    "EvalReport",
    "Frame",
    "FramePrediction",
    "FusionParams",
    "MotionFeatures",
    "MotionWindow",
    "NotReadyError",
    "OrdinalFlowError",
    "ParseError",
    "PipelineParams",
    "SceneSpec",
    "ScoreVector",
    "SegmentPrediction",
    "StructuringElement",
    "StubProvider",
    "SubtractorParams",
    "SyntheticScene",
    "adjust_and_classify",
    "aggregate_segment",
    "compute_alpha",
    "cosine_similarity",
    "default_bands",
    "evaluate",
    "generate",
    "load_detection_sidecar",
    "load_score_sidecar",
    "run_pipeline",
    "scores_from_embeddings",
    "similarity_matrix",
    "smooth_segments",
]

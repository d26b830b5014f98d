"""Sources of semantic score vectors and vehicle detections.

The engine never runs a neural model: semantic scores (one per
congestion level) and detection boxes arrive through line-delimited
JSON sidecar files, or from raw embeddings via the similarity helpers,
or from the deterministic stub used by tests.

Sidecar wire format (UTF-8, one JSON object per line, LF-terminated):
    scores:     {"frame": <uint>, "scores": [<f64> x 5]}
    detections: {"frame": <uint>, "boxes": [[x, y, w, h, conf], ...]}
Unknown keys are ignored; NaN/Inf are rejected; frame indices must be
contiguous from 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Sequence

import numpy as np

from .errors import AlignmentError, ParseError

N_LEVELS = 5

# Severity-ascending label order: index 0 = level 1.
LEVEL_LABELS = ("Empty Road", "Light Traffic", "Moderate Traffic", "Heavy Traffic", "Severe Jam")


@dataclass
class ScoreVector:
    """Five non-negative per-level similarity scores for one frame."""

    scores: np.ndarray
    frame_index: int = 0

    def __post_init__(self):
        s = np.asarray(self.scores, dtype=np.float64)
        if s.shape != (N_LEVELS,):
            raise ValueError(f"expected {N_LEVELS} scores, got shape {s.shape}")
        if not np.all(np.isfinite(s)):
            raise ValueError("scores must be finite")
        if np.any(s < 0.0):
            raise ValueError("scores must be non-negative")
        self.scores = s


@dataclass
class Detection:
    x: float
    y: float
    w: float
    h: float
    confidence: float

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError("detection box must have positive size")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError("confidence must be in [0, 1]")


@dataclass
class DetectionSet:
    frame_index: int = 0
    detections: List[Detection] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.detections)


def cosine_similarity(a, b) -> float:
    """a.b / (|a| |b|), in [-1, 1]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1 or a.shape != b.shape:
        raise ValueError("embeddings must be 1-D and of equal dimension")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("embeddings must be finite")
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for zero vectors")
    return float(a @ b / (na * nb))


def similarity_matrix(img_embeddings: Sequence, txt_embeddings: Sequence) -> np.ndarray:
    """Raw inner products: out[i, j] = img_i . txt_j (no normalization)."""
    a = np.asarray(img_embeddings, dtype=np.float64)
    b = np.asarray(txt_embeddings, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ValueError("all embeddings must share one dimension")
    return a @ b.T


def scores_from_embeddings(img_embedding, level_prompts: Sequence, frame_index: int = 0) -> ScoreVector:
    """Cosine against each of the five level prompts, shifted to [0, 1].

    The (s+1)/2 shift keeps downstream confidence weights positive
    without moving the argmax.
    """
    prompts = list(level_prompts)
    if len(prompts) != N_LEVELS:
        raise ValueError(f"expected {N_LEVELS} level prompts")
    raw = np.array([cosine_similarity(img_embedding, p) for p in prompts])
    return ScoreVector((raw + 1.0) / 2.0, frame_index)


def _reject_constant(value):
    raise ValueError(f"non-finite number: {value}")


def _iter_records(path):
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                rec = json.loads(line, parse_constant=_reject_constant)
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if not isinstance(rec, dict):
                raise ParseError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, rec


def _check_frame_index(path, lineno, rec, expected):
    idx = rec.get("frame")
    if not isinstance(idx, int) or idx < 0:
        raise ParseError(f"{path}:{lineno}: 'frame' must be a non-negative integer")
    if idx != expected:
        raise AlignmentError(
            f"{path}:{lineno}: frame index {idx}, expected {expected} "
            "(indices must be contiguous from 0)"
        )
    return idx


def load_score_sidecar(path) -> List[ScoreVector]:
    """Read a scores sidecar; raises ParseError / AlignmentError."""
    out: List[ScoreVector] = []
    for lineno, rec in _iter_records(path):
        idx = _check_frame_index(path, lineno, rec, len(out))
        scores = rec.get("scores")
        if not isinstance(scores, list) or len(scores) != N_LEVELS:
            raise ParseError(f"{path}:{lineno}: 'scores' must hold exactly {N_LEVELS} numbers")
        try:
            out.append(ScoreVector(np.array(scores, dtype=np.float64), idx))
        except (ValueError, TypeError) as exc:
            raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return out


def load_detection_sidecar(path) -> List[DetectionSet]:
    """Read a detections sidecar; raises ParseError / AlignmentError."""
    out: List[DetectionSet] = []
    for lineno, rec in _iter_records(path):
        idx = _check_frame_index(path, lineno, rec, len(out))
        boxes = rec.get("boxes")
        if not isinstance(boxes, list):
            raise ParseError(f"{path}:{lineno}: 'boxes' must be a list")
        dets = []
        for box in boxes:
            if not isinstance(box, list) or len(box) != 5:
                raise ParseError(f"{path}:{lineno}: each box must be [x, y, w, h, conf]")
            if not all(isinstance(v, (int, float)) and math.isfinite(v) for v in box):
                raise ParseError(f"{path}:{lineno}: box values must be finite numbers")
            try:
                dets.append(Detection(*[float(v) for v in box]))
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
        out.append(DetectionSet(idx, dets))
    return out


def write_score_sidecar(path, scores: Sequence[ScoreVector]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for sv in scores:
            fh.write(json.dumps({"frame": sv.frame_index, "scores": list(sv.scores)}) + "\n")


def write_detection_sidecar(path, sets: Sequence[DetectionSet]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ds in sets:
            boxes = [[d.x, d.y, d.w, d.h, d.confidence] for d in ds.detections]
            fh.write(json.dumps({"frame": ds.frame_index, "boxes": boxes}) + "\n")


class StubProvider:
    """Deterministic test double for the score and detection sidecars.

    Emits score vectors peaked at the true level (Gaussian falloff over
    level distance plus optional seeded noise) and detection counts
    drawn from the synthetic density bands. Output depends only on
    (seed, frame index), so streams are reproducible and parallelizable.
    """

    def __init__(self, levels: Sequence[int], seed: int = 0, noise: float = 0.0,
                 bands=None, width: int = 224, height: int = 224):
        levels = [int(v) for v in levels]
        if any(v < 1 or v > N_LEVELS for v in levels):
            raise ValueError("levels must be in 1..5")
        if bands is None:
            from .synthgen import default_bands  # deferred: synthgen imports this module

            bands = default_bands()
        self.levels = levels
        self.seed = int(seed)
        self.noise = float(noise)
        self.bands = list(bands)
        self.width = width
        self.height = height

    def __len__(self) -> int:
        return len(self.levels)

    def score_vector(self, t: int) -> ScoreVector:
        level = self.levels[t]
        base = 0.25 + 0.5 * np.exp(-0.5 * (np.arange(1, N_LEVELS + 1) - level) ** 2)
        if self.noise > 0.0:
            rng = np.random.default_rng([self.seed, t, 0])
            base = base + self.noise * rng.standard_normal(N_LEVELS)
        return ScoreVector(np.clip(base, 1e-6, None), t)

    def detection_set(self, t: int) -> DetectionSet:
        rng = np.random.default_rng([self.seed, t, 1])
        band = self.bands[self.levels[t] - 1]
        n = int(rng.integers(band.count_min, band.count_max + 1))
        dets = []
        for _ in range(n):
            w = float(rng.uniform(10, 30))
            h = float(rng.uniform(8, 18))
            x = float(rng.uniform(0, max(self.width - w, 1)))
            y = float(rng.uniform(0, max(self.height - h, 1)))
            dets.append(Detection(x, y, w, h, float(rng.uniform(0.5, 1.0))))
        return DetectionSet(t, dets)

    def scores(self) -> List[ScoreVector]:
        return [self.score_vector(t) for t in range(len(self.levels))]

    def detections(self) -> List[DetectionSet]:
        return [self.detection_set(t) for t in range(len(self.levels))]

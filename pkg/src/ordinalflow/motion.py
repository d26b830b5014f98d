"""Windowed motion metrics computed from foreground masks.

Coverage is the foreground fraction of a mask; stability is
1 / (1 + Var(coverage window)) with the population variance, so it
lives in [0.8, 1] for coverages in [0, 1].
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .imaging import BinaryMask, ComponentStats, Frame

INCREASING = "increasing"
DECREASING = "decreasing"
STABLE = "stable"

DEFAULT_WINDOW = 15
DEFAULT_TREND_EPS = 0.002


@dataclass
class MotionFeatures:
    coverage: float
    intensity: float
    contour_density: float  # components per megapixel
    stability: float
    trend: str
    frame_index: int


def coverage(mask: BinaryMask) -> float:
    """Fraction of pixels marked foreground, in [0, 1]."""
    return float(mask.bits.mean())


def intensity(prev: Frame, curr: Frame, mask: BinaryMask) -> float:
    """Mean absolute temporal difference over foreground pixels, / 255.

    Zero when the mask is empty.
    """
    if (prev.height, prev.width) != (curr.height, curr.width) or (
        mask.height,
        mask.width,
    ) != (curr.height, curr.width):
        raise ValueError("frame/mask dimensions must match")
    if prev.channels != 1 or curr.channels != 1:
        raise ValueError("intensity expects grayscale frames")
    if not mask.bits.any():
        return 0.0
    a = prev.pixels.astype(np.float64)
    b = curr.pixels.astype(np.float64)
    return float(np.abs(b - a)[mask.bits].mean() / 255.0)


def contour_density(components: Sequence[ComponentStats], width: int, height: int) -> float:
    """Component count per megapixel of frame area."""
    if width <= 0 or height <= 0:
        raise ValueError("dimensions must be positive")
    return len(components) / (width * height / 1e6)


def stability(coverages: Sequence[float]) -> float:
    """1 / (1 + population variance of the coverage window)."""
    if len(coverages) == 0:
        raise ValueError("stability needs at least one coverage value")
    return 1.0 / (1.0 + float(np.var(coverages)))


def trend(coverages: Sequence[float], eps: float = DEFAULT_TREND_EPS) -> str:
    """Classify the least-squares slope of the window as
    increasing / decreasing / stable."""
    n = len(coverages)
    if n < 2:
        raise ValueError("trend needs at least two coverage values")
    slope = float(np.polyfit(np.arange(n), np.asarray(coverages, dtype=np.float64), 1)[0])
    if slope > eps:
        return INCREASING
    if slope < -eps:
        return DECREASING
    return STABLE


class MotionWindow:
    """Per-stream ring of recent coverage values.

    step() pushes one frame's mask and returns the full feature bundle.
    Windows shorter than 2 samples report stability 1.0 and a stable
    trend by convention.
    """

    def __init__(self, window: int = DEFAULT_WINDOW, trend_eps: float = DEFAULT_TREND_EPS):
        if window < 1:
            raise ValueError("window must be >= 1")
        self.window = window
        self.trend_eps = trend_eps
        self.coverages: deque = deque(maxlen=window)
        self.component_counts: deque = deque(maxlen=window)

    def step(
        self,
        mask: BinaryMask,
        prev_frame: Frame | None,
        curr_frame: Frame,
        components: Sequence[ComponentStats],
        frame_index: int = 0,
    ) -> MotionFeatures:
        cov = coverage(mask)
        self.coverages.append(cov)
        self.component_counts.append(len(components))
        vals: List[float] = list(self.coverages)
        return MotionFeatures(
            coverage=cov,
            intensity=0.0 if prev_frame is None else intensity(prev_frame, curr_frame, mask),
            contour_density=contour_density(components, mask.width, mask.height),
            stability=1.0 if len(vals) < 2 else stability(vals),
            trend=STABLE if len(vals) < 2 else trend(vals, self.trend_eps),
            frame_index=frame_index,
        )

    def mean_coverage(self) -> float:
        if not self.coverages:
            return 0.0
        return float(np.mean(self.coverages))

"""Annotated output frames: green detection boxes, a five-bar score
chart in the bottom-left corner, and a level banner strip at the top.
Pure function; pixels outside the drawn regions are untouched.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .imaging import Frame
from .providers import DetectionSet

BOX_COLOR = (0, 255, 0)
BAR_COLOR = (230, 230, 230)
BAR_TOP_COLOR = (255, 200, 0)
BANNER_COLOR = (220, 40, 40)

CHART_HEIGHT = 48
BAR_WIDTH = 8
BAR_GAP = 4
MARGIN = 4
BANNER_CELL = 8


def bar_heights(scores, chart_height: int = CHART_HEIGHT) -> list:
    """Pixel height per bar: round(score / max * chart_height), half-up."""
    s = np.asarray(scores, dtype=np.float64)
    top = float(s.max())
    if top <= 0.0:
        return [0] * len(s)
    return [int(np.floor(v / top * chart_height + 0.5)) for v in s]


def render_annotated(
    frame: Frame,
    detections: DetectionSet | None,
    adjusted_scores,
    level: int,
) -> Frame:
    """Return an RGB copy of the frame with overlays drawn on it."""
    if not 1 <= level <= 5:
        raise ValueError("level must be in 1..5")
    px = frame.pixels
    rgb = np.stack([px] * 3, axis=2).copy() if frame.channels == 1 else px.copy()
    h, w = rgb.shape[:2]

    if detections is not None:
        for det in detections.detections:
            _draw_box(rgb, det.x, det.y, det.w, det.h)

    heights = bar_heights(adjusted_scores)
    base = h - MARGIN
    for i, bh in enumerate(heights):
        if bh <= 0:
            continue
        x0 = MARGIN + i * (BAR_WIDTH + BAR_GAP)
        x1 = min(x0 + BAR_WIDTH, w)
        y0 = max(base - bh, 0)
        rgb[y0:base, x0:x1] = BAR_COLOR
        if i + 1 == level:
            rgb[y0 : min(y0 + 2, base), x0:x1] = BAR_TOP_COLOR

    # banner: one filled cell per level unit, top-left corner
    for i in range(level):
        x0 = MARGIN + i * (BANNER_CELL + 2)
        rgb[MARGIN : MARGIN + BANNER_CELL, x0 : min(x0 + BANNER_CELL, w)] = BANNER_COLOR

    return Frame(rgb, frame.index)


def _draw_box(rgb: np.ndarray, x: float, y: float, bw: float, bh: float) -> None:
    h, w = rgb.shape[:2]
    x0 = int(np.clip(np.floor(x), 0, w - 1))
    y0 = int(np.clip(np.floor(y), 0, h - 1))
    x1 = int(np.clip(np.ceil(x + bw), 0, w))
    y1 = int(np.clip(np.ceil(y + bh), 0, h))
    if x1 <= x0 or y1 <= y0:
        return
    rgb[y0, x0:x1] = BOX_COLOR
    rgb[y1 - 1, x0:x1] = BOX_COLOR
    rgb[y0:y1, x0] = BOX_COLOR
    rgb[y0:y1, x1 - 1] = BOX_COLOR

"""Raster primitives: frames, binary masks, morphology, connected components.

Everything here is a pure function of its inputs; masks and frames are
plain numpy-backed dataclasses.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import ndimage

LUMA_R, LUMA_G, LUMA_B = 0.299, 0.587, 0.114

_CONNECT8 = np.ones((3, 3), dtype=bool)


@dataclass
class Frame:
    """A single image in a stream.

    pixels: uint8 array, shape (h, w) for grayscale or (h, w, 3) for color.
    index: 0-based position of the frame in its stream.
    """

    pixels: np.ndarray
    index: int = 0

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            pass
        elif px.ndim == 3 and px.shape[2] == 3:
            pass
        else:
            raise ValueError(f"pixels must be (h, w) or (h, w, 3), got shape {px.shape}")
        if px.shape[0] == 0 or px.shape[1] == 0:
            raise ValueError("frame dimensions must be positive")
        if px.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {px.dtype}")
        if self.index < 0:
            raise ValueError("frame index must be >= 0")
        self.pixels = px

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3


@dataclass
class BinaryMask:
    """Per-pixel boolean foreground map (True = foreground)."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ValueError("mask must be 2-D")
        if bits.shape[0] == 0 or bits.shape[1] == 0:
            raise ValueError("mask dimensions must be positive")
        self.bits = bits.astype(bool, copy=False)

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def count(self) -> int:
        return int(self.bits.sum())


@dataclass(frozen=True)
class StructuringElement:
    """Elliptical neighborhood used by the morphology operators.

    Offsets are (dx, dy) pairs, always containing (0, 0) and symmetric
    under negation.
    """

    radius_x: int
    radius_y: int
    offsets: Tuple[Tuple[int, int], ...]

    @classmethod
    def ellipse(cls, radius_x: int = 2, radius_y: int = 2) -> "StructuringElement":
        if radius_x < 0 or radius_y < 0:
            raise ValueError("radii must be >= 0")
        rx, ry = radius_x + 0.5, radius_y + 0.5
        offs = tuple(
            (dx, dy)
            for dy in range(-radius_y, radius_y + 1)
            for dx in range(-radius_x, radius_x + 1)
            if (dx / rx) ** 2 + (dy / ry) ** 2 <= 1.0
        )
        return cls(radius_x, radius_y, offs)

    def footprint(self) -> np.ndarray:
        """Boolean (2*ry+1, 2*rx+1) array with True at each offset."""
        fp = np.zeros((2 * self.radius_y + 1, 2 * self.radius_x + 1), dtype=bool)
        for dx, dy in self.offsets:
            fp[dy + self.radius_y, dx + self.radius_x] = True
        return fp


@dataclass
class ComponentStats:
    """Summary of one 8-connected foreground component."""

    label: int
    area: int
    bbox: Tuple[int, int, int, int]  # (x, y, w, h)
    centroid: Tuple[float, float]  # (cx, cy)


def preprocess(frame: Frame, target_w: int, target_h: int, bgr_input: bool = True) -> Frame:
    """Resize to (target_w, target_h) with bilinear interpolation.

    3-channel input is treated as BGR and flipped to RGB when bgr_input
    is set. Grayscale passes through untouched apart from the resize.
    """
    if target_w <= 0 or target_h <= 0:
        raise ValueError("target dimensions must be positive")
    px = frame.pixels
    if frame.channels == 3 and bgr_input:
        px = px[:, :, ::-1]
    if (frame.height, frame.width) == (target_h, target_w):
        return Frame(np.ascontiguousarray(px), frame.index)
    if frame.channels == 1:
        out = _resize_plane(px, target_w, target_h)
    else:
        out = np.stack(
            [_resize_plane(px[:, :, c], target_w, target_h) for c in range(3)], axis=2
        )
    return Frame(_to_u8(out), frame.index)


def _resize_plane(plane: np.ndarray, tw: int, th: int) -> np.ndarray:
    h, w = plane.shape
    xs = (np.arange(tw) + 0.5) * (w / tw) - 0.5
    ys = (np.arange(th) + 0.5) * (h / th) - 0.5
    x0 = np.clip(np.floor(xs).astype(int), 0, w - 1)
    y0 = np.clip(np.floor(ys).astype(int), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(xs - np.floor(xs), 0.0, 1.0)
    fy = np.clip(ys - np.floor(ys), 0.0, 1.0)
    p = plane.astype(np.float64)
    top = p[np.ix_(y0, x0)] * (1 - fx) + p[np.ix_(y0, x1)] * fx
    bot = p[np.ix_(y1, x0)] * (1 - fx) + p[np.ix_(y1, x1)] * fx
    return top * (1 - fy[:, None]) + bot * fy[:, None]


def _to_u8(values: np.ndarray) -> np.ndarray:
    # round half-up so rounding is direction-stable across platforms
    return np.clip(np.floor(values + 0.5), 0, 255).astype(np.uint8)


def to_grayscale(frame: Frame) -> Frame:
    """Collapse RGB to luma (0.299 R + 0.587 G + 0.114 B), rounded.

    Single-channel frames are returned unchanged.
    """
    if frame.channels == 1:
        return frame
    px = frame.pixels.astype(np.float64)
    luma = LUMA_R * px[:, :, 0] + LUMA_G * px[:, :, 1] + LUMA_B * px[:, :, 2]
    return Frame(_to_u8(luma), frame.index)


def erode(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """True where every se offset lands on foreground; outside = background."""
    out = ndimage.binary_erosion(mask.bits, structure=se.footprint(), border_value=0)
    return BinaryMask(out)


def dilate(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    """True where any se offset lands on foreground; outside = background."""
    out = ndimage.binary_dilation(mask.bits, structure=se.footprint(), border_value=0)
    return BinaryMask(out)


def opening(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    return dilate(erode(mask, se), se)


def closing(mask: BinaryMask, se: StructuringElement) -> BinaryMask:
    return erode(dilate(mask, se), se)


def connected_components(mask: BinaryMask, min_area: int = 25) -> List[ComponentStats]:
    """8-connected components with area >= min_area.

    Labels are assigned 1..n in raster-scan order of each component's
    first pixel.
    """
    if min_area < 1:
        raise ValueError("min_area must be >= 1")
    labels, n = ndimage.label(mask.bits, structure=_CONNECT8)
    if n == 0:
        return []
    flat = labels.ravel()
    uniq, first = np.unique(flat, return_index=True)
    order = [int(lab) for lab in uniq[np.argsort(first)] if lab != 0]
    areas = np.bincount(flat, minlength=n + 1)
    slices = ndimage.find_objects(labels)
    ys, xs = np.nonzero(mask.bits)
    lab_at = labels[ys, xs]
    sum_x = np.bincount(lab_at, weights=xs, minlength=n + 1)
    sum_y = np.bincount(lab_at, weights=ys, minlength=n + 1)

    stats: List[ComponentStats] = []
    for lab in order:
        area = int(areas[lab])
        if area < min_area:
            continue
        sl_y, sl_x = slices[lab - 1]
        bbox = (sl_x.start, sl_y.start, sl_x.stop - sl_x.start, sl_y.stop - sl_y.start)
        centroid = (sum_x[lab] / area, sum_y[lab] / area)
        stats.append(ComponentStats(len(stats) + 1, area, bbox, centroid))
    return stats

"""Seeded synthetic traffic scenes: textured background, shaded
rectangular vehicles moving horizontally with wraparound, plus matching
ground truth, stub score sidecars, detection sidecars, and the true
per-frame vehicle masks.

Density bands tie the congestion level to vehicle count and speed:
higher levels mean more vehicles moving slower, so level 5 is
near-stalled and level 1 is sparse free flow.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy import ndimage

from .imaging import BinaryMask, Frame, _to_u8
from .providers import Detection, DetectionSet, ScoreVector, StubProvider


@dataclass(frozen=True)
class DensityBand:
    level: int
    count_min: int
    count_max: int
    speed_min: float  # pixels/frame
    speed_max: float


def default_bands() -> List[DensityBand]:
    """Five bands at 224x224: counts rise and speeds fall with level."""
    return [
        DensityBand(1, 0, 3, 6.0, 8.0),
        DensityBand(2, 4, 8, 4.0, 6.0),
        DensityBand(3, 9, 16, 2.0, 4.0),
        DensityBand(4, 17, 30, 0.5, 2.0),
        DensityBand(5, 31, 50, 0.0, 0.5),
    ]


@dataclass
class VehicleTrack:
    """One rectangle's trajectory: x(t) = (x0 + speed*t) mod width."""

    x0: float
    y: int
    width: int
    height: int
    speed: float
    shade: int

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("vehicle must have positive area")


@dataclass
class SceneSpec:
    width: int = 224
    height: int = 224
    level: int = 1
    seed: int = 0
    frames: int = 100
    vehicle_size: Tuple[Tuple[int, int], Tuple[int, int]] = ((12, 28), (8, 16))
    noise_sigma: float = 2.0
    score_noise: float = 0.0
    vehicles: Optional[List[VehicleTrack]] = None  # overrides the band draw

    def validate(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("scene dimensions must be positive")
        if self.frames < 1:
            raise ValueError("frames must be >= 1")
        if not 1 <= self.level <= 5:
            raise ValueError("level must be in 1..5")
        (wmin, wmax), (hmin, hmax) = self.vehicle_size
        if wmin < 1 or hmin < 1 or wmax < wmin or hmax < hmin:
            raise ValueError("vehicle size ranges must be positive and ordered")
        if self.noise_sigma < 0 or self.score_noise < 0:
            raise ValueError("noise levels must be >= 0")


@dataclass
class SyntheticScene:
    spec: SceneSpec
    frames: List[Frame]
    truth: List[int]  # per-frame level
    scores: List[ScoreVector]
    detections: List[DetectionSet]
    vehicle_masks: List[BinaryMask]
    vehicles: List[VehicleTrack] = field(default_factory=list)

    def segment_truth(self, segment_len: int = 100) -> List[int]:
        return [self.truth[i] for i in range(0, len(self.truth), segment_len)]


def _background(rng: np.random.Generator, width: int, height: int) -> np.ndarray:
    # low-amplitude smoothed texture so the subtractor never sees a
    # perfectly flat field
    tex = rng.integers(-18, 19, size=(height, width)).astype(np.float64)
    return np.clip(96.0 + ndimage.uniform_filter(tex, size=5), 0.0, 255.0)


def _draw_vehicles(rng: np.random.Generator, spec: SceneSpec) -> List[VehicleTrack]:
    band = default_bands()[spec.level - 1]
    (wmin, wmax), (hmin, hmax) = spec.vehicle_size
    n = int(rng.integers(band.count_min, band.count_max + 1))
    out = []
    for _ in range(n):
        w = int(rng.integers(wmin, wmax + 1))
        h = int(rng.integers(hmin, min(hmax, spec.height) + 1))
        out.append(
            VehicleTrack(
                x0=float(rng.uniform(0, spec.width)),
                y=int(rng.integers(0, max(spec.height - h, 0) + 1)),
                width=w,
                height=h,
                speed=float(rng.uniform(band.speed_min, band.speed_max)),
                shade=int(rng.integers(25, 66)),
            )
        )
    return out


def generate(spec: SceneSpec) -> SyntheticScene:
    """Render a full scene; byte-identical for identical specs."""
    spec.validate()
    rng = np.random.default_rng([spec.seed, 101])
    bg = _background(rng, spec.width, spec.height)
    vehicles = spec.vehicles if spec.vehicles is not None else _draw_vehicles(rng, spec)
    for veh in vehicles:
        if veh.width <= 0 or veh.height <= 0:
            raise ValueError("vehicle must have positive area")

    frames: List[Frame] = []
    masks: List[BinaryMask] = []
    detections: List[DetectionSet] = []
    for t in range(spec.frames):
        img = bg.copy()
        bits = np.zeros((spec.height, spec.width), dtype=bool)
        dets = []
        for veh in vehicles:
            x = int(np.floor(veh.x0 + veh.speed * t + 0.5)) % spec.width
            cols = np.arange(x, x + veh.width) % spec.width
            rows = np.arange(veh.y, veh.y + veh.height)
            img[np.ix_(rows, cols)] = veh.shade
            bits[np.ix_(rows, cols)] = True
            w_vis = min(veh.width, spec.width - x)
            dets.append(Detection(float(x), float(veh.y), float(w_vis), float(veh.height), 0.9))
        if spec.noise_sigma > 0:
            noise_rng = np.random.default_rng([spec.seed, 102, t])
            img = img + spec.noise_sigma * noise_rng.standard_normal(img.shape)
        frames.append(Frame(_to_u8(img), t))
        masks.append(BinaryMask(bits))
        detections.append(DetectionSet(t, dets))

    truth = [spec.level] * spec.frames
    stub = StubProvider(truth, seed=spec.seed, noise=spec.score_noise,
                        width=spec.width, height=spec.height)
    return SyntheticScene(
        spec=spec,
        frames=frames,
        truth=truth,
        scores=stub.scores(),
        detections=detections,
        vehicle_masks=masks,
        vehicles=list(vehicles),
    )

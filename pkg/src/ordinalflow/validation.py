"""Input validation helpers shared by the estimator and the pipeline."""
from __future__ import annotations

from typing import Sequence

from .errors import AlignmentError
from .imaging import Frame


def check_frames(frames: Sequence[Frame]) -> Sequence[Frame]:
    if len(frames) == 0:
        raise AlignmentError("no frames to process")
    for t, fr in enumerate(frames):
        if not isinstance(fr, Frame):
            raise TypeError(f"expected Frame at position {t}, got {type(fr).__name__}")
        if fr.index != t:
            raise AlignmentError(f"frame at position {t} has index {fr.index}")
    return frames


def check_aligned(frames: Sequence, other: Sequence | None, name: str) -> None:
    if other is not None and len(other) != len(frames):
        raise AlignmentError(f"{len(frames)} frames but {len(other)} {name}")


def check_levels(levels: Sequence[int]) -> list:
    out = [int(v) for v in levels]
    if any(v < 1 or v > 5 for v in out):
        raise ValueError("levels must be in 1..5")
    return out

"""Frame container I/O: binary PGM/PPM files, directories of numbered
frames, and the packed "ORDV1" container (magic + LE u32 width, height,
channels, frame_count + raw row-major frames). All formats are
dependency-free and bit-exact.
"""
from __future__ import annotations

import struct
from pathlib import Path
from typing import List

import numpy as np

from .errors import ParseError
from .imaging import Frame

MAGIC = b"ORDV1"


def write_image(path, frame: Frame) -> None:
    """Write a frame as binary PGM (grayscale) or PPM (RGB)."""
    kind = b"P5" if frame.channels == 1 else b"P6"
    with open(path, "wb") as fh:
        fh.write(kind + b"\n%d %d\n255\n" % (frame.width, frame.height))
        fh.write(frame.pixels.tobytes())


def read_image(path, index: int = 0) -> Frame:
    """Read a binary PGM/PPM file with maxval <= 255."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        magic, rest = data[:2], data[2:]
        if magic not in (b"P5", b"P6"):
            raise ValueError(f"unsupported netpbm magic {magic!r}")
        tokens = []
        pos = 0
        while len(tokens) < 3:
            while pos < len(rest) and rest[pos : pos + 1].isspace():
                pos += 1
            if rest[pos : pos + 1] == b"#":
                while pos < len(rest) and rest[pos : pos + 1] != b"\n":
                    pos += 1
                continue
            start = pos
            while pos < len(rest) and not rest[pos : pos + 1].isspace():
                pos += 1
            tokens.append(rest[start:pos])
        pos += 1  # single whitespace after maxval
        width, height, maxval = (int(t) for t in tokens)
        if maxval != 255:
            raise ValueError(f"unsupported maxval {maxval}")
        channels = 1 if magic == b"P5" else 3
        raw = rest[pos : pos + width * height * channels]
        if len(raw) != width * height * channels:
            raise ValueError("truncated pixel data")
        px = np.frombuffer(raw, dtype=np.uint8)
        shape = (height, width) if channels == 1 else (height, width, 3)
        return Frame(px.reshape(shape).copy(), index)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"{path}: {exc}") from exc


def write_frames_dir(dirpath, frames: List[Frame]) -> None:
    d = Path(dirpath)
    d.mkdir(parents=True, exist_ok=True)
    for i, fr in enumerate(frames):
        ext = "pgm" if fr.channels == 1 else "ppm"
        write_image(d / f"{i:06d}.{ext}", fr)


def read_frames_dir(dirpath) -> List[Frame]:
    d = Path(dirpath)
    paths = sorted(p for p in d.iterdir() if p.suffix in (".pgm", ".ppm"))
    if not paths:
        raise ParseError(f"{dirpath}: no .pgm/.ppm frames found")
    return [read_image(p, i) for i, p in enumerate(paths)]


def write_packed(path, frames: List[Frame]) -> None:
    if not frames:
        raise ValueError("cannot write an empty container")
    w, h, c = frames[0].width, frames[0].height, frames[0].channels
    for fr in frames:
        if (fr.width, fr.height, fr.channels) != (w, h, c):
            raise ValueError("all frames in a container must share shape")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIII", w, h, c, len(frames)))
        for fr in frames:
            fh.write(fr.pixels.tobytes())


def read_packed(path) -> List[Frame]:
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:5] != MAGIC:
        raise ParseError(f"{path}: bad magic, expected {MAGIC!r}")
    if len(data) < 5 + 16:
        raise ParseError(f"{path}: truncated header")
    w, h, c, count = struct.unpack("<IIII", data[5:21])
    frame_bytes = w * h * c
    if len(data) != 21 + frame_bytes * count:
        raise ParseError(f"{path}: size mismatch for {count} frames of {frame_bytes} bytes")
    shape = (h, w) if c == 1 else (h, w, c)
    out = []
    for i in range(count):
        raw = data[21 + i * frame_bytes : 21 + (i + 1) * frame_bytes]
        out.append(Frame(np.frombuffer(raw, dtype=np.uint8).reshape(shape).copy(), i))
    return out


def load_frames(path) -> List[Frame]:
    """Dispatch: directory of PGM/PPM frames, or a packed ORDV1 file."""
    p = Path(path)
    if p.is_dir():
        return read_frames_dir(p)
    if not p.exists():
        raise ParseError(f"{path}: no such file or directory")
    return read_packed(p)

"""Little-endian binary containers for RF data, delay profiles and beamformed frames.

``RFV1``  raw channel data, one ``D x W_i`` int16 matrix per angle.
``DPV1``  delay profiles, one ``2D x F`` uint16 matrix per (angle, offset).
``BFV1``  beamformed frames, int32 per angle plus an optional int64 compound.
"""

from __future__ import annotations

import hashlib
import struct
from pathlib import Path

import numpy as np

from .config import ProbeConfig
from .delays import DelayProfile, dependent_ranges, tx_shift
from .engine import BeamformedFrame
from .rf_synth import ChannelFrame


class FormatError(ValueError):
    """A file does not follow the expected binary layout."""


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise FormatError(f"{self.path}: truncated (need {n} bytes at offset {self.pos})")
        out = self.data[self.pos : self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt: str):
        fmt = "<" + fmt
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype: str, count: int) -> np.ndarray:
        dt = np.dtype(dtype)
        return np.frombuffer(self.take(dt.itemsize * count), dtype=dt).copy()

    def magic(self, expected: bytes):
        got = self.take(4)
        if got != expected:
            raise FormatError(f"{self.path}: bad magic {got!r}, expected {expected!r}")

    def finish(self):
        if self.pos != len(self.data):
            raise FormatError(f"{self.path}: {len(self.data) - self.pos} trailing bytes")


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_rf(path: str | Path, frames: list[ChannelFrame]) -> None:
    if not frames:
        raise ValueError("no frames to write")
    probe = frames[0].probe
    D, W = frames[0].samples.shape
    parts = [
        b"RFV1",
        struct.pack("<III", W, D, len(frames)),
        struct.pack(
            "<ffff", probe.sample_rate, probe.sound_speed, probe.pitch, probe.center_frequency
        ),
        np.asarray([f.angle for f in frames], dtype="<f4").tobytes(),
    ]
    for f in frames:
        if f.samples.shape != (D, W):
            raise ValueError("all frames must share one shape")
        parts.append(np.ascontiguousarray(f.samples, dtype="<i2").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_rf(path: str | Path) -> list[ChannelFrame]:
    r = _Reader(Path(path).read_bytes(), path)
    r.magic(b"RFV1")
    W, D, n = r.unpack("III")
    fs, c, d, fc = (float(v) for v in r.unpack("ffff"))
    angles = r.array("<f4", n)
    try:
        probe = ProbeConfig(num_elements=W, pitch=d, sample_rate=fs, sound_speed=c, center_frequency=fc)
    except ValueError as exc:
        raise FormatError(f"{path}: invalid probe header: {exc}") from exc
    frames = [
        ChannelFrame(samples=r.array("<i2", D * W).reshape(D, W).astype(np.int16), angle=float(a), probe=probe)
        for a in angles
    ]
    r.finish()
    return frames


def write_profiles(path: str | Path, profiles: list[list[DelayProfile]]) -> None:
    """``profiles[angle][offset]``, all sharing one shape."""
    n_angles, R = len(profiles), len(profiles[0])
    rows, F = profiles[0][0].indices.shape
    mdr = max(p.mdr for group in profiles for p in group)
    parts = [
        b"DPV1",
        struct.pack("<IIII", rows, F, n_angles, R),
        np.asarray([g[0].angle for g in profiles], dtype="<f4").tobytes(),
        np.asarray([p.lateral_offset for p in profiles[0]], dtype="<f4").tobytes(),
        struct.pack("<I", mdr),
    ]
    for group in profiles:
        if len(group) != R:
            raise ValueError("every angle needs the same number of offset profiles")
        for p in group:
            if p.indices.shape != (rows, F):
                raise ValueError("all profiles must share one shape")
            parts.append(np.ascontiguousarray(p.indices, dtype="<u2").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_profiles(path: str | Path, probe: ProbeConfig | None = None) -> list[list[DelayProfile]]:
    """Load ``profiles[angle][offset]``. Pass ``probe`` to restore the shift constants."""
    r = _Reader(Path(path).read_bytes(), path)
    r.magic(b"DPV1")
    rows, F, n_angles, R = r.unpack("IIII")
    angles = r.array("<f4", n_angles)
    offsets = r.array("<f4", R)
    (mdr_global,) = r.unpack("I")
    out = []
    for a in angles:
        group = []
        for off in offsets:
            idx = r.array("<u2", rows * F).reshape(rows, F).astype(np.uint16)
            dr = dependent_ranges(idx)
            group.append(
                DelayProfile(
                    indices=idx,
                    per_row_dr=dr,
                    mdr=int(dr.max()) if dr.size else 0,
                    angle=float(a),
                    lateral_offset=float(off),
                    tx_shift=tx_shift(float(a), probe) if probe is not None else float("nan"),
                )
            )
        out.append(group)
    r.finish()
    found = max((p.mdr for g in out for p in g), default=0)
    if found != mdr_global:
        raise FormatError(f"{path}: header MDR {mdr_global} but tables imply {found}")
    return out


def write_beamformed(path: str | Path, frames: list[BeamformedFrame], compounded: np.ndarray | None = None) -> None:
    rows, W_o = frames[0].shape
    parts = [b"BFV1", struct.pack("<III", rows, W_o, len(frames))]
    for f in frames:
        if f.shape != (rows, W_o):
            raise ValueError("all frames must share one shape")
        parts.append(np.ascontiguousarray(f.values, dtype="<i4").tobytes())
    if compounded is None:
        parts.append(b"\x00")
    else:
        parts.append(b"\x01")
        parts.append(np.ascontiguousarray(compounded, dtype="<i8").tobytes())
    Path(path).write_bytes(b"".join(parts))


def read_beamformed(path: str | Path) -> tuple[list[np.ndarray], np.ndarray | None]:
    """Per-angle int32 frames and the int64 compound (or None)."""
    r = _Reader(Path(path).read_bytes(), path)
    r.magic(b"BFV1")
    rows, W_o, n = r.unpack("III")
    frames = [r.array("<i4", rows * W_o).reshape(rows, W_o).astype(np.int32) for _ in range(n)]
    (marker,) = r.unpack("B")
    compounded = None
    if marker == 1:
        compounded = r.array("<i8", rows * W_o).reshape(rows, W_o).astype(np.int64)
    elif marker != 0:
        raise FormatError(f"{path}: unknown compound marker {marker}")
    r.finish()
    return frames, compounded


def write_pgm(path: str | Path, image: np.ndarray) -> None:
    """8-bit binary PGM of an image scaled to ``[0, 1]``."""
    img = np.clip(np.asarray(image, dtype=float), 0.0, 1.0)
    h, w = img.shape
    data = np.rint(img * 255).astype(np.uint8)
    Path(path).write_bytes(f"P5\n{w} {h}\n255\n".encode("ascii") + data.tobytes())


def read_pgm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    tokens, pos = [], 0
    while len(tokens) < 4:
        while data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    if tokens[0] != b"P5":
        raise FormatError(f"{path}: not a binary PGM")
    w, h, maxval = (int(t) for t in tokens[1:])
    if maxval != 255:
        raise FormatError(f"{path}: only 8-bit PGM is supported")
    pixels = np.frombuffer(data[pos + 1 : pos + 1 + w * h], dtype=np.uint8)
    if pixels.size != w * h:
        raise FormatError(f"{path}: truncated pixel data")
    return pixels.reshape(h, w)

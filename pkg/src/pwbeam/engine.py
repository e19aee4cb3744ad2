"""Parallel delay-and-sum engine built on shared delay profiles.

Every output row is formed by fetching ``F`` full RF rows (one per profile
tap), stacking them, and summing along diagonals: tap ``k`` of A-line ``j``
reads element ``j + k - F/2``. The ``F`` taps are split into ``F / F_sub``
sequential passes of ``F_sub`` taps whose partial rows are summed at the end.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass

import numpy as np

from .config import EngineParams, ProbeConfig
from .delays import SENTINEL, DelayProfile, global_mdr, max_transmit_delay, removal_counts
from .rf_synth import ChannelFrame

ACC_DTYPE = np.int32
COMPOUND_DTYPE = np.int64


class ProfileMismatch(ValueError):
    """Profiles, frame and engine parameters do not describe the same setup."""


class MDRViolation(RuntimeError):
    """A fast-time row was requested after the cyclic buffer overwrote it."""


@dataclass(frozen=True, eq=False)
class BeamformedFrame:
    """Beamformed RF, ``2D x (W_i * R)``, columns ordered by lateral position."""

    values: np.ndarray
    angle: float

    @property
    def shape(self):
        return self.values.shape


def interpolate_2x(samples: np.ndarray) -> np.ndarray:
    """Linear 2x upsampling along fast time.

    Odd rows are the floor of the mean of their neighbours; the final odd row
    repeats the last input row.
    """
    samples = np.asarray(samples)
    if samples.ndim == 1:
        return interpolate_2x(samples[:, None])[:, 0]
    D = samples.shape[0]
    if D < 2:
        raise ValueError("need at least two fast-time samples to interpolate")
    wide = samples.astype(np.int32)
    out = np.empty((2 * D,) + samples.shape[1:], dtype=samples.dtype)
    out[0::2] = samples
    out[1:-1:2] = ((wide[:-1] + wide[1:]) >> 1).astype(samples.dtype)
    out[-1] = samples[-1]
    return out


def compensate_tx_delay(interpolated: np.ndarray, theta: float, probe: ProbeConfig) -> np.ndarray:
    """Drop each channel's leading removal samples and zero-fill the tail."""
    counts = removal_counts(theta, probe)
    n_rows, W = interpolated.shape
    if W != probe.num_elements:
        raise ProfileMismatch(f"frame has {W} channels, probe has {probe.num_elements}")
    out = np.zeros_like(interpolated)
    for n, shift in enumerate(counts):
        if shift < n_rows:
            out[: n_rows - shift, n] = interpolated[shift:, n]
    return out


def tx_compensation_stream(rows: Iterable[np.ndarray], counts: np.ndarray, mtd: int) -> Iterator[np.ndarray]:
    """Row-streaming model of the per-channel transmit-delay FIFOs.

    Channel ``n`` starts writing once the input sample index reaches its
    removal count; all channels are read together once it reaches ``mtd``.
    After the input ends the remaining rows drain with zeros for channels
    that have run dry. Yields the same rows as :func:`compensate_tx_delay`.
    """
    counts = np.asarray(counts, dtype=np.int64)
    if counts.size and counts.max() > mtd:
        raise ValueError("a removal count exceeds the maximum transmit delay")
    depth = mtd + 1
    store = None
    written = np.zeros(counts.size, dtype=np.int64)
    cols = np.arange(counts.size)
    read = 0
    n_in = 0
    for N, row in enumerate(rows):
        if store is None:
            store = np.zeros((depth, counts.size), dtype=row.dtype)
        wr = N >= counts
        store[written[wr] % depth, cols[wr]] = row[wr]
        written[wr] += 1
        n_in = N + 1
        if N >= mtd:
            yield store[read % depth].copy()
            read += 1
    while read < n_in:
        out = store[read % depth].copy()
        out[written <= read] = 0
        yield out
        read += 1


def _check_inputs(n_rows: int, W: int, profiles: Sequence[DelayProfile], params: EngineParams):
    if W != params.num_elements:
        raise ProfileMismatch(f"frame has {W} channels, engine expects {params.num_elements}")
    if len(profiles) != params.R:
        raise ProfileMismatch(f"got {len(profiles)} offset profiles for R = {params.R}")
    for p in profiles:
        if p.F != params.F:
            raise ProfileMismatch(f"profile has {p.F} taps, engine expects F = {params.F}")
        if p.num_rows != n_rows:
            raise ProfileMismatch(f"profile has {p.num_rows} rows, frame has {n_rows}")
        if abs(p.angle - profiles[0].angle) > 1e-9:
            raise ProfileMismatch("offset profiles of one frame must share the steering angle")


def _interleave(per_offset: list[np.ndarray]) -> np.ndarray:
    R = len(per_offset)
    n_rows, W = per_offset[0].shape
    out = np.empty((n_rows, W * R), dtype=ACC_DTYPE)
    for rho, part in enumerate(per_offset):
        out[:, rho::R] = part
    return out


def beamform_frame(aligned: np.ndarray, profiles: Sequence[DelayProfile], params: EngineParams) -> BeamformedFrame:
    """Beamform one transmit-compensated frame with all ``R`` offset profiles."""
    n_rows, W = aligned.shape
    _check_inputs(n_rows, W, profiles, params)
    F, half = params.F, params.F // 2
    # Sentinel taps land on the trailing all-zero row; edge columns on the zero pad.
    padded = np.zeros((n_rows + 1, W + F), dtype=aligned.dtype)
    padded[:n_rows, half : half + W] = aligned

    per_offset = []
    for prof in profiles:
        valid = prof.valid
        rows = np.where(valid, prof.indices, n_rows).astype(np.intp)
        # rows outside [first, last] valid of a tap only ever read the zero row
        any_valid = valid.any(axis=0)
        first = np.argmax(valid, axis=0)
        last = n_rows - np.argmax(valid[::-1], axis=0)
        acc = np.zeros((n_rows, W), dtype=ACC_DTYPE)
        for p in range(params.passes):
            partial = np.zeros((n_rows, W), dtype=ACC_DTYPE)
            for k in range(p * params.F_sub, (p + 1) * params.F_sub):
                if not any_valid[k]:
                    continue
                lo, hi = first[k], last[k]
                np.add(partial[lo:hi], padded[:, k : k + W][rows[lo:hi, k]], out=partial[lo:hi])
            acc += partial
        per_offset.append(acc)
    return BeamformedFrame(values=_interleave(per_offset), angle=profiles[0].angle)


class CyclicBuffer:
    """Fast-time row store whose addresses wrap modulo its depth.

    Logical row ``q`` stays readable while ``cursor - q <= depth``.
    """

    def __init__(self, depth: int, width: int, dtype=np.int16):
        if depth < 1:
            raise ValueError("buffer depth must be >= 1")
        self.depth = depth
        self.store = np.zeros((depth, width), dtype=dtype)
        self.cursor = 0

    def write(self, row: np.ndarray) -> None:
        self.store[self.cursor % self.depth] = row
        self.cursor += 1

    def read(self, q) -> np.ndarray:
        q = np.asarray(q, dtype=np.int64)
        if np.any(q >= self.cursor):
            raise MDRViolation(f"row {int(q.max())} read before it was written (cursor {self.cursor})")
        if np.any(self.cursor - q > self.depth):
            raise MDRViolation(
                f"row {int(q.min())} already overwritten (cursor {self.cursor}, depth {self.depth})"
            )
        return self.store[q % self.depth]


def _diagonal_sum(stacked: np.ndarray, taps: np.ndarray, W: int, F: int) -> np.ndarray:
    half = F // 2
    padded = np.zeros((stacked.shape[0], W + F), dtype=ACC_DTYPE)
    padded[:, half : half + W] = stacked
    out = np.zeros(W, dtype=ACC_DTYPE)
    for i, k in enumerate(taps):
        out += padded[i, k : k + W]
    return out


def beamform_streaming(
    rows: Iterable[np.ndarray],
    profiles: Sequence[DelayProfile],
    params: EngineParams,
    mdr: int | None = None,
) -> BeamformedFrame:
    """Beamform aligned rows as they arrive, buffering only ``mdr`` of them.

    Row ``r`` is emitted as soon as every index it needs has been written.
    The ``F_sub`` replicated buffers hold identical data, so one store serves
    all read views.
    """
    if not profiles:
        raise ProfileMismatch("no profiles given")
    n_rows = profiles[0].num_rows
    W, F = params.num_elements, params.F
    _check_inputs(n_rows, W, profiles, params)
    depth = global_mdr(profiles) if mdr is None else mdr
    buf = CyclicBuffer(max(depth, 1), W)

    need = np.zeros(n_rows, dtype=np.int64)
    for prof in profiles:
        hi = np.where(prof.valid, prof.indices.astype(np.int64) + 1, 0).max(axis=1)
        need = np.maximum(need, hi)
    need = np.maximum.accumulate(need)

    out = [np.zeros((n_rows, W), dtype=ACC_DTYPE) for _ in profiles]
    next_row = 0

    def emit(r):
        for prof, acc in zip(profiles, out):
            idx = prof.indices[r]
            for p in range(params.passes):
                taps = np.arange(p * params.F_sub, (p + 1) * params.F_sub)
                taps = taps[idx[taps] != SENTINEL]
                if taps.size:
                    acc[r] += _diagonal_sum(buf.read(idx[taps]), taps, W, F)

    for row in rows:
        if buf.cursor >= n_rows:
            raise ProfileMismatch(f"stream has more than {n_rows} rows")
        buf.write(row)
        while next_row < n_rows and need[next_row] <= buf.cursor:
            emit(next_row)
            next_row += 1
    if buf.cursor != n_rows:
        raise ProfileMismatch(f"stream ended after {buf.cursor} of {n_rows} rows")
    while next_row < n_rows:
        emit(next_row)
        next_row += 1
    return BeamformedFrame(values=_interleave(out), angle=profiles[0].angle)


def beamform_angle(
    frame: ChannelFrame,
    profiles: Sequence[DelayProfile],
    params: EngineParams,
    mode: str = "engine",
) -> BeamformedFrame:
    """Interpolate, compensate and beamform one raw frame."""
    if abs(frame.angle - profiles[0].angle) > 1e-6:
        raise ProfileMismatch(f"frame angle {frame.angle} does not match profile angle {profiles[0].angle}")
    interp = interpolate_2x(frame.samples)
    if mode == "engine":
        return beamform_frame(compensate_tx_delay(interp, frame.angle, frame.probe), profiles, params)
    if mode == "streaming":
        counts = removal_counts(frame.angle, frame.probe)
        mtd = max_transmit_delay([frame.angle], frame.probe)
        stream = tx_compensation_stream(iter(interp), counts, mtd)
        return beamform_streaming(stream, profiles, params)
    raise ValueError(f"unknown mode {mode!r}")


def compound(frames: Sequence[BeamformedFrame]) -> np.ndarray:
    """Coherent sum of per-angle frames in 64-bit accumulators."""
    if not frames:
        raise ValueError("nothing to compound")
    total = np.zeros(frames[0].shape, dtype=COMPOUND_DTYPE)
    for f in frames:
        total += f.values
    return total


def beamform_compound(
    frames: Sequence[ChannelFrame],
    profiles: Sequence[Sequence[DelayProfile]],
    params: EngineParams,
    mode: str = "engine",
) -> tuple[list[BeamformedFrame], np.ndarray]:
    """Beamform every angle and sum them. ``profiles[i]`` belongs to ``frames[i]``."""
    if len(frames) != len(profiles):
        raise ProfileMismatch(f"{len(frames)} frames but {len(profiles)} profile sets")
    for fr, prof in zip(frames, profiles):
        if not math.isclose(fr.angle, prof[0].angle, abs_tol=1e-6):
            raise ProfileMismatch(f"angle mismatch: frame {fr.angle} rad vs profile {prof[0].angle} rad")
    beamformed = [beamform_angle(fr, prof, params, mode) for fr, prof in zip(frames, profiles)]
    return beamformed, compound(beamformed)

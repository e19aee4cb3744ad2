"""Plane-wave delay model and compressed delay profiles.

All delays are in seconds and all lengths in meters. Element ``n`` (0-based
here) sits at ``x = n * pitch``. Sample indices refer to the 2x-interpolated
fast-time grid unless noted otherwise.

Compressing the receive delay to depend on ``dx = x_n - x`` instead of
``(x_n, x)``, and moving the ``x_n * sin(theta) / c`` part of the transmit
delay into a per-channel sample removal, leaves a ``depth x F`` table that
every A-line at a given depth can share.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import AcqConfig, ConfigError, EngineParams, ProbeConfig

INTERP = 2
SENTINEL = 0xFFFF
MAX_INDEX = 0xFFFE


def round_half_even(x):
    """Round to nearest integer, ties to even. Returns int64 (or a Python int for scalars)."""
    r = np.rint(x)
    if np.ndim(r) == 0:
        return int(r)
    return r.astype(np.int64)


def tx_delay_traditional(theta, x, z, c):
    """Time for a plane wave steered at ``theta`` to reach ``(x, z)``."""
    return (z * np.cos(theta) + x * np.sin(theta)) / c


def rx_delay_traditional(x_n, x, z, c):
    """Time for an echo at ``(x, z)`` to reach the element at ``x_n``."""
    return np.sqrt(z**2 + (x_n - x) ** 2) / c


def rx_delay_compressed(dx, z, c):
    return np.sqrt(z**2 + dx**2) / c


def total_delay_compressed(theta, dx, z, c):
    """Round-trip delay as a function of the relative lateral distance only.

    Equals ``tx_delay_traditional + rx_delay_traditional - x_n * sin(theta) / c``.
    """
    return (z * np.cos(theta) - dx * np.sin(theta)) / c + np.sqrt(z**2 + dx**2) / c


def delay_slope(theta, dx, z, c):
    """Derivative of the compressed total delay with respect to ``dx``."""
    dx = np.asarray(dx, dtype=float)
    z = np.asarray(z, dtype=float)
    r = np.sqrt(dx**2 + z**2)
    if np.any(r == 0):
        raise ZeroDivisionError("delay slope is singular at dx = z = 0")
    out = dx / (c * r) - np.sin(theta) / c
    return float(out) if out.ndim == 0 else out


def tx_shift(theta: float, probe: ProbeConfig) -> float:
    """Per-angle alignment constant, ``min_m x_m sin(theta) / c``.

    Zero for non-negative angles; for negative angles it makes every removal
    count non-negative.
    """
    last = (probe.num_elements - 1) * probe.pitch
    return min(0.0, last * math.sin(theta) / probe.sound_speed)


def removal_counts(theta: float, probe: ProbeConfig, interp: int = INTERP) -> np.ndarray:
    """Leading samples dropped from every channel, on the interpolated grid."""
    shift = tx_shift(theta, probe)
    x_n = probe.element_positions
    counts = round_half_even((x_n * math.sin(theta) / probe.sound_speed - shift) * (probe.sample_rate * interp))
    return np.maximum(counts, 0)


def tx_removal_samples(theta: float, n: int, probe: ProbeConfig, interp: int = INTERP) -> tuple[int, float]:
    """Removal count for element ``n`` (1-based) and the angle's shift constant."""
    if not 1 <= n <= probe.num_elements:
        raise ValueError(f"element index {n} outside [1, {probe.num_elements}]")
    return int(removal_counts(theta, probe, interp)[n - 1]), tx_shift(theta, probe)


def max_transmit_delay(angles, probe: ProbeConfig, interp: int = INTERP) -> int:
    """Largest removal count over all channels and angles (MTD)."""
    angles = list(angles)
    if not angles:
        raise ValueError("need at least one angle")
    return max(int(removal_counts(a, probe, interp).max()) for a in angles)


def effective_subaperture(z, params: EngineParams, probe: ProbeConfig):
    """Fixed F-number aperture size at depth ``z``, capped at ``F``.

    Returns 0 at the surface. ``f_number = inf`` keeps the full aperture.
    """
    z = np.asarray(z, dtype=float)
    if math.isinf(params.f_number):
        out = np.full(z.shape, params.F, dtype=np.int64)
    else:
        span = params.f_number * probe.pitch
        # tiny slack so exact multiples of 2*span are not lost to round-off
        out = 2 * np.floor(z / (2 * span) + 1e-9).astype(np.int64)
        out = np.minimum(out, params.F)
        out = np.where(z > span, np.maximum(out, 2), out)
    return int(out) if out.ndim == 0 else out


def depth_grid(probe: ProbeConfig, acq: AcqConfig) -> np.ndarray:
    """Depth of every output row: one row per interpolated fast-time sample."""
    rows = np.arange(INTERP * acq.depth_samples)
    c = probe.sound_speed
    return rows * c / (2 * probe.sample_rate * INTERP) + acq.start_time * c / 2


def aperture_mask(rel, f_eff):
    """Receive elements kept by the F-number rule.

    ``rel`` is the element-to-pixel distance in pitch units and ``f_eff`` the
    effective subaperture per row; both broadcast.
    """
    return (f_eff > 0) & (np.abs(rel) <= f_eff / 2)


@dataclass(frozen=True, eq=False)
class DelayProfile:
    """Quantized delay table for one steering angle and one lateral offset.

    ``indices[r, k]`` is the sample index (interpolated, transmit-compensated
    fast time) feeding tap ``k`` of output row ``r``, or ``SENTINEL``.
    """

    indices: np.ndarray
    per_row_dr: np.ndarray
    mdr: int
    angle: float
    lateral_offset: float
    tx_shift: float

    @property
    def num_rows(self) -> int:
        return self.indices.shape[0]

    @property
    def F(self) -> int:
        return self.indices.shape[1]

    @property
    def valid(self) -> np.ndarray:
        return self.indices != SENTINEL

    def row_span(self, r: int) -> tuple[int, int] | None:
        """(min, max) valid index of row ``r``, or None for an all-sentinel row."""
        row = self.indices[r]
        row = row[row != SENTINEL]
        if row.size == 0:
            return None
        return int(row.min()), int(row.max())


def dependent_ranges(indices: np.ndarray) -> np.ndarray:
    valid = indices != SENTINEL
    idx = indices.astype(np.int64)
    hi = np.where(valid, idx, -1).max(axis=1)
    lo = np.where(valid, idx, np.iinfo(np.int64).max).min(axis=1)
    return np.where(valid.any(axis=1), hi - lo + 1, 0)


def profile_delays(theta: float, lateral_offset: float, probe: ProbeConfig, acq: AcqConfig, params: EngineParams):
    """Unquantized delays behind a profile.

    Returns ``(delays, mask)`` where ``delays[r, k]`` is the compressed total
    delay plus the angle's shift, relative to the start of acquisition, and
    ``mask`` marks the taps kept by the F-number rule.
    """
    F = params.F
    z = depth_grid(probe, acq)[:, None]
    frac = lateral_offset / probe.pitch
    rel = (np.arange(F) - F // 2) - frac
    dx = rel * probe.pitch
    shift = tx_shift(theta, probe)
    tau = total_delay_compressed(theta, dx[None, :], z, probe.sound_speed) + shift - acq.start_time
    f_eff = effective_subaperture(z[:, 0], params, probe)
    mask = aperture_mask(rel[None, :], f_eff[:, None])
    return tau, mask


def build_delay_profile(
    theta: float,
    lateral_offset: float,
    probe: ProbeConfig,
    acq: AcqConfig,
    params: EngineParams,
) -> DelayProfile:
    """Build the quantized ``2D x F`` delay table for one angle and offset.

    Tap ``k`` of A-line ``j`` reads element ``j + k - F/2``; the pixel sits at
    ``j * pitch + lateral_offset``.
    """
    if params.num_elements != probe.num_elements:
        raise ConfigError("engine and probe disagree on the number of elements")
    if not 0 <= lateral_offset < probe.pitch:
        raise ValueError("lateral_offset must lie in [0, pitch)")
    n_rows = INTERP * acq.depth_samples
    if n_rows - 1 > MAX_INDEX:
        raise ConfigError(f"{n_rows} interpolated rows overflow 16-bit delay indices")

    tau, mask = profile_delays(theta, lateral_offset, probe, acq, params)
    idx = round_half_even(tau * (probe.sample_rate * INTERP))
    valid = mask & (idx >= 0) & (idx < n_rows)
    indices = np.where(valid, idx, SENTINEL).astype(np.uint16)
    dr = dependent_ranges(indices)
    return DelayProfile(
        indices=indices,
        per_row_dr=dr,
        mdr=int(dr.max()),
        angle=float(theta),
        lateral_offset=float(lateral_offset),
        tx_shift=tx_shift(theta, probe),
    )


def build_profiles(probe: ProbeConfig, acq: AcqConfig, params: EngineParams) -> list[list[DelayProfile]]:
    """Profiles for every configured angle, each with one entry per offset."""
    offsets = params.lateral_offsets(probe.pitch)
    return [[build_delay_profile(a, off, probe, acq, params) for off in offsets] for a in acq.angles]


def global_mdr(profiles) -> int:
    """Largest dependent range over a (nested) collection of profiles."""
    if isinstance(profiles, DelayProfile):
        return profiles.mdr
    return max(global_mdr(p) for p in profiles)

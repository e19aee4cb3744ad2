"""Naive per-pixel delay-and-sum, used as the oracle for the engine.

Delays are computed from the absolute pixel and element positions for every
(pixel, element) pair; nothing is shared between A-lines. The quantized mode
reproduces the engine's number handling (2x interpolation with floor
halving, ties-to-even index rounding, per-channel sample removal, F-number
masking, zero for out-of-range taps) one sample at a time, so the two must
agree bit for bit. The continuous mode interpolates the raw trace at the
exact fractional delay instead.
"""

from __future__ import annotations

import math

import numpy as np

from .config import AcqConfig, EngineParams, ProbeConfig
from .delays import (
    INTERP,
    aperture_mask,
    depth_grid,
    effective_subaperture,
    removal_counts,
    rx_delay_traditional,
    tx_delay_traditional,
    tx_shift,
)
from .engine import ACC_DTYPE, BeamformedFrame, ProfileMismatch
from .rf_synth import ChannelFrame


def _interpolated_sample(trace: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Value of the 2x-interpolated trace at integer positions ``q``."""
    D = trace.shape[0]
    t = trace.astype(np.int64)
    i = q // 2
    odd = (q % 2 == 1) & (i + 1 < D)
    nxt = np.minimum(i + 1, D - 1)
    return np.where(odd, (t[i] + t[nxt]) // 2, t[i])


def _pixel_geometry(frame: ChannelFrame, theta: float, acq: AcqConfig, params: EngineParams, lateral_offsets):
    probe = frame.probe
    D, W = frame.samples.shape
    if D != acq.depth_samples:
        raise ProfileMismatch(f"frame has {D} samples, acquisition expects {acq.depth_samples}")
    if W != probe.num_elements or W != params.num_elements:
        raise ProfileMismatch(f"frame has {W} channels, engine expects {params.num_elements}")
    if lateral_offsets is None:
        lateral_offsets = params.lateral_offsets(probe.pitch)
    if len(lateral_offsets) != params.R:
        raise ProfileMismatch(f"got {len(lateral_offsets)} lateral offsets for R = {params.R}")
    z = depth_grid(probe, acq)
    f_eff = effective_subaperture(z, params, probe)
    return probe, z, f_eff, list(lateral_offsets)


def _window(n: int, W: int, F: int) -> np.ndarray:
    """A-lines whose F-element window contains element ``n``."""
    half = F // 2
    return np.arange(max(0, n - half + 1), min(W, n + half + 1))


def das_reference_quantized(
    frame: ChannelFrame,
    theta: float,
    acq: AcqConfig,
    params: EngineParams,
    lateral_offsets=None,
) -> BeamformedFrame:
    probe, z, f_eff, offsets = _pixel_geometry(frame, theta, acq, params, lateral_offsets)
    D, W = frame.samples.shape
    n_rows = INTERP * D
    c, d = probe.sound_speed, probe.pitch
    rate = probe.sample_rate * INTERP
    removed = removal_counts(theta, probe)
    shift = tx_shift(theta, probe)
    sin_t = math.sin(theta)

    out = np.zeros((n_rows, W * params.R), dtype=ACC_DTYPE)
    zz = z[:, None]
    for rho, off in enumerate(offsets):
        frac = off / d
        for n in range(W):
            js = _window(n, W, params.F)
            x = js * d + off
            x_n = n * d
            tau = tx_delay_traditional(theta, x[None, :], zz, c) + rx_delay_traditional(x_n, x[None, :], zz, c)
            resid = tau - x_n * sin_t / c + shift - acq.start_time
            idx = np.rint(resid * rate).astype(np.int64)
            keep = aperture_mask((n - js)[None, :] - frac, f_eff[:, None]) & (idx >= 0) & (idx < n_rows)
            pos = idx + removed[n]
            keep &= pos < n_rows
            vals = np.where(keep, _interpolated_sample(frame.samples[:, n], np.where(keep, pos, 0)), 0)
            out[:, js * params.R + rho] += vals.astype(ACC_DTYPE)
    return BeamformedFrame(values=out, angle=float(theta))


def das_reference_continuous(
    frame: ChannelFrame,
    theta: float,
    acq: AcqConfig,
    params: EngineParams,
    lateral_offsets=None,
) -> BeamformedFrame:
    """Floating-point DAS with linear interpolation at the exact delay.

    Same pixel grid and aperture as the quantized mode; meant for image
    quality comparisons only.
    """
    probe, z, f_eff, offsets = _pixel_geometry(frame, theta, acq, params, lateral_offsets)
    D, W = frame.samples.shape
    c, d, fs = probe.sound_speed, probe.pitch, probe.sample_rate
    out = np.zeros((INTERP * D, W * params.R))
    zz = z[:, None]
    for rho, off in enumerate(offsets):
        frac = off / d
        for n in range(W):
            trace = frame.samples[:, n].astype(float)
            js = _window(n, W, params.F)
            x = js * d + off
            tau = tx_delay_traditional(theta, x[None, :], zz, c) + rx_delay_traditional(n * d, x[None, :], zz, c)
            p = (tau - acq.start_time) * fs
            i0 = np.floor(p).astype(np.int64)
            w = p - i0
            keep = aperture_mask((n - js)[None, :] - frac, f_eff[:, None]) & (i0 >= 0) & (p <= D - 1)
            a = trace[np.clip(i0, 0, D - 1)]
            b = trace[np.clip(i0 + 1, 0, D - 1)]
            out[:, js * params.R + rho] += np.where(keep, (1 - w) * a + w * b, 0.0)
    return BeamformedFrame(values=out, angle=float(theta))

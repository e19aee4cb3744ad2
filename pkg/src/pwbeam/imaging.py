"""B-mode conversion and image-quality metrics."""

from __future__ import annotations

import numpy as np
from scipy.signal import hilbert


def envelope(values: np.ndarray) -> np.ndarray:
    """Analytic-signal magnitude of every A-line (columns are A-lines)."""
    return np.abs(hilbert(np.asarray(values, dtype=float), axis=0))


def log_compress(env: np.ndarray, dynamic_range: float = 60.0) -> np.ndarray:
    if not dynamic_range > 0:
        raise ValueError("dynamic_range must be > 0")
    peak = env.max() if env.size else 0.0
    if peak == 0:
        return np.zeros_like(env, dtype=float)
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(env / peak)
    return np.clip(1 + db / dynamic_range, 0.0, 1.0)


def envelope_log(values: np.ndarray, dynamic_range: float = 60.0) -> np.ndarray:
    """Normalized log-compressed B-mode image in ``[0, 1]``.

    A pixel ``dynamic_range`` dB below the brightest one maps to 0. An
    all-zero frame gives an all-zero image.
    """
    return log_compress(envelope(values), dynamic_range)


def cnr(image: np.ndarray, roi_inside, roi_outside) -> float:
    """Contrast-to-noise ratio between two regions.

    ROIs are anything that indexes ``image`` (boolean masks, slices, index
    tuples). Variances are population variances.
    """
    image = np.asarray(image, dtype=float)
    if isinstance(roi_inside, np.ndarray) and isinstance(roi_outside, np.ndarray):
        if roi_inside.dtype == bool and roi_outside.dtype == bool and np.any(roi_inside & roi_outside):
            raise ValueError("ROIs overlap")
    inside = image[roi_inside].ravel()
    outside = image[roi_outside].ravel()
    if inside.size == 0 or outside.size == 0:
        raise ValueError("ROIs must be nonempty")
    var_i, var_o = inside.var(), outside.var()
    if var_i == 0 and var_o == 0:
        raise ValueError("CNR undefined: both regions have zero variance")
    return float(abs(inside.mean() - outside.mean()) / np.sqrt(var_i + var_o))


def _crossing(profile, start, step, half):
    i = start
    while 0 <= i + step < profile.size:
        j = i + step
        if profile[j] < half:
            # linear interpolation between i (>= half) and j (< half)
            return i + step * (profile[i] - half) / (profile[i] - profile[j])
        i = j
    raise ValueError("profile never drops below half maximum on one side of the peak")


def lateral_fwhm(image: np.ndarray, wire_row: int, pitch: float, column: int | None = None, search: int | None = None) -> float:
    """Full width at half maximum of row ``wire_row``, in meters.

    ``image`` must be linear in amplitude (e.g. the envelope, not the log
    image). ``pitch`` is the A-line spacing. The peak is the row maximum, or
    the maximum within ``search`` columns of ``column`` when given.
    """
    profile = np.asarray(image, dtype=float)[wire_row]
    lo, hi = 0, profile.size
    if column is not None:
        s = profile.size if search is None else search
        lo, hi = max(0, column - s), min(profile.size, column + s + 1)
    peak = lo + int(np.argmax(profile[lo:hi]))
    top = profile[peak]
    left = profile[peak - 1] if peak > 0 else -np.inf
    right = profile[peak + 1] if peak + 1 < profile.size else -np.inf
    if not top > 0 or top < left or top < right:
        raise ValueError(f"no peak found on row {wire_row}")
    half = top / 2
    width = _crossing(profile, peak, 1, half) - _crossing(profile, peak, -1, half)
    return float(width * pitch)

"""Synthetic plane-wave channel data for point and speckle phantoms.

Each scatterer contributes a Gaussian-windowed sinusoid to every channel,
delayed by the plane-wave transmit time plus the element's receive time. No
attenuation, directivity or multiple scattering is modeled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import gausspulse

from .config import AcqConfig, ProbeConfig
from .delays import rx_delay_traditional, tx_delay_traditional

INT16_MAX = 32767
INT16_MIN = -32768


@dataclass(frozen=True)
class Cyst:
    x: float
    z: float
    radius: float
    contrast: float = 0.0  # amplitude scale inside the disc; 0 is anechoic

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("cyst radius must be > 0")


@dataclass(frozen=True)
class Phantom:
    """Point scatterers plus an optional diffuse background.

    ``background_density`` is in scatterers per mm^2 over the field of view,
    or over ``background_region = ((x0, x1), (z0, z1))`` when given.
    Background realizations are drawn from the seed handed to
    :meth:`realize`, so a single phantom can give many speckle patterns.
    """

    scatterers: tuple[tuple[float, float, float], ...] = ()
    background_density: float = 0.0
    background_amplitude: float = 0.1
    cysts: tuple[Cyst, ...] = field(default_factory=tuple)
    background_region: tuple[tuple[float, float], tuple[float, float]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "scatterers", tuple(tuple(map(float, s)) for s in self.scatterers))
        object.__setattr__(self, "cysts", tuple(self.cysts))
        if self.background_density < 0:
            raise ValueError("background_density must be >= 0")

    @property
    def is_empty(self) -> bool:
        return not self.scatterers and self.background_density == 0

    def validate(self, probe: ProbeConfig, acq: AcqConfig) -> None:
        (x0, x1), (z0, z1) = field_of_view(probe, acq)
        for x, z, _ in self.scatterers:
            if not (x0 <= x <= x1 and z0 <= z <= z1):
                raise ValueError(f"scatterer at ({x:.4g}, {z:.4g}) m is outside the field of view")
        for cyst in self.cysts:
            if not (x0 <= cyst.x <= x1 and z0 <= cyst.z <= z1):
                raise ValueError(f"cyst centre ({cyst.x:.4g}, {cyst.z:.4g}) m is outside the field of view")
        if self.background_region is not None:
            (bx0, bx1), (bz0, bz1) = self.background_region
            if not (x0 <= bx0 < bx1 <= x1 and z0 <= bz0 < bz1 <= z1):
                raise ValueError("background region must be a nonempty box inside the field of view")

    def realize(self, probe: ProbeConfig, acq: AcqConfig, seed: int = 0):
        """Concrete scatterer arrays ``(x, z, amplitude)``."""
        pts = np.array(self.scatterers, dtype=float).reshape(-1, 3)
        if self.background_density > 0:
            (x0, x1), (z0, z1) = self.background_region or field_of_view(probe, acq)
            rng = np.random.default_rng(seed)
            area_mm2 = (x1 - x0) * (z1 - z0) * 1e6
            n = int(round(self.background_density * area_mm2))
            bg = np.column_stack(
                [
                    rng.uniform(x0, x1, n),
                    rng.uniform(z0, z1, n),
                    rng.normal(0.0, self.background_amplitude, n),
                ]
            )
            keep = np.ones(n, dtype=bool)
            for cyst in self.cysts:
                inside = np.hypot(bg[:, 0] - cyst.x, bg[:, 1] - cyst.z) < cyst.radius
                if cyst.contrast == 0:
                    keep &= ~inside
                else:
                    bg[inside, 2] *= cyst.contrast
            pts = np.vstack([pts, bg[keep]])
        return pts[:, 0], pts[:, 1], pts[:, 2]


@dataclass(frozen=True, eq=False)
class ChannelFrame:
    """Raw RF for one transmit: rows are fast-time samples, columns elements."""

    samples: np.ndarray
    angle: float
    probe: ProbeConfig
    saturated: int = 0

    @property
    def depth_samples(self) -> int:
        return self.samples.shape[0]


def field_of_view(probe: ProbeConfig, acq: AcqConfig):
    """Lateral span of the array and the depth span covered by the record."""
    c = probe.sound_speed
    z0 = acq.start_time * c / 2
    z1 = z0 + acq.depth_samples / probe.sample_rate * c / 2
    return (0.0, (probe.num_elements - 1) * probe.pitch), (z0, z1)


def make_wire_phantom(
    probe: ProbeConfig,
    acq: AcqConfig,
    count: int = 5,
    spacing: float = 5e-3,
    z0: float = 5e-3,
    x: float | None = None,
    amplitude: float = 1.0,
) -> Phantom:
    """A vertical column of point wires, ``spacing`` apart axially."""
    if x is None:
        x = (probe.num_elements - 1) * probe.pitch / 2
    wires = tuple((x, z0 + i * spacing, amplitude) for i in range(count))
    phantom = Phantom(scatterers=wires)
    phantom.validate(probe, acq)
    return phantom


def make_cyst_phantom(
    probe: ProbeConfig,
    acq: AcqConfig,
    radius: float,
    contrast: float = 0.0,
    center: tuple[float, float] | None = None,
    density: float = 20.0,
    amplitude: float = 0.1,
    margin: float | None = None,
) -> Phantom:
    """Speckle background with a single circular cyst (anechoic by default).

    With ``margin`` the speckle fills only a box reaching ``margin`` beyond
    the cyst edge (clipped to the field of view). The simulator has no
    spreading loss, so a full-field background adds far-off clutter that
    fills the cyst in.
    """
    (x0, x1), (za, zb) = field_of_view(probe, acq)
    if center is None:
        center = ((x0 + x1) / 2, (za + zb) / 2)
    region = None
    if margin is not None:
        reach = radius + margin
        region = (
            (max(x0, center[0] - reach), min(x1, center[0] + reach)),
            (max(za, center[1] - reach), min(zb, center[1] + reach)),
        )
    phantom = Phantom(
        background_density=density,
        background_amplitude=amplitude,
        cysts=(Cyst(center[0], center[1], radius, contrast),),
        background_region=region,
    )
    phantom.validate(probe, acq)
    return phantom


def _pulse_support(fc: float, bw: float) -> float:
    return float(gausspulse("cutoff", fc=fc, bw=bw, tpr=-80))


def simulate_rf(
    phantom: Phantom,
    theta: float,
    probe: ProbeConfig,
    acq: AcqConfig,
    seed: int = 0,
    fractional_bandwidth: float = 0.6,
    chunk: int = 256,
) -> np.ndarray:
    """Floating-point channel data (``D x W``) before quantization."""
    D, W = acq.depth_samples, probe.num_elements
    fs, c, fc = probe.sample_rate, probe.sound_speed, probe.center_frequency
    out = np.zeros((D, W))
    xs, zs, amps = phantom.realize(probe, acq, seed)
    if xs.size == 0:
        return out

    half = _pulse_support(fc, fractional_bandwidth)
    span = int(np.ceil(2 * half * fs)) + 2
    x_n = probe.element_positions
    cols = np.arange(W)
    for start in range(0, xs.size, chunk):
        x = xs[start : start + chunk, None]
        z = zs[start : start + chunk, None]
        a = amps[start : start + chunk, None, None]
        arrival = tx_delay_traditional(theta, x, z, c) + rx_delay_traditional(x_n[None, :], x, z, c)
        first = np.ceil((arrival - half - acq.start_time) * fs).astype(np.int64)
        rows = first[:, :, None] + np.arange(span)
        t = acq.start_time + rows / fs - arrival[:, :, None]
        vals = a * gausspulse(t, fc=fc, bw=fractional_bandwidth)
        ok = (rows >= 0) & (rows < D)
        col_idx = np.broadcast_to(cols[None, :, None], rows.shape)
        np.add.at(out, (rows[ok], col_idx[ok]), vals[ok])
    return out


def quantize(rf: np.ndarray, full_scale: float) -> tuple[np.ndarray, int]:
    """Map ``[-full_scale, full_scale]`` onto int16, saturating. Returns (samples, clipped count)."""
    q = np.rint(rf / full_scale * INT16_MAX)
    clipped = int(np.count_nonzero((q > INT16_MAX) | (q < INT16_MIN)))
    return np.clip(q, INT16_MIN, INT16_MAX).astype(np.int16), clipped


def simulate_frame(
    phantom: Phantom,
    theta: float,
    probe: ProbeConfig,
    acq: AcqConfig,
    rng_seed: int = 0,
    fractional_bandwidth: float = 0.6,
    full_scale: float = 4.0,
) -> ChannelFrame:
    """Quantized 16-bit channel data for one steering angle."""
    rf = simulate_rf(phantom, theta, probe, acq, rng_seed, fractional_bandwidth)
    samples, clipped = quantize(rf, full_scale)
    return ChannelFrame(samples=samples, angle=float(theta), probe=probe, saturated=clipped)

"""Probe, acquisition and engine configuration.

The config file is a flat INI document with four sections (``probe``,
``acquisition``, ``engine``, ``phantom``). Every key is typed and unknown keys
are rejected by name. Float values are rounded to float32 precision on load so
that anything written into the binary headers reads back bit-identically.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path

import numpy as np


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


@dataclass(frozen=True)
class ProbeConfig:
    num_elements: int
    pitch: float
    sample_rate: float
    sound_speed: float = 1540.0
    center_frequency: float = 5e6

    def __post_init__(self):
        if self.num_elements < 2:
            raise ConfigError("num_elements must be >= 2")
        for name in ("pitch", "sample_rate", "sound_speed", "center_frequency"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")

    @property
    def element_positions(self) -> np.ndarray:
        """Lateral element positions, first element at x = 0."""
        return np.arange(self.num_elements) * self.pitch


@dataclass(frozen=True)
class AcqConfig:
    angles: tuple[float, ...]
    depth_samples: int
    start_time: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))
        if self.depth_samples < 1:
            raise ConfigError("depth_samples must be >= 1")
        if not self.angles:
            raise ConfigError("at least one steering angle is required")
        for a in self.angles:
            if not abs(a) < math.pi / 2:
                raise ConfigError(f"steering angle {a} rad is not in (-pi/2, pi/2)")


@dataclass(frozen=True)
class EngineParams:
    """Scaling knobs of the beamformer plus the timing constants.

    ``f_number = inf`` disables the fixed F-number aperture reduction.
    """

    num_elements: int
    F: int
    F_sub: int
    R: int = 1
    f_number: float = 1.0
    pipeline_delay: int = 0
    clock_freq: float = 300e6

    def __post_init__(self):
        if self.F < 2 or self.F % 2:
            raise ConfigError("F must be even and >= 2")
        if self.F > self.num_elements:
            raise ConfigError("F must not exceed num_elements")
        if self.F_sub < 1 or self.F % self.F_sub:
            raise ConfigError("F_sub must divide F")
        if self.R < 1:
            raise ConfigError("R must be >= 1")
        if not self.f_number > 0:
            raise ConfigError("f_number must be > 0")
        if self.pipeline_delay < 0:
            raise ConfigError("pipeline_delay must be >= 0")
        if not self.clock_freq > 0:
            raise ConfigError("clock_freq must be > 0")

    @property
    def passes(self) -> int:
        return self.F // self.F_sub

    @property
    def num_output_lines(self) -> int:
        return self.num_elements * self.R

    def lateral_offsets(self, pitch: float) -> list[float]:
        """Uniform sub-pitch start positions, one per replicated beamformer."""
        return [rho * pitch / self.R for rho in range(self.R)]


@dataclass(frozen=True)
class PhantomSpec:
    """Declarative phantom description as read from a config file."""

    kind: str = "none"
    background_density: float = 0.0
    wire_count: int = 5
    wire_x: float = 0.0
    wire_z0: float = 5e-3
    wire_spacing: float = 5e-3
    cyst_x: float = 0.0
    cyst_z: float = 0.0
    cyst_radius: float = 0.0
    cyst_margin: float = 0.0  # 0 fills the whole field of view with speckle
    amplitude: float = 1.0
    fractional_bandwidth: float = 0.6
    full_scale: float = 4.0


@dataclass(frozen=True)
class Config:
    probe: ProbeConfig
    acq: AcqConfig
    engine: EngineParams
    phantom: PhantomSpec = field(default_factory=PhantomSpec)


def f32(value: float) -> float:
    """Round to the nearest float32 and return it as a Python float."""
    return float(np.float32(value))


def _parse_angles(text: str) -> tuple[float, ...]:
    text = text.strip()
    if ":" in text:
        start, stop, step = (float(p) for p in text.split(":"))
        n = int(round((stop - start) / step)) + 1
        degs = [start + i * step for i in range(n)]
    else:
        degs = [float(p) for p in text.split(",") if p.strip()]
    return tuple(f32(math.radians(a)) for a in degs)


def _float(s):
    return f32(float(s))


def _fnum(s):
    return math.inf if s.strip().lower() in ("inf", "none", "off") else f32(float(s))


_SCHEMA = {
    "probe": {
        "num_elements": int,
        "pitch": _float,
        "sample_rate": _float,
        "sound_speed": _float,
        "center_frequency": _float,
    },
    "acquisition": {
        "angles_deg": _parse_angles,
        "depth_samples": int,
        "start_time": _float,
    },
    "engine": {
        "F": int,
        "F_sub": int,
        "R": int,
        "f_number": _fnum,
        "pipeline_delay": int,
        "clock_freq": float,
    },
    "phantom": {
        "kind": str,
        "background_density": float,
        "wire_count": int,
        "wire_x": float,
        "wire_z0": float,
        "wire_spacing": float,
        "cyst_x": float,
        "cyst_z": float,
        "cyst_radius": float,
        "cyst_margin": float,
        "amplitude": float,
        "fractional_bandwidth": float,
        "full_scale": float,
    },
}

_REQUIRED = {
    "probe": ("num_elements", "pitch", "sample_rate"),
    "acquisition": ("angles_deg", "depth_samples"),
    "engine": ("F", "F_sub"),
}


def parse_config(text: str, source: str = "<string>") -> Config:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str  # keep F / F_sub case
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    values: dict[str, dict] = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{source}: unknown section [{section}]")
        schema = _SCHEMA[section]
        values[section] = {}
        for key, raw in parser.items(section):
            if key not in schema:
                raise ConfigError(f"{source}: unknown key '{key}' in [{section}]")
            try:
                values[section][key] = schema[key](raw)
            except ValueError as exc:
                raise ConfigError(f"{source}: bad value for '{section}.{key}': {raw!r}") from exc
    for section, keys in _REQUIRED.items():
        if section not in values:
            raise ConfigError(f"{source}: missing section [{section}]")
        for key in keys:
            if key not in values[section]:
                raise ConfigError(f"{source}: missing key '{key}' in [{section}]")

    probe = ProbeConfig(**values["probe"])
    acq_vals = dict(values["acquisition"])
    acq = AcqConfig(angles=acq_vals.pop("angles_deg"), **acq_vals)
    engine = EngineParams(num_elements=probe.num_elements, **values["engine"])
    phantom = PhantomSpec(**values.get("phantom", {}))
    if phantom.kind not in ("none", "wires", "cyst", "speckle"):
        raise ConfigError(f"{source}: unknown phantom kind '{phantom.kind}'")
    return Config(probe, acq, engine, phantom)


def load_config(path: str | Path) -> Config:
    path = Path(path)
    return parse_config(path.read_text(), source=str(path))


PRESET_IDS = (1, 2, 3, 4)


def load_preset(number: int, depth_samples: int | None = None) -> Config:
    """Bundled configuration mirroring one of the four scaling settings."""
    if number not in PRESET_IDS:
        raise ConfigError(f"unknown preset {number}; choose one of {PRESET_IDS}")
    text = resources.files("pwbeam.presets").joinpath(f"preset{number}.ini").read_text()
    cfg = parse_config(text, source=f"preset{number}")
    if depth_samples is not None:
        cfg = replace(cfg, acq=replace(cfg.acq, depth_samples=depth_samples))
    return cfg

"""Latency, throughput and on-chip memory arithmetic for an engine setting.

Everything here is closed-form: one output row per interpolated sample, each
row taking ``F / F_sub`` clock cycles, plus a fixed pipeline constant.
Memory sizes are in bits; ``Kb`` and ``Mb`` in reports mean 2**10 and 2**20
bits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

from .config import Config, EngineParams
from .delays import INTERP, build_profiles, global_mdr, max_transmit_delay

SAMPLE_BITS = 16
DEFAULT_BLOCK_BITS = 36 * 1024

# Post-implementation figures for the four settings: LUTs, BRAM blocks, watts.
# Reported verbatim, not modeled.
REFERENCE_RESOURCES = {
    1: {"device": "ZU5EV", "lut": 16043, "bram": 67, "power_w": 2.066},
    2: {"device": "ZU9EG", "lut": 41428, "bram": 318, "power_w": 5.385},
    3: {"device": "KU19P", "lut": 57340, "bram": 491, "power_w": 12.968},
    4: {"device": "KU19P", "lut": 73843, "bram": 478, "power_w": 12.173},
}


def latency_cycles(params: EngineParams, depth_samples: int) -> int:
    """Clock cycles to beamform one frame of ``depth_samples`` raw rows."""
    return INTERP * depth_samples * params.passes + params.pipeline_delay


def rates(params: EngineParams, depth_samples: int, latency: int) -> tuple[int, int, int]:
    """(frames/s, input samples/s, external bandwidth in bits/s)."""
    if latency <= 0:
        raise ValueError("latency must be positive")
    frame_rate = math.floor(params.clock_freq / latency)
    input_rate = params.num_elements * depth_samples * frame_rate
    return frame_rate, input_rate, input_rate * SAMPLE_BITS


@dataclass(frozen=True)
class MemoryBudget:
    rf_buffer_bits_each: int
    rf_buffer_bits: int
    rf_brams: int
    tx_comp_bits: int
    tx_comp_brams: int
    tx_comp_depth: int
    profile_bits: int
    uncompressed_profile_bits: int
    full_depth_buffer_bits: int


def memory_budget(
    params: EngineParams,
    mdr: int,
    mtd: int,
    depth_samples: int,
    n_angles: int = 1,
    block_bits: int = DEFAULT_BLOCK_BITS,
) -> MemoryBudget:
    """On-chip storage for RF cyclic buffers, transmit FIFOs and delay tables.

    The transmit FIFOs are repacked so each block serves ``F / F_sub``
    channels; total bits are unchanged but the block count drops by that
    factor.
    """
    W, F, F_sub = params.num_elements, params.F, params.F_sub
    rows = INTERP * depth_samples
    each = W * mdr * SAMPLE_BITS
    return MemoryBudget(
        rf_buffer_bits_each=each,
        rf_buffer_bits=F_sub * each,
        rf_brams=F_sub * math.ceil(each / block_bits),
        tx_comp_bits=mtd * W * SAMPLE_BITS,
        tx_comp_brams=W * F_sub // F,
        tx_comp_depth=mtd * F // F_sub,
        profile_bits=rows * F * SAMPLE_BITS * n_angles * params.R,
        uncompressed_profile_bits=rows * W * F * SAMPLE_BITS,
        full_depth_buffer_bits=F * W * rows * SAMPLE_BITS,
    )


@dataclass(frozen=True)
class PerfReport:
    latency_cycles: int
    frame_rate: int
    input_rate: int
    ddr_bandwidth: int
    mdr: int
    mtd: int
    rf_buffer_bits: int
    rf_buffer_bits_each: int
    tx_comp_bits: int
    profile_bits: int
    tx_comp_brams: int
    tx_comp_depth: int
    rf_brams: int
    uncompressed_profile_bits: int
    clock_freq: float
    num_elements: int
    depth_samples: int
    F: int
    F_sub: int
    R: int

    def to_kv(self) -> str:
        """One ``key=value`` per line, in field order."""
        return format_kv(asdict(self))

    def summary(self) -> str:
        kb = 1024
        return "\n".join(
            [
                f"setting     W_i={self.num_elements} F={self.F} F_sub={self.F_sub} R={self.R} D={self.depth_samples}",
                f"latency     {self.latency_cycles} cycles @ {self.clock_freq / 1e6:.3f} MHz",
                f"frame rate  {self.frame_rate} FPS",
                f"input rate  {self.input_rate / 1e9:.3f} GSPS",
                f"DDR traffic {self.ddr_bandwidth / 1e9:.2f} Gb/s",
                f"MDR / MTD   {self.mdr} / {self.mtd} samples",
                f"RF buffers  {self.F_sub} x {self.rf_buffer_bits_each / kb:g} Kb = {self.rf_buffer_bits / kb:g} Kb"
                f" (~{self.rf_brams} blocks)",
                f"tx FIFOs    {self.tx_comp_bits / kb:g} Kb in {self.tx_comp_brams} blocks of depth {self.tx_comp_depth}",
                f"profiles    {self.profile_bits / 2**20:.3f} Mb"
                f" (uncompressed {self.uncompressed_profile_bits / 2**20:g} Mb per angle)",
            ]
        )


def perf_report(
    cfg: Config,
    mdr: int | None = None,
    mtd: int | None = None,
    block_bits: int = DEFAULT_BLOCK_BITS,
) -> PerfReport:
    """Full report for a configuration; MDR and MTD are derived unless given."""
    params, D = cfg.engine, cfg.acq.depth_samples
    if mdr is None:
        mdr = global_mdr(build_profiles(cfg.probe, cfg.acq, params))
    if mtd is None:
        mtd = max_transmit_delay(cfg.acq.angles, cfg.probe)
    lat = latency_cycles(params, D)
    fps, in_rate, ddr = rates(params, D, lat)
    mem = memory_budget(params, mdr, mtd, D, len(cfg.acq.angles), block_bits)
    return PerfReport(
        latency_cycles=lat,
        frame_rate=fps,
        input_rate=in_rate,
        ddr_bandwidth=ddr,
        mdr=mdr,
        mtd=mtd,
        rf_buffer_bits=mem.rf_buffer_bits,
        rf_buffer_bits_each=mem.rf_buffer_bits_each,
        tx_comp_bits=mem.tx_comp_bits,
        profile_bits=mem.profile_bits,
        tx_comp_brams=mem.tx_comp_brams,
        tx_comp_depth=mem.tx_comp_depth,
        rf_brams=mem.rf_brams,
        uncompressed_profile_bits=mem.uncompressed_profile_bits,
        clock_freq=params.clock_freq,
        num_elements=params.num_elements,
        depth_samples=D,
        F=params.F,
        F_sub=params.F_sub,
        R=params.R,
    )


def parse_kv(text: str) -> dict[str, str]:
    """Inverse of the ``key=value`` report format."""
    out = {}
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"not a key=value line: {line!r}")
        out[key.strip()] = value.strip()
    return out


def format_kv(values: dict) -> str:
    return "".join(f"{k}={v!r}\n" if isinstance(v, float) else f"{k}={v}\n" for k, v in values.items())

"""Plane-wave ultrasound beamforming with compressed, reusable delay profiles."""

from .config import AcqConfig, Config, ConfigError, EngineParams, ProbeConfig, load_config, load_preset
from .delays import (
    SENTINEL,
    DelayProfile,
    build_delay_profile,
    build_profiles,
    delay_slope,
    effective_subaperture,
    global_mdr,
    max_transmit_delay,
    rx_delay_compressed,
    rx_delay_traditional,
    total_delay_compressed,
    tx_delay_traditional,
    tx_removal_samples,
)
from .engine import (
    BeamformedFrame,
    CyclicBuffer,
    MDRViolation,
    ProfileMismatch,
    beamform_angle,
    beamform_compound,
    beamform_frame,
    beamform_streaming,
    compensate_tx_delay,
    interpolate_2x,
)
from .imaging import cnr, envelope, envelope_log, lateral_fwhm
from .perf import latency_cycles, memory_budget, perf_report, rates
from .reference import das_reference_continuous, das_reference_quantized
from .rf_synth import ChannelFrame, Cyst, Phantom, make_cyst_phantom, make_wire_phantom, simulate_frame

__version__ = "0.1.0"

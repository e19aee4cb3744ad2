import math
from dataclasses import replace

import pytest
from hypothesis import given
from hypothesis import strategies as st

from pwbeam.config import EngineParams, load_preset
from pwbeam.perf import REFERENCE_RESOURCES, latency_cycles, memory_budget, parse_kv, perf_report, rates

KB = 1024


def _params(W=128, F=64, F_sub=8, P=0, clock=300e6, R=1):
    return EngineParams(num_elements=W, F=F, F_sub=F_sub, R=R, pipeline_delay=P, clock_freq=clock)


def test_latency_examples():
    assert latency_cycles(_params(F_sub=8, P=23), 1280) == 20503
    assert latency_cycles(_params(F_sub=16, P=19), 1280) == 10259
    assert latency_cycles(_params(F=2, F_sub=2, W=2), 1) == 2


def test_rate_examples():
    fps, sps, bw = rates(_params(F_sub=16, clock=302.30e6), 1280, 10259)
    assert fps == 29466
    assert sps == 4_827_709_440
    assert bw == 77_243_351_040
    assert rates(_params(clock=304.79e6), 1280, 20503)[0] == 14865
    assert rates(_params(clock=1000.0), 1280, 1000)[0] == 1
    with pytest.raises(ValueError):
        rates(_params(), 1280, 0)


def test_memory_examples():
    mem = memory_budget(_params(F_sub=8), mdr=150, mtd=10, depth_samples=1280)
    assert mem.rf_buffer_bits_each == 300 * KB
    assert mem.rf_buffer_bits == 2400 * KB
    fig = memory_budget(_params(W=64, F=32, F_sub=4), mdr=40, mtd=144, depth_samples=1280)
    assert fig.tx_comp_brams == 8
    assert fig.tx_comp_depth == 144 * 8
    assert fig.tx_comp_bits == 144 * 64 * 16
    full = memory_budget(_params(), mdr=150, mtd=10, depth_samples=1280)
    assert full.uncompressed_profile_bits == 320 * 2**20
    assert full.full_depth_buffer_bits == 320 * 2**20


def test_profile_bits_scale_with_angles_and_offsets():
    a = memory_budget(_params(R=1), 150, 10, 1280, n_angles=1)
    b = memory_budget(_params(R=4), 150, 10, 1280, n_angles=9)
    assert a.profile_bits == 2560 * 64 * 16
    assert b.profile_bits == 36 * a.profile_bits


def test_rf_brams_respect_block_size():
    mem = memory_budget(_params(F_sub=8), mdr=150, mtd=10, depth_samples=1280)
    assert mem.rf_brams == 8 * math.ceil(300 / 36)
    assert memory_budget(_params(F_sub=8), 150, 10, 1280, block_bits=300 * KB).rf_brams == 8


@given(ratio=st.sampled_from([1, 2, 4, 8, 16, 32]), D=st.integers(1, 5000), P=st.integers(0, 100))
def test_latency_linear_in_passes(ratio, D, P):
    params = _params(F=64, F_sub=64 // ratio, P=P)
    assert latency_cycles(params, D) == 2 * D * ratio + P


@given(F_sub=st.sampled_from([1, 2, 4, 8, 16, 32]), D=st.integers(1, 5000), mdr=st.integers(1, 400))
def test_doubling_fsub(F_sub, D, mdr):
    a, b = _params(F_sub=F_sub), _params(F_sub=2 * F_sub)
    assert latency_cycles(a, D) == 2 * latency_cycles(b, D)
    assert memory_budget(b, mdr, 5, D).rf_buffer_bits == 2 * memory_budget(a, mdr, 5, D).rf_buffer_bits


@pytest.mark.parametrize(
    "preset, latency, fps",
    [(1, 20500, 15330), (2, 20503, 14865), (3, 10259, 29466), (4, 20501, 14768)],
)
def test_presets_reproduce_table(preset, latency, fps):
    rep = perf_report(load_preset(preset))
    assert rep.latency_cycles == latency
    assert rep.frame_rate == fps
    assert rep.input_rate == rep.num_elements * rep.depth_samples * fps
    assert preset in REFERENCE_RESOURCES


def test_report_kv_round_trip():
    rep = perf_report(load_preset(2), mdr=150, mtd=20)
    kv = parse_kv(rep.to_kv())
    assert kv["latency_cycles"] == "20503"
    assert kv["frame_rate"] == "14865"
    assert kv["rf_buffer_bits"] == str(2400 * KB)
    assert float(kv["clock_freq"]) == rep.clock_freq
    assert set(kv) == set(rep.__dataclass_fields__)
    assert "FPS" in rep.summary()


def test_parse_kv_rejects_garbage():
    assert parse_kv("# comment\n\na=1\n") == {"a": "1"}
    with pytest.raises(ValueError):
        parse_kv("no equals sign")


def test_report_derives_mdr_and_mtd():
    cfg = load_preset(2, depth_samples=256)
    rep = perf_report(cfg)
    assert rep.mtd == 144
    assert rep.mdr > 0
    assert perf_report(replace(cfg), mdr=7).mdr == 7

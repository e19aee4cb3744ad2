import math

import numpy as np
import pytest

from pwbeam.config import ConfigError, EngineParams, f32, load_preset, parse_config

BASE = """
[probe]
num_elements = 32
pitch = 0.2e-3
sample_rate = 20e6

[acquisition]
angles_deg = -4:4:1
depth_samples = 96

[engine]
F = 16
F_sub = 4
"""


def test_parse_defaults():
    cfg = parse_config(BASE)
    assert cfg.probe.sound_speed == 1540.0
    assert cfg.probe.pitch == f32(0.2e-3)
    assert len(cfg.acq.angles) == 9
    assert cfg.acq.angles[0] == f32(math.radians(-4))
    assert cfg.engine.R == 1 and cfg.engine.f_number == 1.0
    assert cfg.phantom.kind == "none"


def test_angle_list_and_fnumber_off():
    cfg = parse_config(BASE.replace("-4:4:1", "0, 10").replace("F_sub = 4", "F_sub = 4\nf_number = inf"))
    np.testing.assert_allclose(cfg.acq.angles, [0.0, math.radians(10)], rtol=1e-7)
    assert math.isinf(cfg.engine.f_number)


@pytest.mark.parametrize(
    "text, match",
    [
        (BASE + "bogus = 1\n", "bogus"),
        (BASE.replace("[probe]", "[probes]"), "probes"),
        (BASE.replace("F = 16", "F = 15"), "F must be even"),
        (BASE.replace("F_sub = 4", "F_sub = 5"), "F_sub"),
        (BASE.replace("depth_samples = 96", "depth_samples = many"), "depth_samples"),
        (BASE.replace("-4:4:1", "95"), "steering angle"),
        (BASE + "\n[phantom]\nkind = blob\n", "blob"),
        (BASE.split("[acquisition]")[1].join(["[acquisition]", ""]), "probe"),
    ],
)
def test_invalid_configs(text, match):
    with pytest.raises(ConfigError, match=match):
        parse_config(text)


def test_missing_required_key():
    with pytest.raises(ConfigError, match="sample_rate"):
        parse_config(BASE.replace("sample_rate = 20e6", ""))


def test_engine_param_validation():
    with pytest.raises(ConfigError):
        EngineParams(num_elements=8, F=16, F_sub=4)
    with pytest.raises(ConfigError):
        EngineParams(num_elements=32, F=16, F_sub=4, R=0)
    p = EngineParams(num_elements=32, F=16, F_sub=4, R=4)
    assert p.passes == 4 and p.num_output_lines == 128
    assert p.lateral_offsets(1.0) == [0.0, 0.25, 0.5, 0.75]


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_presets_load(n):
    cfg = load_preset(n)
    assert cfg.acq.depth_samples == 1280
    assert cfg.engine.num_elements == cfg.probe.num_elements
    assert load_preset(n, depth_samples=64).acq.depth_samples == 64


def test_unknown_preset():
    with pytest.raises(ConfigError):
        load_preset(5)

import math

import numpy as np
import pytest

from pwbeam.config import AcqConfig, EngineParams, ProbeConfig

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def small_probe():
    return ProbeConfig(num_elements=32, pitch=0.2e-3, sample_rate=20e6, sound_speed=1540.0, center_frequency=5e6)


@pytest.fixture
def small_acq():
    return AcqConfig(angles=tuple(math.radians(a) for a in (-6, 0, 6)), depth_samples=96)


@pytest.fixture
def small_params():
    return EngineParams(num_elements=32, F=16, F_sub=4, R=1, f_number=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number, name, ok, detail=""):
        lines.append(f"[criterion {number}] {'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

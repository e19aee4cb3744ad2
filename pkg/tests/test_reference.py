import math

import numpy as np
import pytest

from pwbeam.config import AcqConfig, EngineParams, ProbeConfig
from pwbeam.delays import depth_grid, effective_subaperture
from pwbeam.engine import ProfileMismatch
from pwbeam.reference import das_reference_continuous, das_reference_quantized
from pwbeam.rf_synth import ChannelFrame

HAND_PROBE = ProbeConfig(num_elements=3, pitch=0.3e-3, sample_rate=10e6, sound_speed=1540.0)
HAND_ACQ = AcqConfig(angles=(0.0,), depth_samples=16)
HAND_PARAMS = EngineParams(num_elements=3, F=2, F_sub=1, f_number=1.0)

# (row, A-line, value) of every nonzero output pixel, enumerated by brute_force_das
HAND_GOLDEN = {
    0.0: [
        (14, 2, 64), (15, 1, 64), (15, 2, 128), (16, 1, 160), (16, 2, 64), (17, 0, 32),
        (17, 1, 128), (17, 2, 128), (18, 0, 64), (18, 1, 32), (18, 2, 256), (19, 0, 32),
        (19, 2, 128), (22, 2, -48), (23, 1, -48), (23, 2, -96), (24, 1, -96), (24, 2, -48),
        (25, 1, -48),
    ],
    10.0: [
        (12, 2, 64), (13, 2, 128), (14, 1, 64), (14, 2, 64), (15, 1, 160), (16, 1, 96),
        (16, 2, 128), (17, 0, 32), (17, 1, 64), (17, 2, 256), (18, 0, 64), (18, 1, 32),
        (18, 2, 128), (19, 0, 32), (21, 2, -48), (22, 1, -48), (22, 2, -96), (23, 1, -96),
        (23, 2, -48), (24, 1, -48),
    ],
}


def hand_samples():
    s = [[0] * 3 for _ in range(16)]
    s[9][0], s[8][1], s[9][2], s[12][1] = 64, 128, 256, -96
    return s


def _f_eff(z, F, fnum, d):
    fe = min(F, 2 * math.floor(z / (2 * fnum * d) + 1e-9))
    return max(fe, 2) if z > fnum * d else fe


def brute_force_das(samples, theta, d, fs, c, F, fnum, off=0.0):
    """Scalar pure-Python DAS on the interpolated grid, one (pixel, element) pair at a time."""
    D, W = len(samples), len(samples[0])
    interp = []
    for i in range(D):
        nxt = samples[i + 1] if i + 1 < D else samples[i]
        interp.append(list(samples[i]))
        interp.append([(a + b) // 2 for a, b in zip(samples[i], nxt)])
    rows = 2 * D
    s = math.sin(theta)
    shift = min(0.0, (W - 1) * d * s / c)
    out = [[0] * W for _ in range(rows)]
    for r in range(rows):
        z = r * c / (4 * fs)
        fe = _f_eff(z, F, fnum, d)
        for j in range(W):
            x = j * d + off
            for n in range(max(0, j - F // 2), min(W, j + F // 2)):
                if fe <= 0 or abs(n - j - off / d) > fe / 2:
                    continue
                xn = n * d
                tau = (z * math.cos(theta) + x * s) / c + math.sqrt(z * z + (xn - x) ** 2) / c
                removed = round((xn * s / c - shift) * 2 * fs)
                idx = round((tau - xn * s / c + shift) * 2 * fs)
                if 0 <= idx < rows and idx + removed < rows:
                    out[r][j] += interp[idx + removed][n]
    return out


def brute_force_continuous(samples, theta, d, fs, c, F, fnum):
    D, W = len(samples), len(samples[0])
    s = math.sin(theta)
    out = [[0.0] * W for _ in range(2 * D)]
    for r in range(2 * D):
        z = r * c / (4 * fs)
        fe = _f_eff(z, F, fnum, d)
        for j in range(W):
            x = j * d
            for n in range(max(0, j - F // 2), min(W, j + F // 2)):
                if fe <= 0 or abs(n - j) > fe / 2:
                    continue
                tau = (z * math.cos(theta) + x * s) / c + math.sqrt(z * z + (n * d - x) ** 2) / c
                p = tau * fs
                i0 = math.floor(p)
                if i0 < 0 or p > D - 1:
                    continue
                w = p - i0
                a = samples[i0][n]
                b = samples[min(i0 + 1, D - 1)][n]
                out[r][j] += (1 - w) * a + w * b
    return out


def _frame(samples, theta, probe=HAND_PROBE):
    return ChannelFrame(samples=np.asarray(samples, dtype=np.int16), angle=theta, probe=probe)


def _dense(entries, shape):
    out = np.zeros(shape, dtype=np.int64)
    for r, j, v in entries:
        out[r, j] = v
    return out


@pytest.mark.parametrize("deg", sorted(HAND_GOLDEN))
def test_hand_instance_matches_brute_force(deg):
    theta = math.radians(deg)
    golden = _dense(HAND_GOLDEN[deg], (32, 3))
    brute = np.array(brute_force_das(hand_samples(), theta, 0.3e-3, 10e6, 1540.0, 2, 1.0))
    np.testing.assert_array_equal(brute, golden)
    out = das_reference_quantized(_frame(hand_samples(), theta), theta, HAND_ACQ, HAND_PARAMS)
    np.testing.assert_array_equal(out.values, golden)


@pytest.mark.parametrize("deg", [0.0, 10.0])
def test_hand_instance_continuous(deg):
    theta = math.radians(deg)
    expected = np.array(brute_force_continuous(hand_samples(), theta, 0.3e-3, 10e6, 1540.0, 2, 1.0))
    out = das_reference_continuous(_frame(hand_samples(), theta), theta, HAND_ACQ, HAND_PARAMS)
    scale = np.abs(expected).max()
    np.testing.assert_allclose(out.values, expected, rtol=1e-6, atol=1e-6 * scale)


def test_random_instance_matches_brute_force(rng):
    probe = ProbeConfig(num_elements=6, pitch=0.25e-3, sample_rate=16e6)
    acq = AcqConfig(angles=(0.0,), depth_samples=24)
    params = EngineParams(num_elements=6, F=4, F_sub=2, R=2, f_number=1.0)
    samples = rng.integers(-2000, 2000, size=(24, 6))
    for deg in (-7.0, 0.0, 5.0):
        theta = math.radians(deg)
        frame = _frame(samples, theta, probe)
        out = das_reference_quantized(frame, theta, acq, params)
        for rho, off in enumerate(params.lateral_offsets(probe.pitch)):
            brute = brute_force_das(samples.tolist(), theta, probe.pitch, probe.sample_rate, 1540.0, 4, 1.0, off)
            np.testing.assert_array_equal(out.values[:, rho::2], np.array(brute))


def test_zero_frame_gives_zero(small_probe, small_acq, small_params):
    frame = _frame(np.zeros((96, 32)), 0.1, small_probe)
    q = das_reference_quantized(frame, 0.1, small_acq, small_params)
    c = das_reference_continuous(frame, 0.1, small_acq, small_params)
    assert q.values.shape == (192, 32)
    assert not q.values.any()
    assert not c.values.any()


def test_rows_without_aperture_are_zero(small_probe, small_acq, small_params, rng):
    frame = _frame(rng.integers(-30000, 30000, size=(96, 32)), 0.0, small_probe)
    f_eff = effective_subaperture(depth_grid(small_probe, small_acq), small_params, small_probe)
    dead = f_eff == 0
    assert dead.sum() >= 2
    out = das_reference_quantized(frame, 0.0, small_acq, small_params)
    assert not out.values[dead].any()
    assert out.values[~dead].any()


def test_translation_consistency(small_probe, small_params):
    acq = AcqConfig(angles=(0.0,), depth_samples=96)
    n = 16
    impulses = []
    for q in (40, 41):
        s = np.zeros((96, 32), dtype=np.int16)
        s[q, n] = 1000
        impulses.append(das_reference_quantized(_frame(s, 0.0, small_probe), 0.0, acq, small_params).values[:, n])
    a, b = impulses
    assert a.any()
    np.testing.assert_array_equal(b[2:], a[:-2])
    assert np.argmax(b) == np.argmax(a) + 2


def test_continuous_tracks_quantized(small_probe, small_params):
    # empirical check only: a smooth pulse should beamform to nearly the same A-line
    acq = AcqConfig(angles=(0.0,), depth_samples=96)
    t = np.arange(96)
    pulse = np.round(8000 * np.exp(-(((t - 50) / 4.0) ** 2)))
    s = np.repeat(pulse[:, None], 32, axis=1).astype(np.int16)
    q = das_reference_quantized(_frame(s, 0.0, small_probe), 0.0, acq, small_params).values
    c = das_reference_continuous(_frame(s, 0.0, small_probe), 0.0, acq, small_params).values
    col = 16
    assert abs(q[:, col].max() - c[:, col].max()) / c[:, col].max() < 0.05


def test_dimension_mismatch(small_probe, small_acq, small_params):
    frame = _frame(np.zeros((50, 32)), 0.0, small_probe)
    with pytest.raises(ProfileMismatch):
        das_reference_quantized(frame, 0.0, small_acq, small_params)
    with pytest.raises(ProfileMismatch):
        das_reference_quantized(_frame(np.zeros((96, 32)), 0.0, small_probe), 0.0, small_acq, small_params, [0.0, 1e-4])

"""
Compounding a wire phantom
==========================

Nine steered plane waves are beamformed and summed coherently. The lateral
width of each wire narrows compared with the single broadside frame, and a
B-mode image of the compound is written as a PGM file.
"""

import math
import sys
from pathlib import Path

import numpy as np

from pwbeam import AcqConfig, EngineParams, ProbeConfig, beamform_compound, build_profiles, envelope, envelope_log, lateral_fwhm
from pwbeam.fileio import write_pgm
from pwbeam.rf_synth import make_wire_phantom, simulate_frame

out_dir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(".")
fs = 40e6
probe = ProbeConfig(num_elements=128, pitch=0.2e-3, sample_rate=fs, center_frequency=5e6)
depth = math.ceil(28e-3 * 2 / 1540 * fs / 64) * 64
R = 4

# %%
# Default wire grid: five wires, 5 mm apart, centred laterally.
for step in (1.0, 4.0):
    acq = AcqConfig(angles=tuple(math.radians(step * k) for k in range(-4, 5)), depth_samples=depth)
    params = EngineParams(num_elements=128, F=64, F_sub=8, R=R, f_number=1.0)
    phantom = make_wire_phantom(probe, acq)
    frames = [simulate_frame(phantom, a, probe, acq, full_scale=2.0) for a in acq.angles]
    per_angle, total = beamform_compound(frames, build_profiles(probe, acq, params), params)

    # %%
    # Measure the FWHM of each wire on the envelope, at the row of its peak.
    single, comp = envelope(per_angle[4].values), envelope(total)
    pitch = probe.pitch / R
    col = round((probe.num_elements - 1) * probe.pitch / 2 / pitch)
    print(f"angles -{4 * step:g}..{4 * step:g} deg")
    for _, z, _ in phantom.scatterers:
        r = round(z * 4 * fs / probe.sound_speed)
        win = slice(r - 12, r + 13)
        r1 = r - 12 + int(np.argmax(single[win, col]))
        r9 = r - 12 + int(np.argmax(comp[win, col]))
        w1 = lateral_fwhm(single, r1, pitch, column=col, search=3 * R)
        w9 = lateral_fwhm(comp, r9, pitch, column=col, search=3 * R)
        print(f"  wire at {z * 1e3:4.1f} mm: 0 deg {w1 * 1e3:.3f} mm, compound {w9 * 1e3:.3f} mm")

    write_pgm(out_dir / f"wires_compound_step{step:g}.pgm", envelope_log(total, 50))
print("images written to", out_dir.resolve())

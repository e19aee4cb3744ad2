"""
Delay profiles and dependent ranges
===================================

One delay table per steering angle serves every A-line of the image. This
walk-through builds the tables for the 128-channel setting and looks at how
much RF each output row actually needs.
"""

import math
from dataclasses import replace

import numpy as np

from pwbeam import SENTINEL, build_delay_profile, load_preset, max_transmit_delay

cfg = load_preset(2)
probe, acq, params = cfg.probe, cfg.acq, cfg.engine
print(f"{probe.num_elements} elements, pitch {probe.pitch * 1e3:.2f} mm, fs {probe.sample_rate / 1e6:.0f} MHz")
print(f"F = {params.F} taps, {2 * acq.depth_samples} interpolated rows per frame")

# %%
# A table has 2D rows and F columns. Tap k of A-line j reads element j + k - F/2,
# so the centre column is simply the row index at broadside.
prof = build_delay_profile(0.0, 0.0, probe, acq, params)
print("table shape", prof.indices.shape, "dtype", prof.indices.dtype)
print("row 1000, taps 28..36:", prof.indices[1000, 28:37])

# %%
# Near the surface the fixed F-number switches most taps off (sentinel entries).
live = (prof.indices != SENTINEL).sum(axis=1)
for r in (0, 50, 200, 800, 2000):
    print(f"row {r:5d}: {live[r]:2d} live taps, dependent range {prof.per_row_dr[r]}")

# %%
# The dependent range (DR) sets how many RF rows must stay buffered. Without the
# F-number rule it shrinks monotonically with depth; with it, the largest range
# (MDR) drops sharply because wide apertures only open up deep down.
full = build_delay_profile(0.0, 0.0, probe, acq, replace(params, f_number=math.inf))
print("MDR with full aperture:", full.mdr)
print("MDR with f-number 1   :", prof.mdr)
print("DR non-increasing without F-number:", bool(np.all(np.diff(full.per_row_dr) <= 0)))

# %%
# Steering adds a per-channel transmit offset. It is removed up front by dropping
# leading samples, and the largest drop over all angles is the MTD.
for deg in (-4, 0, 4):
    p = build_delay_profile(math.radians(deg), 0.0, probe, acq, params)
    print(f"{deg:+d} deg: MDR {p.mdr}")
print("MTD over +-4 deg:", max_transmit_delay(acq.angles, probe))

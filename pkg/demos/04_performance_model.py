"""
Latency, throughput and memory
==============================

The timing model is closed-form: every interpolated row costs F / F_sub
cycles, plus a fixed pipeline constant. This script prints the report for the
four bundled settings and shows how F_sub trades memory for speed.
"""

from dataclasses import replace

from pwbeam import load_preset, perf_report
from pwbeam.perf import REFERENCE_RESOURCES, latency_cycles, memory_budget

# %%
# The bundled settings, with MDR and MTD derived from their delay tables.
for n in (1, 2, 3, 4):
    rep = perf_report(load_preset(n))
    res = REFERENCE_RESOURCES[n]
    print(f"--- setting {n} ({res['device']}, {res['lut']} LUT, {res['bram']} BRAM, {res['power_w']} W reported)")
    print(rep.summary())

# %%
# Doubling F_sub halves the per-row cycles and doubles the RF buffer bits.
cfg = load_preset(2)
for F_sub in (4, 8, 16, 32):
    params = replace(cfg.engine, F_sub=F_sub)
    mem = memory_budget(params, mdr=150, mtd=144, depth_samples=1280)
    print(f"F_sub={F_sub:2d}: {latency_cycles(params, 1280):6d} cycles, RF buffers {mem.rf_buffer_bits / 1024:6.0f} Kb")

# %%
# Storing one full-depth table per pixel column instead would need far more.
mem = memory_budget(cfg.engine, mdr=150, mtd=144, depth_samples=1280)
print(f"shared table {mem.profile_bits / 2**20:.2f} Mb vs per-column tables {mem.uncompressed_profile_bits / 2**20:.0f} Mb")

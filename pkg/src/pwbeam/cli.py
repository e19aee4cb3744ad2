"""Command-line entry point: ``pwbeam <subcommand> ...`` or ``pwbeam --compare A B``.

Exit codes: 0 success, 1 usage, 2 validation, 3 comparison mismatch, 4 I/O.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import fileio
from .config import ConfigError, EngineParams, load_config, load_preset
from .delays import build_profiles, global_mdr, max_transmit_delay
from .engine import ProfileMismatch, beamform_angle, compound
from .imaging import cnr, envelope, envelope_log, lateral_fwhm
from .perf import format_kv, memory_budget, perf_report
from .reference import das_reference_continuous, das_reference_quantized
from .rf_synth import Phantom, make_cyst_phantom, make_wire_phantom, simulate_frame

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_MISMATCH, EXIT_IO = range(5)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _phantom(cfg):
    spec = cfg.phantom
    if spec.kind == "wires":
        x = spec.wire_x or None
        ph = make_wire_phantom(cfg.probe, cfg.acq, spec.wire_count, spec.wire_spacing, spec.wire_z0, x, spec.amplitude)
        if spec.background_density:
            ph = Phantom(ph.scatterers, background_density=spec.background_density)
        return ph
    if spec.kind == "cyst":
        center = (spec.cyst_x, spec.cyst_z) if spec.cyst_z else None
        return make_cyst_phantom(
            cfg.probe,
            cfg.acq,
            spec.cyst_radius,
            center=center,
            density=spec.background_density or 20.0,
            margin=spec.cyst_margin or None,
        )
    if spec.kind == "speckle":
        return Phantom(background_density=spec.background_density or 20.0)
    return Phantom()


def cmd_simulate(args):
    cfg = load_config(args.config)
    phantom = _phantom(cfg)
    frames = [
        simulate_frame(
            phantom,
            a,
            cfg.probe,
            cfg.acq,
            rng_seed=args.seed,
            fractional_bandwidth=cfg.phantom.fractional_bandwidth,
            full_scale=cfg.phantom.full_scale,
        )
        for a in cfg.acq.angles
    ]
    fileio.write_rf(args.out, frames)
    print(f"frames={len(frames)}")
    print(f"saturated={sum(f.saturated for f in frames)}")
    print(f"sha256={fileio.file_digest(args.out)}")


def cmd_delays(args):
    cfg = load_config(args.config)
    profiles = build_profiles(cfg.probe, cfg.acq, cfg.engine)
    fileio.write_profiles(args.out, profiles)
    mdr = global_mdr(profiles)
    mtd = max_transmit_delay(cfg.acq.angles, cfg.probe)
    mem = memory_budget(cfg.engine, mdr, mtd, cfg.acq.depth_samples, len(cfg.acq.angles))
    sys.stdout.write(format_kv({"mdr": mdr, "mtd": mtd, "profile_bits": mem.profile_bits}))
    print(f"sha256={fileio.file_digest(args.out)}")


def _map(fn, items, jobs):
    if jobs > 1:
        with ThreadPoolExecutor(jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def cmd_beamform(args):
    frames = fileio.read_rf(args.rf)
    profiles = fileio.read_profiles(args.profiles, frames[0].probe)
    if len(frames) != len(profiles):
        raise ProfileMismatch(f"{len(frames)} RF frames but {len(profiles)} profile angles")
    rows, F = profiles[0][0].indices.shape
    params = EngineParams(
        num_elements=frames[0].probe.num_elements,
        F=F,
        F_sub=args.fsub or F,
        R=len(profiles[0]),
        f_number=math.inf,
    )
    for fr, grp in zip(frames, profiles):
        if np.float32(fr.angle) != np.float32(grp[0].angle):
            raise ProfileMismatch(f"angle mismatch: RF {fr.angle} rad vs profile {grp[0].angle} rad")
    out = _map(lambda pair: beamform_angle(pair[0], pair[1], params, args.mode), list(zip(frames, profiles)), args.jobs)
    fileio.write_beamformed(args.out, out, compound(out))
    print(f"sha256={fileio.file_digest(args.out)}")


def cmd_reference(args):
    cfg = load_config(args.config)
    frames = fileio.read_rf(args.rf)
    probe = frames[0].probe
    if probe != cfg.probe:
        raise ProfileMismatch(f"RF header probe {probe} does not match config probe {cfg.probe}")
    if len(frames) != len(cfg.acq.angles):
        raise ProfileMismatch(f"{len(frames)} RF frames but {len(cfg.acq.angles)} configured angles")
    fn = das_reference_quantized if args.mode == "quantized" else das_reference_continuous

    def run(frame):
        bf = fn(frame, frame.angle, cfg.acq, cfg.engine)
        if args.mode == "continuous":
            bf = type(bf)(values=np.rint(bf.values).astype(np.int32), angle=bf.angle)
        return bf

    out = _map(run, frames, args.jobs)
    fileio.write_beamformed(args.out, out, compound(out))
    print(f"sha256={fileio.file_digest(args.out)}")


def compare_files(a, b) -> int:
    fa, ca = fileio.read_beamformed(a)
    fb, cb = fileio.read_beamformed(b)
    if len(fa) != len(fb) or fa[0].shape != fb[0].shape or (ca is None) != (cb is None):
        print(f"dimension mismatch: {len(fa)}x{fa[0].shape} vs {len(fb)}x{fb[0].shape}", file=sys.stderr)
        return EXIT_VALIDATION
    pairs = list(enumerate(zip(fa, fb)))
    if ca is not None:
        pairs.append(("compound", (ca, cb)))
    for label, (x, y) in pairs:
        diff = np.argwhere(x != y)
        if diff.size:
            r, c = diff[0]
            print(f"mismatch frame={label} row={r} col={c}: {x[r, c]} != {y[r, c]} ({len(diff)} values differ)")
            return EXIT_MISMATCH
    print("identical")
    return EXIT_OK


def _roi(text):
    rows, cols = text.split(",")
    r0, r1 = (int(v) for v in rows.split(":"))
    c0, c1 = (int(v) for v in cols.split(":"))
    return slice(r0, r1), slice(c0, c1)


def cmd_metrics(args):
    cfg = load_config(args.config)
    frames, compounded = fileio.read_beamformed(args.bf)
    if args.frame == "compound":
        if compounded is None:
            raise ProfileMismatch("file has no compounded frame")
        values = compounded
    else:
        values = frames[int(args.frame)]
    env = envelope(values)
    img = envelope_log(values, args.dynamic_range)
    report = {"rows": values.shape[0], "cols": values.shape[1]}
    if args.cnr:
        try:
            inside, outside = (_roi(part) for part in args.cnr.split("/"))
        except ValueError as exc:
            raise UsageError(f"bad --cnr spec {args.cnr!r}; expected r0:r1,c0:c1/r0:r1,c0:c1") from exc
        report["cnr"] = cnr(img, inside, outside)
    if args.fwhm is not None:
        pitch = cfg.probe.pitch / cfg.engine.R
        report["fwhm_m"] = lateral_fwhm(env, args.fwhm, pitch, column=args.column, search=args.search)
    if args.pgm:
        fileio.write_pgm(args.pgm, img)
    sys.stdout.write(format_kv(report))


def cmd_perf(args):
    if args.preset is not None:
        cfg = load_preset(args.preset, args.depth)
    elif args.config:
        cfg = load_config(args.config)
    else:
        raise UsageError("perf needs a config file or --preset")
    report = perf_report(cfg, block_bits=args.block_bits)
    sys.stdout.write(report.to_kv())
    if args.summary:
        print(report.summary(), file=sys.stderr)


def build_parser():
    p = _Parser(prog="pwbeam", description="Plane-wave delay-reuse beamformer")
    p.add_argument("--compare", nargs=2, metavar=("A", "B"), help="compare two BFV1 files and exit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("simulate", help="synthesize RF channel data")
    s.add_argument("config")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("delays", help="build and serialize delay profiles")
    s.add_argument("config")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_delays)

    s = sub.add_parser("beamform", help="run the parallel engine")
    s.add_argument("rf")
    s.add_argument("profiles")
    s.add_argument("--mode", choices=("engine", "streaming"), default="engine")
    s.add_argument("--fsub", type=int, default=None, help="taps per pass (default: F)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_beamform)

    s = sub.add_parser("reference", help="run the per-pixel reference DAS")
    s.add_argument("rf")
    s.add_argument("config")
    s.add_argument("--mode", choices=("quantized", "continuous"), default="quantized")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_reference)

    s = sub.add_parser("metrics", help="CNR / FWHM / PGM export of a beamformed file")
    s.add_argument("bf")
    s.add_argument("config")
    s.add_argument("--frame", default="compound", help="'compound' or a per-angle frame number")
    s.add_argument("--cnr", help="inside/outside ROIs as r0:r1,c0:c1/r0:r1,c0:c1")
    s.add_argument("--fwhm", type=int, help="row through the wire")
    s.add_argument("--column", type=int, help="expected wire column")
    s.add_argument("--search", type=int, help="half-width of the peak search window")
    s.add_argument("--dynamic-range", type=float, default=60.0)
    s.add_argument("--pgm", help="write the B-mode image as 8-bit PGM")
    s.set_defaults(func=cmd_metrics)

    s = sub.add_parser("perf", help="latency / throughput / memory report")
    s.add_argument("config", nargs="?")
    s.add_argument("--preset", type=int, choices=(1, 2, 3, 4))
    s.add_argument("--depth", type=int, default=None, help="override raw depth samples")
    s.add_argument("--block-bits", type=int, default=36 * 1024)
    s.add_argument("--summary", action="store_true", help="also print a readable summary to stderr")
    s.set_defaults(func=cmd_perf)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.compare:
            return compare_files(*args.compare)
        if not args.command:
            parser.print_usage(sys.stderr)
            return EXIT_USAGE
        args.func(args)
        return EXIT_OK
    except UsageError as exc:
        print(f"pwbeam: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (fileio.FormatError, OSError) as exc:
        print(f"pwbeam: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, ProfileMismatch, ValueError) as exc:
        print(f"pwbeam: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

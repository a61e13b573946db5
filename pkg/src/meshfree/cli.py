"""Command line entry point: ``meshfree converge | case-study | gen-points``.

Exit status is 0 on success, 1 on runtime failures (I/O, failed fits) and
2 on invalid flags or input files.
"""
from __future__ import annotations

import argparse
from argparse import SUPPRESS
import csv
import io
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from importlib import resources
from pathlib import Path

import numpy as np

from . import bench, geo, gravity
from ._io import atomic_write_text
from .contour import default_levels
from .geometry import DegenerateInputError, load_polygon
from .kernels import DEFAULT_EPSILON, DEFAULT_KERNEL, KernelKind, parse_kernel
from .rbf import EXTENDED_PRECISION_MAX_N
from .svg import render_contour_svg

log = logging.getLogger("meshfree")

KERNEL_NAMES = [k.value for k in KernelKind]


class UsageError(Exception):
    pass


def default_polygon() -> Path:
    return Path(str(resources.files("meshfree") / "data" / "tennessee.csv"))


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _seed(text):
    try:
        v = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer seed, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (v > 0 and np.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return v


def _kernel(text):
    try:
        return parse_kernel(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"invalid kernel {text!r}; valid: {' | '.join(KERNEL_NAMES)}") from None


def _methods(text):
    chosen = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in chosen if m not in bench.METHODS]
    if bad or not chosen:
        raise argparse.ArgumentTypeError(
            f"invalid method list {text!r}; use a comma list of {','.join(bench.METHODS)}")
    return list(dict.fromkeys(chosen))


def _hour_range(text):
    a, sep, b = text.partition("-")
    try:
        lo, hi = int(a), int(b if sep else a)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a-b, got {text!r}") from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"hours are 1-based and increasing, got {text!r}")
    return list(range(lo, hi + 1))


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    p = argparse.ArgumentParser(prog="meshfree", description=__doc__.splitlines()[0],
                                formatter_class=fmt)
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--seed", type=_seed, default=42, help="random seed (u64)")
    shared.add_argument("--out", type=Path, default=Path("out"), help="output directory")
    shared.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                        help="worker thread cap")
    shared.add_argument("-v", "--verbose", action="count", default=0, help="more logging")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("converge", parents=[shared], formatter_class=fmt,
                       help="RMS convergence sweep on the analytic cosine field")
    c.add_argument("--n-start", type=_positive_int, default=SUPPRESS,
                   help=f"first scatter size [{bench.DESK_SWEEP[0]}]")
    c.add_argument("--n-end", type=_positive_int, default=SUPPRESS,
                   help=f"last scatter size [{bench.DESK_SWEEP[1]}]")
    c.add_argument("--step", type=_positive_int, default=SUPPRESS,
                   help=f"size increment [{bench.DESK_SWEEP[2]}]")
    c.add_argument("--full", action="store_true",
                   help="sweep %d..%d step %d (dense solves up to ~1.8 GiB)" % bench.FULL_SWEEP)
    c.add_argument("--kernel", type=_kernel, default=DEFAULT_KERNEL,
                   help=" | ".join(KERNEL_NAMES))
    c.add_argument("--epsilon", type=_positive_float, default=DEFAULT_EPSILON,
                   help="shape parameter in normalized coordinates")
    c.add_argument("--methods", type=_methods, default=",".join(bench.METHODS),
                   help="comma list of methods")
    c.add_argument("--precision", choices=("auto", "extended", "double"), default="auto",
                   help="RBF solve arithmetic: auto is double-double up to "
                        f"{EXTENDED_PRECISION_MAX_N} points, double above")
    c.add_argument("--idw-power", type=_positive_float, default=2.0, help="gravity distance exponent")
    c.add_argument("--idw-k", type=_positive_int, default=SUPPRESS,
                   help="use only the k nearest points for gravity [all points]")
    c.add_argument("--csv", default=SUPPRESS,
                   help="output file name inside --out [convergence_seed<seed>.csv]")
    c.set_defaults(func=cmd_converge)

    s = sub.add_parser("case-study", parents=[shared], formatter_class=fmt,
                       help="interpolate station temperatures onto a state mesh")
    src = s.add_mutually_exclusive_group(required=True)
    src.add_argument("--stations", type=Path, default=SUPPRESS, help="station_id,lon,lat CSV")
    src.add_argument("--synthesize", action="store_true",
                     help="use a synthetic 0.625 x 0.5 degree station grid")
    s.add_argument("--readings", type=Path, default=SUPPRESS, help="station_id,hour_index,temperature_f CSV")
    s.add_argument("--synth-hours", type=_positive_int, default=24,
                   help="length of synthetic series")
    s.add_argument("--polygon", type=Path, default=SUPPRESS,
                   help="lon,lat boundary CSV [bundled Tennessee outline]")
    s.add_argument("--points", type=_positive_int, default=3881, help="interior mesh points")
    s.add_argument("--boundary-spacing", type=_positive_float, default=0.1,
                   help="max gap between boundary samples, degrees")
    hours = s.add_mutually_exclusive_group()
    hours.add_argument("--hour", type=int, default=SUPPRESS, help="1-based hour index [1]")
    hours.add_argument("--hours", type=_hour_range, default=SUPPRESS, help="hour range a-b")
    s.add_argument("--methods", type=_methods, default=",".join(bench.METHODS),
                   help="comma list of methods")
    s.add_argument("--kernel", type=_kernel, default=DEFAULT_KERNEL, help=" | ".join(KERNEL_NAMES))
    s.add_argument("--epsilon", type=_positive_float, default=DEFAULT_EPSILON,
                   help="shape parameter in normalized coordinates")
    s.add_argument("--idw-power", type=_positive_float, default=2.0, help="gravity distance exponent")
    s.add_argument("--idw-k", type=_positive_int, default=SUPPRESS,
                   help="use only the k nearest stations for gravity [all stations]")
    s.add_argument("--levels", type=_positive_int, default=10, help="number of contour levels")
    s.set_defaults(func=cmd_case_study)

    g = sub.add_parser("gen-points", parents=[shared], formatter_class=fmt,
                       help="random interior + boundary points and their Delaunay mesh")
    g.add_argument("--polygon", type=Path, default=SUPPRESS,
                   help="lon,lat boundary CSV [bundled Tennessee outline]")
    g.add_argument("--count", type=_positive_int, default=3881, help="interior points")
    g.add_argument("--boundary-spacing", type=_positive_float, default=0.1,
                   help="max gap between boundary samples")
    g.set_defaults(func=cmd_gen_points)
    return p


# -- subcommands ------------------------------------------------------------

def cmd_converge(args) -> int:
    explicit = {"--n-start": args.n_start, "--n-end": args.n_end, "--step": args.step}
    if args.full:
        for flag, v in explicit.items():
            if v is not None:
                raise UsageError(f"{flag} cannot be combined with --full")
        n_start, n_end, step = bench.FULL_SWEEP
    else:
        n_start = args.n_start if args.n_start is not None else bench.DESK_SWEEP[0]
        n_end = args.n_end if args.n_end is not None else bench.DESK_SWEEP[1]
        step = args.step if args.step is not None else bench.DESK_SWEEP[2]
        if n_end < n_start:
            raise UsageError(f"--n-end ({n_end}) is smaller than --n-start ({n_start})")
    idw = gravity.IdwConfig(args.idw_power, args.idw_k)
    rows = bench.run_convergence_study(n_start, n_end, step, args.seed, args.kernel,
                                       args.epsilon, args.methods, idw, threads=args.threads,
                                       precision=args.precision)
    path = args.out / (args.csv or f"convergence_seed{args.seed}.csv")
    atomic_write_text(path, bench.format_csv(rows))
    print(f"wrote {path} ({len(rows)} rows)")
    ok = [r for r in rows if not r.failed]
    for method, attr in (("rbf", "rms_rbf"), ("gravity", "rms_gravity")):
        if method in args.methods:
            last = next((getattr(r, attr) for r in reversed(ok) if getattr(r, attr) is not None), None)
            shown = "n/a" if last is None else f"{last:.6g}"
            print(f"{method}: final RMS {shown} at N={rows[-1].n_points}")
    failed = [r for r in rows if r.failed]
    for r in failed:
        print(f"row N={r.n_points} failed: {r.error}", file=sys.stderr)
    return 1 if failed else 0


def _load_polygon(path):
    try:
        return load_polygon(path or default_polygon())
    except DegenerateInputError as exc:
        raise UsageError(f"--polygon: {exc}") from exc


def cmd_case_study(args) -> int:
    if args.hour is not None and args.hour < 1:
        raise UsageError(f"--hour is 1-based, got {args.hour}")
    if args.stations is not None and args.readings is None:
        raise UsageError("--stations requires --readings")
    if args.synthesize and args.readings is not None:
        raise UsageError("--readings cannot be combined with --synthesize")
    hours = args.hours or [args.hour if args.hour is not None else 1]
    poly = _load_polygon(args.polygon)
    if args.synthesize:
        stations = geo.synthesize_stations(poly, hours=max(args.synth_hours, max(hours)),
                                           seed=args.seed)
    else:
        try:
            stations = geo.load_stations(args.stations, args.readings)
        except geo.StationFileError as exc:
            raise UsageError(str(exc)) from exc
    shortest = min(len(r.series) for r in stations)
    if max(hours) > shortest:
        raise UsageError(f"--hour(s) up to {max(hours)} but the shortest series has {shortest}")

    mesh = geo.build_mesh(poly, args.points, args.seed, args.boundary_spacing)
    methods = {
        "rbf": geo.RbfMethod(args.kernel, args.epsilon),
        "gravity": geo.GravityMethod(gravity.IdwConfig(args.idw_power, args.idw_k)),
    }
    titles = {"rbf": "RBF", "gravity": "Gravity Model"}
    jobs = [(m, h) for h in hours for m in args.methods]

    def run(job):
        name, hour = job
        field = geo.interpolate_hour(stations, hour, methods[name], mesh.points, mesh)
        stem = args.out / f"{name}_hour{hour}"
        geo.export_field_csv(field, stem.with_suffix(".csv"))
        render_contour_svg(field, default_levels(field.values, args.levels), poly,
                           stem.with_suffix(".svg"), title=f"{titles[name]}: Hour {hour}")
        return name, hour, float(field.values.min()), float(field.values.max())

    with ThreadPoolExecutor(max_workers=max(1, min(args.threads, len(jobs)))) as pool:
        results = list(pool.map(run, jobs))
    print(f"{len(stations)} stations, {len(mesh.points)} mesh points, {len(mesh.triangles)} triangles")
    for name, hour, lo, hi in results:
        print(f"{name} hour {hour}: min {lo:.2f} F, max {hi:.2f} F -> {args.out / f'{name}_hour{hour}'}.{{csv,svg}}")
    return 0


def cmd_gen_points(args) -> int:
    poly = _load_polygon(args.polygon)
    mesh = geo.build_mesh(poly, args.count, args.seed, args.boundary_spacing)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["lon", "lat", "kind"])
    for i, (x, y) in enumerate(mesh.points.tolist()):
        w.writerow([repr(x), repr(y), "interior" if i < args.count else "boundary"])
    points_path = atomic_write_text(args.out / "points.csv", buf.getvalue())
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["a", "b", "c"])
    w.writerows(mesh.triangles.tolist())
    tri_path = atomic_write_text(args.out / "triangles.csv", buf.getvalue())
    print(f"{args.count} interior + {len(mesh.points) - args.count} boundary points -> {points_path}")
    print(f"{len(mesh.triangles)} triangles -> {tri_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # flags without a fixed default are hidden from the help defaults; unset means None
    for name in ("n_start", "n_end", "step", "idw_k", "csv", "polygon", "hour", "hours",
                 "stations", "readings"):
        if not hasattr(args, name):
            setattr(args, name, None)
    level = logging.ERROR - 10 * min(args.verbose, 3)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.print_usage(sys.stderr)
        print(f"meshfree {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"meshfree {args.command}: I/O error: {exc}", file=sys.stderr)
        return 1
    except (ArithmeticError, ValueError, RuntimeError, MemoryError) as exc:
        print(f"meshfree {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

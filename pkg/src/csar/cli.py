"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 I/O or format error, 4 validation error.
Reports go to stdout as ``quantity,value,unit`` lines; ``--figure`` also
renders a PNG next to them.
"""

from __future__ import annotations

import argparse
import gc
import math
import statistics
import sys
import time

from . import design as dc
from . import io as csio
from .backprojection import azimuth_taper, reconstruct_image, resolve_workers
from .core import PolarGrid, ValidationError
from .metrics import LobeTruncatedError, psf_report
from .simulator import simulate_scene

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INVALID = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _grid_arg(text):
    parts = text.split(",")
    if len(parts) != 6:
        raise argparse.ArgumentTypeError("grid is rmin,rmax,nr,tmin,tmax,nt")
    try:
        r_min, r_max, t_min, t_max = (float(parts[i]) for i in (0, 1, 3, 4))
        n_r, n_t = int(parts[2]), int(parts[5])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad grid specification {text!r}") from None
    return r_min, r_max, n_r, t_min, t_max, n_t


def _pair_arg(text):
    try:
        r, theta = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected R,theta_deg") from None
    return r, theta


def _grid(spec):
    return PolarGrid.from_degrees(*spec)


def _emit(rows, out):
    out.write("quantity,value,unit\n")
    for name, value, unit in rows:
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, float):
            text = f"{value:.6g}"
        else:
            text = str(value)
        out.write(f"{name},{text},{unit}\n")


def build_parser():
    p = _Parser(prog="csar", description="Circular-track FMCW radar imaging toolkit")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", help="simulate a capture from a scene file")
    s.add_argument("--scene", required=True, help="scene file or bundled scene name")
    s.add_argument("--out", required=True)
    s.add_argument("--double", action="store_true", help="store a float64 payload")

    r = sub.add_parser("reconstruct", help="backproject a capture onto a polar grid")
    r.add_argument("--in", dest="inp", required=True)
    r.add_argument("--grid", type=_grid_arg, required=True, help="rmin,rmax,nr,tmin,tmax,nt (deg)")
    r.add_argument("--out", required=True)
    r.add_argument("--format", choices=("pgm", "csv"), default="csv")
    r.add_argument("--floor-db", type=float, default=-60.0)
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--taper", choices=("none", "hann", "hamming"), default="none")
    r.add_argument("--figure", help="also render the image to this PNG")

    d = sub.add_parser("design", help="print design quantities for a scene file")
    d.add_argument("--config", required=True)
    d.add_argument("--figure")

    q = sub.add_parser("psf", help="measure the PSF of an exported csv image")
    q.add_argument("--in", dest="inp", required=True)
    q.add_argument("--truth", type=_pair_arg, required=True, help="R,theta_deg")
    q.add_argument("--figure")

    b = sub.add_parser("bench", help="time the backprojection kernel")
    b.add_argument("--scene", required=True)
    b.add_argument("--grid", type=_grid_arg, default=None)
    b.add_argument("--repeat", type=int, default=5)
    b.add_argument("--workers", type=int, default=None)
    return p


def cmd_simulate(args, out):
    cfg = csio.load_scene_config(args.scene)
    data = simulate_scene(cfg.params, cfg.aperture, cfg.scene, cfg.antenna, cfg.noise)
    csio.write_capture(data, args.out, double=args.double)
    _emit([("n_samples", data.samples.shape[0], "1"), ("n_angles", data.samples.shape[1], "1"),
           ("targets", len(cfg.scene), "1")], out)


def cmd_reconstruct(args, out):
    grid = _grid(args.grid)
    if not args.floor_db < 0:
        raise ValidationError("--floor-db must be negative")
    data = csio.read_capture(args.inp)
    taper = azimuth_taper(args.taper, data.aperture.size)
    image = reconstruct_image(data, grid, workers=args.workers, taper=taper)
    csio.export_image(image, args.format, args.floor_db, args.out)
    rows = [("cells", grid.n_r * grid.n_theta, "1")]
    if args.figure:
        from .plotting import render_image
        render_image(image, args.figure, args.floor_db)
        rows.append(("figure", args.figure, "path"))
    _emit(rows, out)


def cmd_design(args, out):
    cfg = csio.load_scene_config(args.config)
    extra = cfg.design
    beam = math.radians(extra.get("beamwidth_deg", math.degrees(cfg.antenna.beamwidth_3db)))
    if "target_range" in extra:
        target_range = float(extra["target_range"])
    elif cfg.scene.targets:
        target_range = cfg.scene.targets[0].range
    else:
        raise ValidationError("design needs design.target_range or at least one target")
    exposure = extra.get("exposure_deg")
    report = dc.design_report(cfg.params, cfg.aperture.radius, beam, target_range,
                              None if exposure is None else math.radians(exposure),
                              float(extra.get("alpha", 1.0)))
    rows = report.rows()
    if args.figure:
        from .plotting import render_design
        render_design(cfg.params, cfg.aperture.radius, args.figure, target_range)
        rows.append(("figure", args.figure, "path"))
    _emit(rows, out)


def cmd_psf(args, out):
    grid, db = csio.read_image_csv(args.inp)
    report = psf_report(db, grid)
    truth_r, truth_deg = args.truth
    peak_r, peak_t = grid.center(*report.peak_cell)
    rows = report.rows() + [
        ("peak_range", peak_r, "m"),
        ("peak_azimuth_deg", math.degrees(peak_t), "deg"),
        ("range_error", peak_r - truth_r, "m"),
        ("azimuth_error_deg", math.degrees(peak_t) - truth_deg, "deg"),
    ]
    if args.figure:
        from .plotting import render_psf_cuts
        render_psf_cuts(db, grid, args.figure, report.peak_cell)
        rows.append(("figure", args.figure, "path"))
    _emit(rows, out)


def run_bench(data, grid, repeat, workers=None):
    """Median timing of ``repeat`` reconstructions after one warm-up run."""
    if repeat < 1:
        raise ValidationError("--repeat must be >= 1")
    reconstruct_image(data, grid, workers=workers)
    times = []
    # collector pauses would land inside the timed region, as timeit also avoids
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(repeat):
            t0 = time.perf_counter()
            reconstruct_image(data, grid, workers=workers)
            times.append(time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    med = statistics.median(times)
    mad = statistics.median(abs(t - med) for t in times)
    cells = grid.n_r * grid.n_theta
    per_cell = data.samples.size
    return {
        "workers": resolve_workers(workers),
        "cells": cells,
        "samples_per_cell": per_cell,
        "median_s": med,
        "cells_per_s": cells / med,
        "samples_per_s": cells * per_cell / med,
        "relative_spread": mad / med,
    }


def cmd_bench(args, out):
    cfg = csio.load_scene_config(args.scene)
    if args.grid is not None:
        grid = _grid(args.grid)
    elif cfg.grid is not None:
        grid = cfg.grid
    else:
        raise ValidationError("bench needs --grid or a grid section in the scene")
    data = simulate_scene(cfg.params, cfg.aperture, cfg.scene, cfg.antenna, cfg.noise)
    res = run_bench(data, grid, args.repeat, args.workers)
    units = {"median_s": "s", "cells_per_s": "1/s", "samples_per_s": "1/s"}
    rows = [("repeat", args.repeat, "1")]
    rows += [(k, float(v) if isinstance(v, float) else v, units.get(k, "1")) for k, v in res.items()]
    _emit(rows, out)


COMMANDS = {
    "simulate": cmd_simulate,
    "reconstruct": cmd_reconstruct,
    "design": cmd_design,
    "psf": cmd_psf,
    "bench": cmd_bench,
}


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        err.write(f"csar: usage error: {exc}\n")
        return EXIT_USAGE
    try:
        COMMANDS[args.command](args, out)
    except (ValidationError, LobeTruncatedError) as exc:
        err.write(f"csar: invalid input: {exc}\n")
        return EXIT_INVALID
    except csio.FormatError as exc:
        err.write(f"csar: format error: {exc}\n")
        return EXIT_IO
    except OSError as exc:
        err.write(f"csar: I/O error: {exc}\n")
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

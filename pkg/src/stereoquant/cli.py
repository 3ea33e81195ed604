"""Command-line entry point: ``stereoquant <command> [options]``.

Exit codes: 0 success, 1 configuration error, 2 geometry error (e.g. the
target is not visible), 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .config import RunConfig, load_config, parse_density, parse_length
from .errors import ConfigError, GeometryError, StereoQuantError, TooManyPoints
from .scene_grid import Region, auto_region, generate_grid
from .table_io import load_table, save_table
from .view_tables import build_correspondence_table, query_by_pixels, query_by_point

EXIT_OK, EXIT_CONFIG, EXIT_GEOMETRY, EXIT_RESOURCE = 0, 1, 2, 3


def _spacing_arg(text: str) -> float:
    try:
        return parse_density(text) if "/" in text else parse_length(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="run configuration file")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--spacing", type=_spacing_arg,
                        help="grid spacing, e.g. 3.33mm or 3/cm")
    common.add_argument("--margin", type=float, help="region margin factor")
    common.add_argument("--threads", type=int, help="worker threads")
    common.add_argument("--seed", type=int, help="seed for grid-phase jitter")
    common.add_argument("--jitter", action="store_true", default=None,
                        help="shift each lattice by a random sub-spacing offset")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(
        prog="stereoquant",
        description="Quantization uncertainty volumes for multi-camera rigs.",
        epilog="exit codes: 0 ok, 1 config error, 2 geometry error, 3 resource cap",
    )
    sub = p.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", parents=[common], help="parameter sweep with power-law fit")
    sw.add_argument("--parameter", choices=["baseline", "focal", "pixel", "distance", "spacing"])
    sw.add_argument("--values", help="comma-separated values with units")

    sub.add_parser("plane", parents=[common], help="volume map over a plane")
    sub.add_parser("converge", parents=[common], help="volumes versus grid density")

    b = sub.add_parser("build", parents=[common], help="build and save a correspondence table")
    b.add_argument("--table", type=Path, default=Path("table.sqlt"))
    b.add_argument("--region", nargs=6, type=float, metavar=("X0", "Y0", "Z0", "X1", "Y1", "Z1"),
                   help="explicit region in meters (default: around the target)")

    q = sub.add_parser("query", parents=[common], help="look up a saved table")
    q.add_argument("--table", type=Path, required=True)
    g = q.add_mutually_exclusive_group(required=True)
    g.add_argument("--pixels", nargs="+", type=int, help="uA vA uB vB ...")
    g.add_argument("--point", nargs=3, type=float, metavar=("X", "Y", "Z"))
    q.add_argument("--export", type=Path, help="write the region's voxels (.csv or .ply)")

    c = sub.add_parser("compare", parents=[common], help="RMSE and MSA of two volume series")
    c.add_argument("predicted", type=Path)
    c.add_argument("observed", type=Path)
    c.add_argument("--column", help="volume column to compare")
    c.add_argument("--by-row", action="store_true", help="align by row instead of value")
    return p


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    cfg = cfg.with_overrides(out_dir=args.out, spacing=args.spacing, margin=args.margin,
                             threads=args.threads, seed=args.seed,
                             jitter=args.jitter)
    if getattr(args, "parameter", None) or getattr(args, "values", None):
        from .config import DEFAULT_SWEEP_VALUES, parse_sweep_value
        param = args.parameter or cfg.sweep.parameter
        values = (
            [parse_sweep_value(param, v) for v in args.values.split(",")]
            if args.values else list(DEFAULT_SWEEP_VALUES[param])
        )
        cfg.sweep = type(cfg.sweep)(param, values)
        cfg.validate()
    return cfg


def _cmd_sweep(cfg: RunConfig, args) -> int:
    res = ex.run_sweep(cfg)
    path = ex.write_text(cfg.out_dir / f"sweep_{res.parameter}.csv", ex.sweep_csv(res))
    print(f"wrote {path}")
    for r in res.rows:
        if r.error:
            print(f"  {r.param}={r.value:g}: {r.error}", file=sys.stderr)
    if res.fit:
        f = res.fit
        print(f"V = {f.coefficient:.6g} * x^{f.exponent:.4f}  (R^2 = {f.r_squared:.5f})")
    if not res.ok_rows():
        return EXIT_GEOMETRY
    return EXIT_OK


def _cmd_plane(cfg: RunConfig, args) -> int:
    pm = ex.run_plane_map(cfg)
    path = ex.write_text(cfg.out_dir / f"plane_{pm.plane}.csv", ex.plane_csv(pm))
    print(f"wrote {path} ({int(pm.valid.sum())}/{len(pm.points)} samples in view)")
    return EXIT_OK


def _cmd_converge(cfg: RunConfig, args) -> int:
    res = ex.run_spacing_convergence(cfg)
    path = ex.write_text(cfg.out_dir / "converge.csv", ex.converge_csv(res))
    print(f"wrote {path}")
    for k, err in res.errors.items():
        print(f"  baseline={k[0]:g} density={k[1]:g}: {err}", file=sys.stderr)
    if res.errors and any(e.startswith("TooManyPoints") for e in res.errors.values()):
        return EXIT_RESOURCE
    return EXIT_OK


def _cmd_build(cfg: RunConfig, args) -> int:
    rig = ex.build_rig(cfg.rig)
    if args.region:
        region = Region(args.region[:3], args.region[3:])
    else:
        region = auto_region(rig, cfg.target, cfg.margin, spacing=cfg.spacing)
    grid = generate_grid(region, cfg.spacing, cfg.max_points)
    table, views = build_correspondence_table(rig.cameras, grid, threads=cfg.threads)
    save_table(table, args.table)
    discarded = [v.diagnostics.discarded for v in views]
    print(f"wrote {args.table}: {len(table)} correspondences, {table.point_total} of "
          f"{grid.size} grid points seen by all cameras; discarded per camera {discarded}")
    return EXIT_OK


def _cmd_query(cfg: RunConfig, args) -> int:
    table = load_table(args.table)
    if args.point:
        pixels = query_by_point(table, args.point)
    else:
        pixels = args.pixels
    region = query_by_pixels(table, pixels)
    out = {
        "pixels": [list(p) for p in region.pixels],
        "points": region.point_count,
        "polyhedron_volume_m3": region.polyhedron_volume,
        "cuboid_volume_m3": region.cuboid_volume,
        "cuboid_dims_m": region.cuboid_dims.tolist(),
        "cuboid_min_m": region.cuboid_min.tolist(),
        "cuboid_max_m": region.cuboid_max.tolist(),
    }
    print(json.dumps(out, indent=2))
    if args.export:
        from .uncertainty_volumes import export_voxels
        fmt = "ply" if args.export.suffix.lower() == ".ply" else "csv"
        export_voxels(region, args.export, fmt)
    return EXIT_OK


def _cmd_compare(cfg: RunConfig, args) -> int:
    rep = ex.compare_series(args.predicted, args.observed, args.column, align=not args.by_row)
    print(json.dumps(rep, indent=2))
    return EXIT_OK


COMMANDS = {
    "sweep": _cmd_sweep,
    "plane": _cmd_plane,
    "converge": _cmd_converge,
    "build": _cmd_build,
    "query": _cmd_query,
    "compare": _cmd_compare,
}


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _config(args)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TooManyPoints as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (GeometryError, StereoQuantError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())

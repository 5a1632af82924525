"""Command-line entry point: ``vesseltopo eval|repair|fragment|skeletonize|pipeline``.

Every subcommand accepts ``--config FILE``, a JSON object whose keys are
the long flag names (``"dmax"``, ``"patch"``, ...). Flags given on the
command line override values from the file.
"""

import argparse
import csv
import json
import os
import sys

from .evaluation import (
    EvalConfig,
    aggregate_csv,
    evaluate_dataset,
    list_masks,
    markdown_table,
    per_image_csv,
    run_pipeline,
    write_report,
)
from .exceptions import VesselTopoError
from .fragment import BREAK_CSV_COLUMNS, FragmentParams, generate_breaks, break_region_mask
from .raster import read_mask, write_mask
from .repair import BRIDGE_CSV_COLUMNS, RepairParams, repair_mask
from .topology import skeletonize

DEFAULTS = {
    "eval": {"patch": 64, "conn": 8, "std": "population", "out": "csv", "threads": "1", "report_dir": None},
    "repair": {"dmax": 20.0, "cos": 0.5, "width": "dt"},
    "fragment": {"breaks": 3, "rmin": 2, "rmax": 5, "seed": 0, "regions": None},
    "skeletonize": {},
    "pipeline": {"breaks": 3, "rmin": 2, "rmax": 5, "seed": 0, "dmax": 20.0, "cos": 0.5,
                 "width": "dt", "patch": 64, "conn": 8, "threads": "1"},
}
REQUIRED = {
    "eval": ("pred", "gt"),
    "repair": ("in_dir", "out"),
    "fragment": ("gt", "out"),
    "skeletonize": ("in_file", "out"),
    "pipeline": ("gt",),
}


def parse_width(text):
    """``dt`` or ``fixed:R`` -> (width_mode, fixed_radius)."""
    if text == "dt":
        return "distance-transform", 1
    if text.startswith("fixed:"):
        return "fixed", int(text.split(":", 1)[1])
    raise ValueError(f"--width must be 'dt' or 'fixed:R', got {text!r}")


def _write_rows(path, columns, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow(tuple(repr(v) if isinstance(v, float) else v for v in row))


def _repair_params(args):
    mode, radius = parse_width(args.width)
    return RepairParams(float(args.dmax), float(args.cos), mode, radius)


def _fragment_params(args):
    return FragmentParams(int(args.breaks), int(args.rmin), int(args.rmax), int(args.seed))


def cmd_eval(args):
    cfg = EvalConfig(args.pred, args.gt, int(args.patch), int(args.conn), args.std, args.out, args.threads)
    report = evaluate_dataset(cfg)
    if cfg.output == "md":
        sys.stdout.write(markdown_table(report, cfg.patch_size, cfg.connectivity))
    else:
        sys.stdout.write(per_image_csv(report))
        sys.stdout.write("\n")
        sys.stdout.write(aggregate_csv(report, cfg.patch_size, cfg.connectivity))
    if args.report_dir:
        write_report(report, args.report_dir, cfg.patch_size, cfg.connectivity)


def cmd_repair(args):
    params = _repair_params(args)
    os.makedirs(args.out, exist_ok=True)
    for name in list_masks(args.in_dir):
        fixed, proposals = repair_mask(read_mask(os.path.join(args.in_dir, name)), params)
        write_mask(os.path.join(args.out, name), fixed)
        stem = os.path.splitext(name)[0]
        _write_rows(os.path.join(args.out, stem + ".bridges.csv"), BRIDGE_CSV_COLUMNS,
                    (p.as_row() for p in proposals))


def cmd_fragment(args):
    params = _fragment_params(args)
    os.makedirs(args.out, exist_ok=True)
    if args.regions:
        os.makedirs(args.regions, exist_ok=True)
    for name in list_masks(args.gt):
        gt = read_mask(os.path.join(args.gt, name))
        frag, records = generate_breaks(gt, params)
        write_mask(os.path.join(args.out, name), frag)
        stem = os.path.splitext(name)[0]
        _write_rows(os.path.join(args.out, stem + ".breaks.csv"), BREAK_CSV_COLUMNS,
                    (r.as_row() for r in records))
        if args.regions:
            region = break_region_mask(records, gt.shape[1], gt.shape[0])
            write_mask(os.path.join(args.regions, name), region)


def cmd_skeletonize(args):
    write_mask(args.out, skeletonize(read_mask(args.in_file)))


def cmd_pipeline(args):
    result = run_pipeline(args.gt, _fragment_params(args), _repair_params(args),
                          int(args.patch), int(args.conn), args.threads)
    sys.stdout.write("stage,metric,mean,std,n\n")
    for stage, report in (("fragmented", result.before), ("repaired", result.after)):
        for line in aggregate_csv(report, int(args.patch), int(args.conn)).splitlines()[1:]:
            sys.stdout.write(f"{stage},{line}\n")
    sys.stdout.write(result.summary() + "\n")


def build_parser():
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="vesseltopo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help):
        p = sub.add_parser(name, help=help, argument_default=S)
        p.add_argument("--config", help="JSON file whose keys mirror the long flags")
        return p

    p = add("eval", "score predicted masks against ground truth")
    p.add_argument("--pred")
    p.add_argument("--gt")
    p.add_argument("--patch", type=int)
    p.add_argument("--conn", type=int, choices=(4, 8))
    p.add_argument("--std", choices=("population", "sample"))
    p.add_argument("--out", choices=("csv", "md"))
    p.add_argument("--threads", help="worker count or 'auto'")
    p.add_argument("--report-dir", dest="report_dir", help="also write per_image.csv and aggregate tables here")

    p = add("repair", "bridge broken vessels in every mask of a directory")
    p.add_argument("--in", dest="in_dir")
    p.add_argument("--out")
    p.add_argument("--dmax", type=float)
    p.add_argument("--cos", type=float)
    p.add_argument("--width", help="'dt' or 'fixed:R'")

    p = add("fragment", "cut synthetic breaks into ground-truth masks")
    p.add_argument("--gt")
    p.add_argument("--out")
    p.add_argument("--breaks", type=int)
    p.add_argument("--rmin", type=int)
    p.add_argument("--rmax", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--regions", help="directory for the break-region masks")

    p = add("skeletonize", "thin a single mask")
    p.add_argument("--in", dest="in_file")
    p.add_argument("--out")

    p = add("pipeline", "fragment, repair and score a ground-truth directory")
    p.add_argument("--gt")
    for flag, typ in (("breaks", int), ("rmin", int), ("rmax", int), ("seed", int),
                      ("dmax", float), ("cos", float), ("patch", int)):
        p.add_argument("--" + flag, type=typ)
    p.add_argument("--conn", type=int, choices=(4, 8))
    p.add_argument("--width")
    p.add_argument("--threads")
    return parser


_CONFIG_ALIASES = {"in": ("in_dir", "in_file"), "report-dir": ("report_dir",)}


def resolve_args(args):
    """Merge built-in defaults, the optional JSON config and explicit flags."""
    given = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    merged = dict(DEFAULTS[args.command])
    config = getattr(args, "config", None)
    if config:
        with open(config) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
        for key, value in data.items():
            for dest in _CONFIG_ALIASES.get(key, (key.replace("-", "_"),)):
                merged[dest] = value
    merged.update(given)
    missing = [k for k in REQUIRED[args.command] if merged.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_dir", "").replace("_file", "") for k in missing)
        raise ValueError(f"missing required option(s): {flags}")
    return argparse.Namespace(command=args.command, **merged)


COMMANDS = {
    "eval": cmd_eval,
    "repair": cmd_repair,
    "fragment": cmd_fragment,
    "skeletonize": cmd_skeletonize,
    "pipeline": cmd_pipeline,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        COMMANDS[args.command](resolve_args(args))
    except (VesselTopoError, OSError, ValueError) as exc:
        message = " ".join(str(exc).split())
        print(f"error: {type(exc).__name__}: {message}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

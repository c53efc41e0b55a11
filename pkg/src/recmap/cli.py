"""Command-line surface.

Subcommands: render, gen-dataset, eval-grid, map, max-map, proxy, plot.
Configuration precedence is flags > --config file > defaults; RECMAP_SEED
overrides the default seed. Every run writes a `run.json` sidecar with the
resolved configuration so any artifact can be regenerated, and partially
written outputs are removed on failure.
"""

import argparse
import json
import os
import shutil
import sys

from . import __version__
from .image import write_png
from .plates import render_plate
from .plotting import plot_map, plot_table
from .recoverability import (
    DEFAULT_EASY_CUTOFF,
    DEFAULT_EASY_N,
    DEFAULT_GRID_MAX,
    DEFAULT_HARD_N,
    DEFAULT_THRESHOLD,
    EvalTable,
    RecMap,
    compute_recmap,
    eval_grid,
    max_map,
    proxy_fit,
)
from .restorers import DEFAULT_PLUGIN_TIMEOUT, parse_restorer
from .sampling import VARIANTS, AnglePdfVariant, DatasetSpec, build_dataset

RUN_VERSION = "1.0"


def _default_seed() -> int:
    env = os.environ.get("RECMAP_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"RECMAP_SEED must be an integer, got {env!r}") from exc
    return 0


def _load_config(path):
    if path is None:
        return {}
    with open(path) as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise ValueError(f"{path}: config must be a JSON object")
    return cfg


def _resolve(args, cfg, name, fallback):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in cfg:
        return cfg[name]
    return fallback() if callable(fallback) else fallback


def _write_run_json(path, command, config):
    doc = {"format_version": RUN_VERSION, "tool": f"recmap {__version__}",
           "command": command, "config": config}
    with open(path, "w") as f:
        json.dump(doc, f, indent=2, sort_keys=True)
        f.write("\n")


class _atomic_output:
    """Write to a temp path, rename on success, clean up on failure."""

    def __init__(self, path):
        self.path = str(path)
        self.tmp = self.path + ".tmp"

    def __enter__(self):
        return self.tmp

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            os.replace(self.tmp, self.path)
        elif os.path.exists(self.tmp):
            os.remove(self.tmp)
        return False


def _write_json_artifact(path, payload):
    with _atomic_output(path) as tmp:
        with open(tmp, "w") as f:
            json.dump(payload, f, indent=2, sort_keys=True)
            f.write("\n")


# --- subcommands ---------------------------------------------------------------


def cmd_render(args, cfg):
    plate = render_plate(args.digits)
    with _atomic_output(args.out) as tmp:
        write_png(plate.image, tmp)
    _write_run_json(args.out + ".run.json", "render", {"digits": args.digits, "out": args.out})
    return 0


def cmd_gen_dataset(args, cfg):
    seed = _resolve(args, cfg, "seed", _default_seed)
    variant_name = _resolve(args, cfg, "variant", "standard")
    if variant_name not in VARIANTS:
        raise ValueError(f"unknown variant {variant_name!r}; choices: {sorted(VARIANTS)}")
    variant = VARIANTS[variant_name]
    emphasis_c = _resolve(args, cfg, "emphasis_c", None)
    emphasis_s = _resolve(args, cfg, "emphasis_s", None)
    if emphasis_c is not None or emphasis_s is not None:
        variant = AnglePdfVariant(
            name=variant.name,
            emphasis_c=float(emphasis_c if emphasis_c is not None else variant.emphasis_c),
            emphasis_s=float(emphasis_s if emphasis_s is not None else variant.emphasis_s),
        )
    total = _resolve(args, cfg, "total", 10240)
    splits_text = _resolve(args, cfg, "splits", "8192,1024,1024")
    splits = tuple(int(t) for t in str(splits_text).split(","))
    jobs = _resolve(args, cfg, "jobs", os.cpu_count() or 1)
    spec = DatasetSpec(variant=variant, total_pairs=int(total),
                       splits=splits, seed=int(seed))
    created = not os.path.exists(args.out)
    try:
        build_dataset(spec, args.out, jobs=int(jobs))
    except BaseException:
        if created and os.path.isdir(args.out):
            shutil.rmtree(args.out, ignore_errors=True)
        raise
    config = {"variant": variant_name, "emphasis_c": variant.emphasis_c,
              "emphasis_s": variant.emphasis_s, "seed": int(seed),
              "total": int(total), "splits": list(splits), "out": args.out}
    _write_run_json(os.path.join(args.out, "run.json"), "gen-dataset", config)
    print(f"wrote {total} pairs to {args.out}")
    return 0


def cmd_eval_grid(args, cfg):
    seed = int(_resolve(args, cfg, "seed", _default_seed))
    restorer_text = _resolve(args, cfg, "restorer", "identity")
    spec = parse_restorer(restorer_text)
    jobs = _resolve(args, cfg, "jobs", None)
    plugin_workers = _resolve(args, cfg, "plugin_workers", None)
    if spec.kind == "plugin" and plugin_workers is not None:
        jobs = plugin_workers
    if jobs is None:
        jobs = os.cpu_count() or 1
    grid_max = int(_resolve(args, cfg, "grid_max", DEFAULT_GRID_MAX))
    easy_n = int(_resolve(args, cfg, "easy_n", DEFAULT_EASY_N))
    hard_n = int(_resolve(args, cfg, "hard_n", DEFAULT_HARD_N))
    easy_cutoff = int(_resolve(args, cfg, "easy_cutoff", DEFAULT_EASY_CUTOFF))
    timeout = float(_resolve(args, cfg, "plugin_timeout", DEFAULT_PLUGIN_TIMEOUT))

    table = eval_grid(
        spec, seed=seed, grid_max=grid_max, easy_n=easy_n, hard_n=hard_n,
        easy_cutoff=easy_cutoff, jobs=int(jobs), plugin_fresh=args.plugin_fresh,
        plugin_timeout=timeout, progress=args.progress,
    )
    with _atomic_output(args.out) as tmp:
        table.to_csv(tmp)
    config = {
        "restorer": restorer_text, "seed": seed, "grid_max": grid_max,
        "easy_n": easy_n, "hard_n": hard_n, "easy_cutoff": easy_cutoff,
        "jobs": int(jobs), "plugin_fresh": bool(args.plugin_fresh),
        "plugin_timeout": timeout, "out": args.out,
    }
    _write_run_json(args.out + ".run.json", "eval-grid", config)
    failed = table.failure_count()
    if failed:
        print(f"warning: {failed} cells failed", file=sys.stderr)
        for alpha, beta, reason in table.failures[:20]:
            print(f"  cell ({alpha},{beta}): {reason}", file=sys.stderr)
    print(f"wrote {len(table.cells)} cells to {args.out}")
    return 0


def cmd_map(args, cfg):
    threshold = float(_resolve(args, cfg, "threshold", DEFAULT_THRESHOLD))
    accuracy = _resolve(args, cfg, "accuracy", "plate")
    channel = {"plate": "ocr_plate", "digit": "ocr_digit"}.get(accuracy)
    if channel is None:
        raise ValueError(f"--accuracy must be plate or digit, got {accuracy!r}")
    table = EvalTable.from_csv(args.eval)
    recmap = compute_recmap(table, threshold, channel)
    _write_json_artifact(args.out, recmap.to_json_dict())
    _write_run_json(args.out + ".run.json", "map",
                    {"eval": args.eval, "threshold": threshold,
                     "accuracy": accuracy, "out": args.out})
    print(f"auc={recmap.auc:.6f} f={recmap.f_score:.6f} "
          f"interior_failures={len(recmap.interior_failures)}")
    return 0


def _load_map(path) -> RecMap:
    with open(path) as f:
        return RecMap.from_json_dict(json.load(f))


def cmd_max_map(args, cfg):
    maps = [_load_map(p) for p in args.maps]
    merged = max_map(maps)
    _write_json_artifact(args.out, merged.to_json_dict())
    _write_run_json(args.out + ".run.json", "max-map",
                    {"maps": list(args.maps), "out": args.out})
    print(f"auc={merged.auc:.6f} f={merged.f_score:.6f}")
    return 0


def cmd_proxy(args, cfg):
    metric = _resolve(args, cfg, "metric", "psnr")
    bins = int(_resolve(args, cfg, "bins", 20))
    table = EvalTable.from_csv(args.eval)
    fit = proxy_fit(table, metric=metric, bins=bins)
    _write_json_artifact(args.out, fit.to_json_dict())
    _write_run_json(args.out + ".run.json", "proxy",
                    {"eval": args.eval, "metric": metric, "bins": bins, "out": args.out})
    print(f"{metric}: rate = {fit.slope:.6f} x + {fit.intercept:.6f} "
          f"(r2={fit.r_squared:.6f}, n={fit.n_points})")
    return 0


def cmd_plot(args, cfg):
    if (args.eval is None) == (args.map is None):
        raise ValueError("plot needs exactly one of --eval or --map")
    with _atomic_output(args.out) as tmp:
        if args.map is not None:
            if args.channel not in (None, "r_t"):
                raise ValueError(f"map plots support channel r_t, not {args.channel!r}")
            plot_map(_load_map(args.map), tmp)
            source = {"map": args.map, "channel": "r_t"}
        else:
            channel = args.channel or "ocr_plate"
            plot_table(EvalTable.from_csv(args.eval), channel, tmp)
            source = {"eval": args.eval, "channel": channel}
    _write_run_json(args.out + ".run.json", "plot", {**source, "out": args.out})
    return 0


# --- parser ---------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="recmap",
        description="Oblique-plate degradation benchmark and recoverability maps",
    )
    parser.add_argument("--config", help="JSON file with default option values")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="render a clean plate PNG")
    p.add_argument("--digits", required=True, help="6-digit plate string")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("gen-dataset", help="materialize a training dataset")
    p.add_argument("--variant", choices=sorted(VARIANTS))
    p.add_argument("--seed", type=int)
    p.add_argument("--total", type=int)
    p.add_argument("--emphasis-c", dest="emphasis_c", type=float,
                   help="override the angle-density emphasis weight")
    p.add_argument("--emphasis-s", dest="emphasis_s", type=float,
                   help="override the angle-density tail scale (degrees)")
    p.add_argument("--splits", help="train,val,test counts")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("eval-grid", help="evaluate a restorer over the angle grid")
    p.add_argument("--restorer", help="identity | unsharp[:k=v,..] | wiener[:k=v,..] | plugin:CMD")
    p.add_argument("--seed", type=int)
    p.add_argument("--jobs", type=int)
    p.add_argument("--grid-max", dest="grid_max", type=int)
    p.add_argument("--easy-n", dest="easy_n", type=int)
    p.add_argument("--hard-n", dest="hard_n", type=int)
    p.add_argument("--easy-cutoff", dest="easy_cutoff", type=int)
    p.add_argument("--plugin-workers", dest="plugin_workers", type=int)
    p.add_argument("--plugin-fresh", action="store_true", help="spawn the plugin per image")
    p.add_argument("--plugin-timeout", dest="plugin_timeout", type=float)
    p.add_argument("--progress", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_grid)

    p = sub.add_parser("map", help="recoverability map from an EvalTable CSV")
    p.add_argument("--eval", required=True)
    p.add_argument("--threshold", type=float)
    p.add_argument("--accuracy", choices=("plate", "digit"),
                   help="threshold full-plate rate (default) or mean digit fraction")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_map)

    p = sub.add_parser("max-map", help="pointwise-maximum merge of maps")
    p.add_argument("maps", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_max_map)

    p = sub.add_parser("proxy", help="quality-metric vs OCR regression")
    p.add_argument("--eval", required=True)
    p.add_argument("--metric", choices=("psnr", "ssim"))
    p.add_argument("--bins", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_proxy)

    p = sub.add_parser("plot", help="heatmap PNG from a table or map")
    p.add_argument("--eval")
    p.add_argument("--map")
    p.add_argument("--channel")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args.config)
        return args.func(args, cfg)
    except (ValueError, OSError) as exc:
        print(f"recmap: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

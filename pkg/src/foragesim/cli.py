"""Command-line entry point: run, bench, validate, render.

Exit codes: 0 success, 1 configuration/validation failure, 2 runtime
failure (including malformed frame files and usage errors). The default
worker count comes from the FORAGESIM_THREADS environment variable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .config import dumps_config, load_config
from .engine import bench, run
from .errors import ConfigError, ForageSimError, FrameFormatError
from .render import RenderOptions, render_frame

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("FORAGESIM_THREADS", "1")))
    except ValueError:
        return 1


def _load_with_overrides(args):
    path = Path(args.config)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    cfg = load_config(path)
    overrides = {}
    if getattr(args, "seed", None) is not None:
        overrides["seed"] = args.seed
    if getattr(args, "steps", None) is not None:
        overrides["n_steps"] = args.steps
    return cfg.replace(**overrides) if overrides else cfg


def _cmd_run(args) -> int:
    try:
        cfg = _load_with_overrides(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    out_dir = Path(args.out) if args.out else Path(f"{Path(args.config).stem}_out")
    try:
        result = run(
            cfg,
            out_dir=out_dir,
            record_cadence=args.record_cadence,
            frame_cadence=args.frame_cadence,
            n_workers=args.threads,
            debug=args.debug,
        )
    except (ForageSimError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    final = result.state
    print(
        f"run complete: {final.step} steps, {final.agents.active_count} agents alive,"
        f" {final.stats.births} births, {final.stats.deaths} deaths"
    )
    print(f"artifacts in {out_dir}")
    return EXIT_OK


def _cmd_bench(args) -> int:
    try:
        cfg = _load_with_overrides(args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        report = bench(cfg, n_steps=args.steps, warmup=args.warmup, n_workers=args.threads)
    except (ForageSimError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    print(report.as_text())
    return EXIT_OK if report.valid else EXIT_RUNTIME


def _cmd_validate(args) -> int:
    path = Path(args.config)
    if not path.is_file():
        print(f"error: config file not found: {path}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(path)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    sys.stdout.write(dumps_config(cfg))
    return EXIT_OK


def _cmd_render(args) -> int:
    options = RenderOptions(
        size=args.size,
        resource_px_per_unit=args.resource_scale,
        agent_radius_px=args.agent_radius,
    )
    frame_paths = []
    for entry in args.frames:
        p = Path(entry)
        if p.is_dir():
            frame_paths.extend(sorted(p.glob("frame_*.csv")))
        else:
            frame_paths.append(p)
    if not frame_paths:
        print("error: no frame files found", file=sys.stderr)
        return EXIT_RUNTIME
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    extent = tuple(args.extent) if args.extent else None
    for fp in frame_paths:
        out_path = (out_dir / fp.with_suffix(".png").name) if out_dir else None
        try:
            n_agents, n_resources = render_frame(fp, out_path, options, extent=extent)
        except (FrameFormatError, OSError) as e:
            print(f"error: {e}", file=sys.stderr)
            return EXIT_RUNTIME
        target = out_path if out_path else fp.with_suffix(".png")
        print(f"{fp} -> {target} ({n_agents} agents, {n_resources} resources)")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="foragesim",
        description="Deterministic multi-agent foraging simulation engine",
    )
    parser.add_argument("--version", action="version", version=f"foragesim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario and write artifacts")
    p_run.add_argument("--config", required=True, help="scenario config file")
    p_run.add_argument("--seed", type=int, default=None, help="override config seed")
    p_run.add_argument("--steps", type=int, default=None, help="override config n_steps")
    p_run.add_argument("--out", default=None, help="output directory (default <config stem>_out)")
    p_run.add_argument("--record-cadence", type=int, default=100,
                       help="emit a step record every N steps (0 disables)")
    p_run.add_argument("--frame-cadence", type=int, default=0,
                       help="emit a snapshot frame every N steps (0 disables)")
    p_run.add_argument("--threads", type=int, default=_default_threads(),
                       help="worker threads for per-slot phases")
    p_run.add_argument("--debug", action="store_true",
                       help="audit every step (shapes, padding, bounds)")
    p_run.set_defaults(fn=_cmd_run)

    p_bench = sub.add_parser("bench", help="time the run loop without I/O")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--steps", type=int, default=1000, help="measured steps")
    p_bench.add_argument("--warmup", type=int, default=10, help="untimed warmup steps")
    p_bench.add_argument("--seed", type=int, default=None)
    p_bench.add_argument("--threads", type=int, default=_default_threads())
    p_bench.set_defaults(fn=_cmd_bench)

    p_val = sub.add_parser("validate", help="check a config and echo its effective form")
    p_val.add_argument("--config", required=True)
    p_val.set_defaults(fn=_cmd_validate)

    p_render = sub.add_parser("render", help="render snapshot frames to PNG images")
    p_render.add_argument("--frames", nargs="+", required=True,
                          help="frame files or directories containing frame_*.csv")
    p_render.add_argument("--out", default=None, help="output directory (default: next to frames)")
    p_render.add_argument("--size", type=int, default=1024, help="canvas size in pixels")
    p_render.add_argument("--resource-scale", type=float, default=0.08,
                          help="disk radius per resource value unit, in pixels")
    p_render.add_argument("--agent-radius", type=float, default=3.0)
    p_render.add_argument("--extent", type=float, nargs=2, default=None,
                          help="override the frame's world extent")
    p_render.set_defaults(fn=_cmd_render)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, 0 for --help/--version
        return int(e.code) if e.code else EXIT_OK
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())

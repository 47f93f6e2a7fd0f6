#!/usr/bin/env python3
"""Run the 600-agents-among-600-resources scenario and render snapshot images.

End-to-end demo of the run -> frames -> PNG pipeline on a shortened run.
Equivalent CLI:
    foragesim run --config configs/fig1_600x600.cfg --steps 1000 --frame-cadence 250 --out <dir>
    foragesim render --frames <dir>/frames
"""

import argparse
from pathlib import Path

from foragesim import load_config, run
from foragesim.render import RenderOptions, render_frame


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--config", default="configs/fig1_600x600.cfg")
    parser.add_argument("--steps", type=int, default=1000)
    parser.add_argument("--frame-cadence", type=int, default=250)
    parser.add_argument("--out", default="dispersion_out")
    parser.add_argument("--size", type=int, default=1024)
    args = parser.parse_args()

    cfg = load_config(args.config).replace(n_steps=args.steps)
    result = run(cfg, out_dir=args.out, frame_cadence=args.frame_cadence)
    print(
        f"ran {result.state.step} steps: {result.state.agents.active_count} agents alive, "
        f"{result.state.stats.births} births, {result.state.stats.deaths} deaths"
    )
    for frame in sorted(Path(args.out, "frames").glob("frame_*.csv")):
        n_agents, n_resources = render_frame(frame, options=RenderOptions(size=args.size))
        print(f"{frame.with_suffix('.png')}: {n_agents} agents, {n_resources} resources")


if __name__ == "__main__":
    main()

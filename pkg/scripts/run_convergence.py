#!/usr/bin/env python3
"""Convergence study: buffer-weighted search vs uniform random sampling.

Runs seeded multi-run campaigns of both algorithms on the same scene and
reports the median converged SI levels plus their separation.  Campaign
summaries (mean convergence curve + per-run finals) land next to --out-dir.

Usage:
    python3 scripts/run_convergence.py --runs 20 --greedy-seed 11 --random-seed 12
    python3 scripts/run_convergence.py --scene scenes/default.ini --out-dir results/
"""

import argparse
import sys
import time
from pathlib import Path

from ris_sic import sceneio
from ris_sic.channel import default_scene_params
from ris_sic.experiment import CampaignSpec, run_campaign


def parse_args(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scene", metavar="PATH", default=None,
                    help="scene file (defaults to the built-in 16x16 setup)")
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--horizon", type=int, default=5000,
                    help="common evaluation horizon for curves and finals")
    ap.add_argument("--buffer", type=int, default=100)
    ap.add_argument("--stall", type=int, default=500)
    ap.add_argument("--greedy-seed", type=int, default=11)
    ap.add_argument("--random-seed", type=int, default=12)
    ap.add_argument("--out-dir", type=Path, default=Path("results"))
    return ap.parse_args(argv)


def main(argv=None) -> int:
    args = parse_args(argv)
    params = sceneio.parse_scene(args.scene) if args.scene else default_scene_params()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    greedy = run_campaign(CampaignSpec(
        scene=params, algorithm="greedy", runs=args.runs,
        master_seed=args.greedy_seed, horizon=args.horizon,
        buffer_size=args.buffer, stall_limit=args.stall,
    ))
    random_ = run_campaign(CampaignSpec(
        scene=params, algorithm="random", runs=args.runs,
        master_seed=args.random_seed, horizon=args.horizon,
        buffer_size=args.buffer, stall_limit=args.stall,
    ))
    elapsed = time.perf_counter() - t0

    greedy_path = args.out_dir / "campaign_greedy.csv"
    random_path = args.out_dir / "campaign_random.csv"
    sceneio.write_campaign(greedy, greedy_path)
    sceneio.write_campaign(random_, random_path)

    alpha = params.calibration.alpha_iso_db
    print(f"scene: {params.geometry.nx}x{params.geometry.ny} surface, "
          f"{params.grid.center_hz / 1e9:g} GHz, baseline {-alpha:g} dB")
    print(f"greedy ({args.runs} runs, buffer {args.buffer}, stall {args.stall}): "
          f"median {greedy.final_median_db:.2f} dB, "
          f"best {greedy.final_best_db:.2f}, worst {greedy.final_worst_db:.2f}")
    print(f"random ({args.runs} runs, horizon {args.horizon}): "
          f"median {random_.final_median_db:.2f} dB, "
          f"best {random_.final_best_db:.2f}, worst {random_.final_worst_db:.2f}")
    print(f"median separation: {random_.final_median_db - greedy.final_median_db:.2f} dB")
    print(f"wrote {greedy_path} and {random_path} ({elapsed:.1f}s)")
    return 0


if __name__ == "__main__":
    sys.exit(main())

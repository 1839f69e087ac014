#!/usr/bin/env python3
"""Emulated transfer on a continuous task (two_peaks or point_reacher).

Reports the directly-trained baseline on the target cost and the final
policy's mean target cost, and saves artifacts.
"""

import argparse

from preftransfer.experiments import point_reacher_transfer, two_peaks_transfer

RUNNERS = {"two_peaks": two_peaks_transfer, "point_reacher": point_reacher_transfer}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("env", choices=sorted(RUNNERS))
    ap.add_argument("--master-seed", type=int, default=11)
    ap.add_argument("--oracle-seed", type=int, default=5)
    ap.add_argument("--max-episodes", type=int, default=10)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    out = args.out or f"runs/{args.env}"
    run = RUNNERS[args.env](master_seed=args.master_seed,
                            oracle_seed=args.oracle_seed,
                            outdir=out, max_episodes=args.max_episodes)
    session = run["session"]
    for row in session.history:
        print(f"episode {row['episode']}: drop {row['drop_fraction']:.3f} "
              f"mean C_tar {row['mean_target_cost']:.4f}")
    print(f"status {session.status}")
    print(f"final mean target cost {run['final_mean_target_cost']:.4f}")
    print(f"direct-training baseline {run['baseline_mean_target_cost']:.4f}")
    print(f"artifacts in {out}")


if __name__ == "__main__":
    main()

#!/usr/bin/env python3
"""Emulated transfer on the tabular two-goal fixture.

Prints per-episode drop fraction and mean target cost, plus the exact
target-Boltzmann baseline, and saves artifacts.
"""

import argparse

from preftransfer.experiments import twogoal_transfer


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--master-seed", type=int, default=11)
    ap.add_argument("--oracle-seed", type=int, default=5)
    ap.add_argument("--out", default="runs/twogoal")
    args = ap.parse_args()

    run = twogoal_transfer(master_seed=args.master_seed,
                           oracle_seed=args.oracle_seed, outdir=args.out)
    session = run["session"]
    for row in session.history:
        print(f"episode {row['episode']}: drop {row['drop_fraction']:.3f} "
              f"mean C_tar {row['mean_target_cost']:.4f} "
              f"queries {row['query_count']}")
    print(f"status {session.status}")
    print(f"exact target baseline {run['baseline_mean_target_cost']:.4f}")
    print(f"artifacts in {args.out}")


if __name__ == "__main__":
    main()

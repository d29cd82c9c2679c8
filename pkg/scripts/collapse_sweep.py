"""Decay-rate sweep for reputation collapse under separating frameworks.

For a grid of commitment-kernel inflations epsilon, simulate the misspecified
learning dynamic with the normal type playing the static reply, fit the
exponential decay rate of the mean commitment posterior, and set it against
two information quantities: the realized per-period drift -D(rho_{a_l} || fhat)
(the almost-sure rate of each path's log-belief) and the separation value
(the worst-case evidence floor that makes the decay exponential at all).

Example:
    python3 scripts/collapse_sweep.py
    python3 scripts/collapse_sweep.py --epsilons 0.05 0.1 0.2 --runs 1000 --csv sweep.csv
"""

import argparse
import csv
import math
import sys

from repgame.beliefs import SimulationConfig, monte_carlo
from repgame.divergence import kl, separation_value
from repgame.game import Distribution
from repgame.scenarios import product_choice


def main(argv=None):
    ap = argparse.ArgumentParser(
        description="reputation-collapse decay rates across misspecification sizes")
    ap.add_argument("--p", type=float, default=0.6, help="good-signal rate of a_h")
    ap.add_argument("--q", type=float, default=0.3, help="good-signal rate of a_l")
    ap.add_argument("--epsilons", type=float, nargs="+",
                    default=[0.05, 0.10, 0.15, 0.25])
    ap.add_argument("--delta", type=float, default=0.95)
    ap.add_argument("--runs", type=int, default=300)
    ap.add_argument("--horizon", type=int, default=300)
    ap.add_argument("--seed", type=int, default=20260816)
    ap.add_argument("--csv", help="also write the table to this path")
    args = ap.parse_args(argv)

    header = ("epsilon", "separation", "drift", "fitted_slope",
              "disc_avg_mu", "mu_final")
    rows = []
    for eps in args.epsilons:
        game, fw = product_choice(args.p, args.q, eps)
        sep = separation_value(fw, game.rho).value
        a_l = Distribution(game.actions_long, [0.0, 1.0])
        # drift of the log posterior odds when play is a_l and the normal
        # model explains the data perfectly
        drift = -kl(game.rho.row("a_l"), fw.commitment_slice_dist("m0"))
        cfg = SimulationConfig(delta=args.delta, master_seed=args.seed,
                               runs=args.runs, horizon=args.horizon,
                               normal_strategy=a_l)
        summary, batch = monte_carlo(game, fw, cfg)
        slope = math.nan if summary.decay is None else summary.decay.slope
        rows.append((eps, sep, drift, slope, summary.disc_avg_mu,
                     float(batch.mu[:, -1].mean())))

    widths = [max(len(h), 12) for h in header]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        print("  ".join(f"{v:>{w}.6f}" for v, w in zip(row, widths)))
    print(f"\n{args.runs} runs x {args.horizon} periods per row, "
          f"delta={args.delta}, seed={args.seed}")
    print("per-path log-beliefs fall at the drift rate; the mean curve decays "
          "more slowly (lucky paths dominate it) but stays exponential "
          "whenever the separation value is positive")

    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            w.writerows(rows)
        print(f"wrote {args.csv}")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Estimate a negative box dimension by seeded Monte Carlo.

Runs the random-interval intersection experiment at increasing trial
counts, showing the fitted log-log slope converging to -1 and the
standard error shrinking like 1/sqrt(trials).

Usage: python scripts/box_dimension_ladder.py [--seed 42] [--max-trials 1000000]
"""

import argparse

from dimkit import spectral


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--window", type=float, default=1.0)
    parser.add_argument("--scale", type=float, default=2.0)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--max-trials", type=int, default=1_000_000)
    args = parser.parse_args()

    trials = 10_000
    print(f"{'trials':>10}  {'EN estimate':>12}  {'dimension':>10}  {'stderr':>8}")
    while trials <= args.max_trials:
        exp = spectral.BoxExperiment(
            window=args.window, scale=args.scale, trials=trials, seed=args.seed
        )
        en, slope, stderr = spectral.box_dimension_mc(exp)
        expected = spectral.expected_intersection(exp)
        print(f"{trials:>10}  {en:>12.6f}  {slope:>10.5f}  {stderr:>8.5f}")
        trials *= 10

    print(f"\nclosed-form intersection rate at the base scale: {expected:g}")
    print("expected dimension: -1 (one-dimensional intersection deficit)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

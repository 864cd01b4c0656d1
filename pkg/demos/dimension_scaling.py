"""Budget scaling with dimension: the practical payoff of curvature search.

On the n-dimensional single-saddle landscape the escape direction is one
fixed axis. A random ball perturbation has component ~ 1/sqrt(n) along it,
so perturbed descent needs more iterations as n grows (the sweep gives it
20 p^2 + 10 steps at n = 10^p and it still falls behind at p = 1). The
curvature search concentrates on the axis in O(log n) iterations, so a
linear-in-p budget (30 p) keeps its escape rate at 1 across the sweep.
"""

import sys

from saddlescape import run_dimension_scaling


def main():
    trials = int(sys.argv[1]) if len(sys.argv) > 1 else 50
    rows = run_dimension_scaling([1, 2, 3], trials=trials, seed=0)
    print(f"{'n':>6} {'nc steps':>9} {'nc rate':>8} {'pgd steps':>10} {'pgd rate':>9}")
    for r in rows:
        print(f"{r['n']:>6} {r['nc_steps']:>9} {r['nc_escape_rate']:>8.3f} "
              f"{r['pgd_steps']:>10} {r['pgd_escape_rate']:>9.3f}")


if __name__ == "__main__":
    main()

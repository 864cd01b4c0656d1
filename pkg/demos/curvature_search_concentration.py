"""How often does the gradient-only curvature search find the escape direction?

The search runs power iteration on I - H/ell using only gradient differences
around a probe sphere. Its derivation promises a direction e with
<e, H e> <= -sqrt(rho * eps) / 4 with probability at least 1 - delta0.
This script measures that rate directly on the quartic two-well landscape
and checks the independent finite-difference certificate on every draw.
"""

import math

import numpy as np

from saddlescape import (
    RngStream,
    SmoothnessSpec,
    derive_nc_params,
    fd_quadform,
    get_landscape,
    nc_find,
)

EPS = 0.04
DELTA0 = 0.1
TRIALS = 500


def main():
    land = get_landscape("quartic")
    saddle = land.saddles[0]
    spec = SmoothnessSpec(saddle.ell_local, saddle.rho_local)
    params = derive_nc_params(spec, EPS, DELTA0, land.dim)
    gate = -math.sqrt(saddle.rho_local * EPS) / 4.0

    print(f"landscape     {land.id}, saddle at {saddle.point}, "
          f"lambda_min = {saddle.lambda_min}")
    print(f"derived       steps = {params.steps}, probe radius = {params.radius:.3e}")
    print(f"certificate   <e, H e> <= {gate:.4f}")

    certified = 0
    alignments = []
    for trial in range(TRIALS):
        out = nc_find(land.oracle, saddle.point, params, RngStream(0, trial))
        quad = fd_quadform(land.oracle, saddle.point, out.e_hat)
        certified += quad <= gate
        alignments.append(abs(float(out.e_hat @ saddle.direction)))

    alignments = np.array(alignments)
    print(f"\ncertified     {certified}/{TRIALS} "
          f"({certified / TRIALS:.3f}, promised >= {1 - DELTA0:.2f})")
    print(f"|cos| to true direction: median {np.median(alignments):.6f}, "
          f"min {alignments.min():.6f}")

    edges = np.linspace(0.0, 1.0, 11)
    counts, _ = np.histogram(alignments, bins=edges)
    print("\nalignment histogram")
    for lo, c in zip(edges[:-1], counts):
        print(f"  {lo:.1f}-{lo + 0.1:.1f}  {'#' * int(round(60 * c / TRIALS))}{c:>5d}")


if __name__ == "__main__":
    main()

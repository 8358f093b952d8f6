"""Eigenvalue tunneling through a two-ball medium.

Finds the eigenvalues of the first inside interval along the axis through
both centers, then checks that each one keeps the interface determinant
small at every crossing radius, while midpoints between eigenvalues fail
at the first interface.
"""

import argparse
import time
import warnings

import numpy as np

from itep import (
    MediumField,
    SearchRectangle,
    SimpleDomain,
    intersect_ray,
    interval_eigenvalues,
    propagate,
    ray_intervals,
    restrict_to_ray,
)
from itep.medium import NonUnitOriginIndexWarning


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n0", type=float, default=2.25)
    ap.add_argument("--k-max", type=float, default=20.0)
    args = ap.parse_args()

    warnings.simplefilter("ignore", NonUnitOriginIndexWarning)
    balls = [([2.0, 0.0, 0.0], 1.0), ([5.0, 0.0, 0.0], 1.0)]
    dom = SimpleDomain.from_balls(balls)
    fld = MediumField.union_of_balls([(c, r, args.n0) for c, r in balls])
    d = np.array([1.0, 0.0, 0.0])
    ix = intersect_ray(dom, d)
    prof = restrict_to_ray(fld, d)
    print("crossing radii:", ix.radii)

    first_inside = next(iv for iv in ray_intervals(ix) if iv.inside)
    rect = SearchRectangle(0.5, args.k_max, -0.25, 0.25)
    t0 = time.time()
    recs = interval_eigenvalues(0, prof, first_inside, rect)
    print(f"interval [{first_inside.r_lo}, {first_inside.r_hi}] "
          f"eigenvalues ({time.time() - t0:.1f}s):")
    for rec in recs:
        chain = propagate(0, rec.k, prof, ix)
        res = " ".join(f"{x:.1e}" for x in chain.interface_residuals)
        print(f"  k = {rec.k:.10f}  mult = {rec.multiplicity}  "
              f"residuals = [{res}]  {chain.verdict}")

    print("midpoint probes:")
    for a, b in zip(recs, recs[1:]):
        mid = 0.5 * (a.k + b.k)
        chain = propagate(0, mid, prof, ix)
        worst = max(chain.interface_residuals)
        print(f"  k = {mid:.4f}  worst residual = {worst:.2e}  {chain.verdict}")


if __name__ == "__main__":
    main()

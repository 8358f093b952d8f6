"""Zero-density check for a constant-index ball.

Counts determinant zeros in a thin sector up to increasing radii and
compares the slope of N(R) with the travel-time law (r + B(r)) / pi.
"""

import argparse
import math
import time
import warnings

import numpy as np

from itep import (
    MediumField,
    determinant_function,
    density_estimate,
    restrict_to_ray,
    travel_time,
)
from itep.medium import NonUnitOriginIndexWarning


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n0", type=float, default=4.0)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--l", type=int, default=0)
    ap.add_argument("--radii", type=float, nargs="+",
                    default=[50.0, 100.0, 150.0, 200.0])
    ap.add_argument("--eps", type=float, default=0.1,
                    help="sector half angle around the real axis")
    args = ap.parse_args()

    warnings.simplefilter("ignore", NonUnitOriginIndexWarning)
    fld = MediumField.uniform_ball([0.0, 0.0, 0.0], args.radius, args.n0)
    prof = restrict_to_ray(fld, np.array([0.0, 0.0, 1.0]))
    df = determinant_function(args.l, prof, args.radius)
    theoretical = (args.radius + travel_time(prof, args.radius)) / math.pi

    t0 = time.time()
    report = density_estimate(df, -args.eps, args.eps, args.radii, theoretical)
    for R, N in zip(report.radii, report.counts):
        print(f"R = {R:7.1f}  N(R) = {N:5d}  N/R = {N / R:.5f}")
    print(f"slope       = {report.slope:.5f}")
    print(f"theoretical = {theoretical:.5f}  ((r + B)/pi)")
    print(f"deviation   = {100 * report.relative_deviation:.2f}%")
    print(f"elapsed     = {time.time() - t0:.1f}s")


if __name__ == "__main__":
    main()

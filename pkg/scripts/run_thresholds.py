#!/usr/bin/env python3
"""Critical-wavenumber curves over temperature, plus the headline numbers.

Writes the sweep CSV and prints the repulsive peak (location/value), the
critical box size 1/sup, and the cold-limit coefficient of the attractive
curve.  Equivalent CSV: `rvpmodes threshold --theta-min ... -o ...`.
"""

import argparse
import math

import numpy as np
from scipy.optimize import minimize_scalar

from rvpmodes.cli import main as cli_main
from rvpmodes.equilibria import juttner
from rvpmodes.spectral import threshold_astro, threshold_plasma


def run(theta_min, theta_max, n_points, out):
    rc = cli_main(["threshold", "--theta-min", str(theta_min),
                   "--theta-max", str(theta_max),
                   "--n-points", str(n_points), "-o", out])
    if rc != 0:
        raise SystemExit(rc)

    res = minimize_scalar(
        lambda th: -math.sqrt(threshold_plasma(juttner(th)).kappa_crit_sq),
        bounds=(0.05, 1.0), method="bounded", options={"xatol": 1e-8})
    peak_theta, peak = res.x, -res.fun
    print(f"repulsive peak: kappa_crit = {peak:.6f} at theta = "
          f"{peak_theta:.4f}")
    print(f"critical box size 1/sup = {1.0 / peak:.4f}")

    import warnings
    thetas = np.logspace(-4, -2, 20)
    with warnings.catch_warnings():
        # the cold-regime flag is expected on this asymptote scan
        warnings.simplefilter("ignore", UserWarning)
        ks = [math.sqrt(threshold_astro(juttner(t)).kappa_crit_sq)
              for t in thetas]
    c_fit = math.exp(float(np.mean(np.log(ks) + 0.5 * np.log(thetas))))
    print(f"attractive cold asymptote: kappa_crit ~ {c_fit:.5f}/sqrt(theta)"
          f"   (1/sqrt(pi) = {1.0 / math.sqrt(math.pi):.5f})")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta-min", type=float, default=0.01)
    ap.add_argument("--theta-max", type=float, default=10.0)
    ap.add_argument("--n-points", type=int, default=200)
    ap.add_argument("-o", "--output", default="thresholds.csv")
    a = ap.parse_args()
    run(a.theta_min, a.theta_max, a.n_points, a.output)

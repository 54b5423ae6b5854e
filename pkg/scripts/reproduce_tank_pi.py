"""PI loop on the chemical tank under the two-level tracking reference.

Usage: python3 scripts/reproduce_tank_pi.py [--out-dir out/tank-pi]
"""

import argparse

import numpy as np

from tds.demos import run_tank_pi


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/tank-pi")
    ap.add_argument("--dt", type=float, default=0.1)
    args = ap.parse_args()
    res = run_tank_pi(args.out_dir, args.dt)
    run = res["run"]
    for t0, t1 in ((0, 1000), (1000, 2000)):
        sel = (run.t >= t0) & (run.t < t1)
        y = run.y[sel]
        print(f"[{t0}, {t1}) s: setpoint {run.ref[sel][0]:.0f}, max y {y.max():.4f}, "
              f"final y {y[-1]:.4f}")
    for k, v in res["summary"].items():
        print(f"{k}: {v}")
    print(f"local maxima times: {run.t[1:-1][(np.diff(run.y)[:-1] > 0) & (np.diff(run.y)[1:] <= 0)]}")


if __name__ == "__main__":
    main()

"""Smith predictor study: bandwidth, margin table and tracking runs.

Usage: python3 scripts/reproduce_smith.py [--out-dir out/smith]
"""

import argparse

from tds.demos import run_smith


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/smith")
    ap.add_argument("--dt", type=float, default=0.1)
    args = ap.parse_args()
    res = run_smith(args.out_dir, args.dt)
    print("plant      bandwidth    gm        pm (deg)")
    for name, bw, rep in zip(("P", "P1", "P2"), res["bandwidth"], res["margins"]):
        print(f"{name:<10} {bw:.6f}   {rep.gm:.5f}   {rep.pm:.4f}")
    w = res["summary"]["worst_error_200_1000"]
    print(f"worst tracking error on [200, 1000] s: smith {w['smith']:.4f}, PI {w['pi']:.4f}")
    print(f"artifacts in {args.out_dir}")


if __name__ == "__main__":
    main()

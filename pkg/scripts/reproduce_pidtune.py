"""PID designs on the tank plant: exact-delay tuning at two crossovers and
tuning on the order-8 Padé model.

Usage: python3 scripts/reproduce_pidtune.py [--out-dir out/pidtune]
"""

import argparse

from tds.demos import run_pidtune


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="out/pidtune")
    ap.add_argument("--dt", type=float, default=0.1)
    args = ap.parse_args()
    res = run_pidtune(args.out_dir, args.dt)
    for name, rep in res["reports"].items():
        c = rep.controller
        print(f"{name:<6} wc={rep.crossover_frequency:.5f} pm={rep.phase_margin:.3f} "
              f"stable={rep.stable} kp={c.kp:.5g} ki={c.ki:.5g} kd={c.kd:.5g} tf={c.t_filter:.5g}")
    for name, m in res["metrics"].items():
        print(f"{name:<6} overshoot {m.overshoot_pct:.2f}%  rise {m.rise_time_s:.1f} s  "
              f"settling {m.settling_time_s:.1f} s")


if __name__ == "__main__":
    main()

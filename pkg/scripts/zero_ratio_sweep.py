"""Step metrics of the exact-delay PID design as the Ti/Td ratio varies.

The tuner fixes the remaining PID degree of freedom with Ti = ZERO_RATIO * Td.
This sweep shows how that choice moves overshoot, rise and settling time at
crossover 0.0067 rad/s.
"""

import argparse

from tds import cases, feedback, series, step_response, tune_pid
from tds import pid
from tds.sim import step_metrics


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ratios", type=float, nargs="+", default=[2.5, 3, 4, 5, 5.5, 6, 8])
    ap.add_argument("--wc", type=float, default=0.0067)
    args = ap.parse_args()
    P = cases.tank_plant()
    default = pid.ZERO_RATIO
    try:
        for r in args.ratios:
            pid.ZERO_RATIO = r
            rep = tune_pid(P, "PID", args.wc)
            m = step_metrics(step_response(feedback(series(rep.controller.to_glti(), P), 1.0), 2000.0, 0.5))
            print(f"Ti/Td={r:<4} pm={rep.phase_margin:.2f} overshoot={m.overshoot_pct:.2f}% "
                  f"rise={m.rise_time_s:.1f} s settling={m.settling_time_s:.1f} s")
    finally:
        pid.ZERO_RATIO = default


if __name__ == "__main__":
    main()

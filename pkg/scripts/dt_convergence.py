"""Simulation error of the tank step response against its closed form.

Compares a grid-aligned delay (94 s) with the nominal 93.9 s for a range of
step sizes.
"""

import numpy as np

from tds import simulate, tf


def main():
    for tau in (94.0, 93.9):
        P = tf(5.6, [40.2, 1.0], output_delay=tau)
        prev = None
        for dt in (4.0, 2.0, 1.0, 0.5, 0.25, 0.1):
            t = np.arange(int(round(600 / dt)) + 1) * dt
            y = simulate(P, np.ones_like(t), t).y[:, 0]
            exact = np.where(t >= tau, 5.6 * (1 - np.exp(-(t - tau) / 40.2)), 0.0)
            err = np.max(np.abs(y - exact))
            ratio = f"{prev / err:8.2f}" if prev else "        "
            print(f"tau={tau:<5} dt={dt:<5} max err={err:.3e} ratio={ratio}")
            prev = err


if __name__ == "__main__":
    main()

"""Chemical-tank case study: plant, PI loop, Smith predictor, PID designs."""

from __future__ import annotations

import numpy as np

from .interconnect import ModelArray, SumJunction, connect, feedback, series, stack
from .model import GltiModel, pure_delay, tf

TANK_GAIN = 5.6
TANK_TIME_CONSTANT = 40.2
TANK_DELAY = 93.9
PERTURBED = ((5.0, 38.0, 90.0), (6.0, 42.0, 100.0))


def tank_plant(gain=TANK_GAIN, time_constant=TANK_TIME_CONSTANT, delay=TANK_DELAY) -> GltiModel:
    """First-order lag with output dead time, signals ``u -> y``."""
    return tf(gain, [time_constant, 1.0], output_delay=delay,
              input_names=["u"], output_names=["y"])


def perturbed_plants() -> ModelArray:
    """Nominal plant followed by the two mismatched ones."""
    return stack(tank_plant(), *(tank_plant(k, T, d) for k, T, d in PERTURBED))


def pi_controller(K: float = 0.1, Ti: float = 100.0) -> GltiModel:
    """``K (1 + 1/(Ti s))``."""
    return K * (1 + tf(1.0, [Ti, 0.0]))


def pi_loop(plant: GltiModel | None = None) -> GltiModel:
    """Unity feedback around ``P * C_PI``."""
    plant = tank_plant() if plant is None else plant
    return feedback(series(pi_controller(), plant), 1.0)


def smith_blocks(plant=None) -> list:
    """Netlist of the Smith predictor; ``plant`` may be a :class:`ModelArray`."""
    plant = tank_plant() if plant is None else plant
    Gp = tf(TANK_GAIN, [TANK_TIME_CONSTANT, 1.0], input_names=["u"], output_names=["yp"])
    Dp = pure_delay(TANK_DELAY).with_names(["yp"], ["y1"])
    C = (0.5 * (1 + tf(1.0, [40.0, 0.0]))).with_names(["e"], ["u"])
    F = tf(1.0, [20.0, 1.0], input_names=["dy"], output_names=["dp"])
    sum1 = SumJunction((1, -1, -1), ("ysp", "yp", "dp"), "e")
    sum2 = SumJunction((1, -1), ("y", "y1"), "dy")
    return [plant, Gp, Dp, C, F, sum1, sum2]


def smith_loop(plant=None):
    """Closed loop ``ysp -> y`` of the Smith predictor."""
    return connect(smith_blocks(plant), ["ysp"], ["y"])


def tracking_time(dt: float = 0.1, t_end: float = 2000.0) -> np.ndarray:
    return np.arange(int(round(t_end / dt)) + 1) * dt

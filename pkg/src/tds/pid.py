"""PID tuning by single-frequency loop shaping on exact delay models.

At the crossover ``wc`` the controller must supply gain ``1/|P(j wc)|``
and the phase that puts the loop at ``-180 + pm_target``. For the PID
structure the remaining degree of freedom is fixed by the zero spacing
``Ti = 5.5 Td`` and a derivative filter ``Tf = Td / 10``; the achieved margin
and stability are then measured, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import DimensionError, ModelError, NoCrossingError
from .freq import auto_grid, bode_data, freq_response, freq_response_at, margins
from .interconnect import feedback, series
from .model import GltiModel, as_model, tf
from .spectral import Verdict, is_stable

FILTER_DIVISOR = 10.0
ZERO_RATIO = 5.5  # Ti / Td


@dataclass(frozen=True)
class PidController:
    """Parallel PID ``kp + ki/s + kd s/(t_filter s + 1)``."""

    kp: float
    ki: float = 0.0
    kd: float = 0.0
    t_filter: float = 0.0

    def __post_init__(self):
        if self.ki < 0 or self.kd < 0 or self.t_filter < 0:
            raise ModelError("ki, kd and t_filter must be nonnegative")
        if self.kd > 0 and self.t_filter == 0:
            raise ModelError("a derivative term needs t_filter > 0 to be proper")

    def evaluate(self, s: complex) -> complex:
        out = self.kp + 0j
        if self.ki:
            out += self.ki / s
        if self.kd:
            out += self.kd * s / (self.t_filter * s + 1)
        return out

    def to_glti(self) -> GltiModel:
        return pid_to_glti(self)


def pid_to_glti(c: PidController) -> GltiModel:
    """Delay-free model of the controller."""
    num = np.array([float(c.kp)])
    den = np.array([1.0])
    if c.ki:
        num, den = np.polyadd(np.polymul(num, [1.0, 0.0]), [c.ki]), np.polymul(den, [1.0, 0.0])
    if c.kd:
        filt = np.array([c.t_filter, 1.0])
        num = np.polyadd(np.polymul(num, filt), np.polymul([c.kd, 0.0], den))
        den = np.polymul(den, filt)
    return tf(num, den)


@dataclass(frozen=True)
class TuneReport:
    stable: bool
    crossover_frequency: float
    phase_margin: float
    controller: PidController
    verdict: str = "stable"

    def as_dict(self) -> dict:
        return {
            "stable": self.stable,
            "crossover_frequency": self.crossover_frequency,
            "phase_margin": self.phase_margin,
            "kp": self.controller.kp,
            "ki": self.controller.ki,
            "kd": self.controller.kd,
            "t_filter": self.controller.t_filter,
        }


def _require_siso(plant: GltiModel):
    if not plant.is_siso:
        raise DimensionError("PID tuning supports SISO plants only")


def default_crossover(plant, pm_target: float = 60.0) -> float:
    """Frequency where the plant phase reaches ``-(180 - pm_target) * 2/3`` degrees.

    For the default 60 degree target that is -80 degrees: the controller
    is then left with a modest lag to supply.
    """
    plant = as_model(plant)
    _require_siso(plant)
    if plant.n_states == 0 and plant.n_delays == 0:
        raise NoCrossingError("a static plant has no phase variation")
    target = -math.radians(180.0 - pm_target) * 2.0 / 3.0
    grid = auto_grid(plant, 1000)
    bd = bode_data(plant, grid)
    # continuous phase, anchored in (-pi, pi] at the lowest grid frequency
    rel = bd.phase[:, 0, 0]
    below = np.flatnonzero(rel <= target)
    if below.size == 0:
        raise NoCrossingError("plant phase never reaches the target level inside the band")
    i = int(below[0])
    if i == 0:
        return float(grid[0])
    v0 = complex(bd.values[i - 1, 0, 0])

    def f(w):
        v = complex(freq_response(plant, [w])[0, 0, 0])
        return rel[i - 1] + math.atan2((v / v0).imag, (v / v0).real) - target

    return float(brentq(f, grid[i - 1], grid[i], xtol=1e-14))


def _pid_shape(x: float, w: float) -> complex:
    # C / kp with ki = x kp w, Td = Ti / ZERO_RATIO, Tf = Td / FILTER_DIVISOR
    td = 1.0 / (ZERO_RATIO * x * w)
    s = 1j * w
    return 1.0 + x * w / s + td * s / (td / FILTER_DIVISOR * s + 1.0)


def _solve_pid(phi: float, w: float) -> float:
    """Integral ratio ``x = ki/(kp w)`` giving controller phase ``phi``."""
    def phase(logx):
        return float(np.angle(_pid_shape(math.exp(logx), w)))

    # phase rises from 0 (x -> 0), peaks, then falls to -90 deg (x -> inf)
    peak = minimize_scalar(lambda lx: -phase(lx), bounds=(-12.0, 4.0), method="bounded")
    lx_peak, max_lead = peak.x, -peak.fun
    if not (-math.pi / 2 < phi < max_lead):
        raise ValueError(f"required controller phase {math.degrees(phi):.2f} deg is outside "
                         f"the PID range (-90, {math.degrees(max_lead):.2f}) deg")
    right = lx_peak
    while phase(right) > phi and right < 60:
        right += 2.0
    return math.exp(brentq(lambda lx: phase(lx) - phi, lx_peak, right, xtol=1e-14))


def tune_pid(plant, kind: str = "PID", wc: float | None = None,
             pm_target: float = 60.0) -> TuneReport:
    """Tune a P, PI or PID controller for crossover ``wc`` and phase margin ``pm_target``.

    Raises ``ValueError`` when the required controller phase is out of the
    structure's reach. An unstable closed loop is reported, not raised.
    """
    plant = as_model(plant)
    _require_siso(plant)
    kind = kind.upper()
    if kind not in ("P", "PI", "PID"):
        raise ValueError(f"unknown controller type {kind!r}")
    open_loop = is_stable(plant)
    if open_loop == Verdict.UNSTABLE:
        raise ValueError("open-loop unstable plants are not supported")
    if wc is None:
        wc = default_crossover(plant, pm_target)
    pw = complex(freq_response_at(plant, wc)[0, 0])
    if pw == 0:
        raise NoCrossingError("plant response vanishes at the crossover frequency")
    phi = math.radians(-180.0 + pm_target) - math.atan2(pw.imag, pw.real)
    phi = (phi + math.pi) % (2 * math.pi) - math.pi
    gain = 1.0 / abs(pw)

    if kind == "P":
        ctrl = PidController(kp=gain)
    elif kind == "PI":
        if not (-math.pi / 2 < phi <= 1e-12):
            raise ValueError(f"required controller phase {math.degrees(phi):.2f} deg "
                             "is outside the PI range (-90, 0] deg")
        phi = min(phi, 0.0)
        ctrl = PidController(kp=gain * math.cos(phi), ki=-gain * math.sin(phi) * wc)
    else:
        x = _solve_pid(phi, wc)
        kp = gain / abs(_pid_shape(x, wc))
        td = 1.0 / (ZERO_RATIO * x * wc)
        ctrl = PidController(kp=kp, ki=x * kp * wc, kd=kp * td, t_filter=td / FILTER_DIVISOR)

    return evaluate_design(plant, ctrl, wc)


def evaluate_design(plant: GltiModel, ctrl: PidController, wc_hint: float) -> TuneReport:
    """Measure crossover, phase margin and closed-loop stability of ``ctrl`` on ``plant``."""
    loop = series(ctrl.to_glti(), plant)
    rep = margins(loop)
    crossings = [(w, pm) for w, pm in rep.phase_margins if w > 0]
    if crossings:
        w_gc, pm = min(crossings, key=lambda e: abs(math.log(e[0] / wc_hint)))
    else:
        w_gc, pm = math.nan, math.nan
    verdict = is_stable(feedback(loop, 1.0))
    return TuneReport(verdict == Verdict.STABLE, float(w_gc), float(pm), ctrl, verdict.value)

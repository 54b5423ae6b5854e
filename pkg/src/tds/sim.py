"""Fixed-step simulation of delay models.

The rational part is integrated with classical RK4. Each delay channel
reads ``w_k(t) = z_k(t - tau_k)`` from the stored trajectories: the part of
``z`` driven by the state is interpolated with 4-point Lagrange weights, the
held-input part ``D21 u`` is looked up exactly. Since every delay is at
least four steps long, all samples needed by an RK4 step are already known. Inputs are held
constant between samples and the system starts from rest (``x = 0`` and
``z = 0`` for ``t < 0``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ModelError, NumericalError
from .interconnect import ModelArray
from .model import GltiModel, as_model, normalize


@dataclass(frozen=True)
class SimulationResult:
    t: np.ndarray
    u: np.ndarray          # (len(t), n_inputs)
    y: np.ndarray          # (len(t), n_outputs)
    z_history: np.ndarray  # (len(t), n_channels), delay-channel taps

    @property
    def dt(self) -> float:
        return float(self.t[1] - self.t[0]) if self.t.size > 1 else 0.0


def default_dt(m: GltiModel) -> float:
    """``min(min(tau)/20, T_dom/100)``; ``T_dom`` is the slowest stable time constant."""
    m = normalize(as_model(m))
    cands = []
    if m.n_delays:
        cands.append(float(np.min(m.tau)) / 20)
    if m.n_states:
        re = np.abs(np.real(np.linalg.eigvals(m.A)))
        re = re[re > 1e-12]
        if re.size:
            cands.append((1.0 / float(np.min(re))) / 100)
    return min(cands) if cands else 0.01


def _lagrange_weights(frac: np.ndarray) -> np.ndarray:
    # cubic Lagrange on nodes -1, 0, 1, 2 evaluated at frac in [0, 1)
    f = frac
    return np.stack([
        -f * (f - 1) * (f - 2) / 6,
        (f + 1) * (f - 1) * (f - 2) / 2,
        -(f + 1) * f * (f - 2) / 2,
        (f + 1) * f * (f - 1) / 6,
    ], axis=-1)


class _DelayTap:
    """Reads ``w_k(t) = z_k(t - tau_k)`` off the stored trajectories.

    ``z = zc + D21 u`` is split into ``zc = C2 x + D22 w``, interpolated
    from its samples, and the held input term, looked up exactly. Cubic
    interpolation across the input's jumps would otherwise smear them.
    """

    def __init__(self, delays: np.ndarray, dt: float, zc_hist: np.ndarray,
                 u_hist: np.ndarray, D21: np.ndarray):
        self.delays = delays
        self.dt = dt
        self.zc = zc_hist
        self.u = u_hist
        self.D21 = D21
        self.cols = np.arange(delays.size)
        self.feed = bool(np.any(D21))

    def __call__(self, t: float) -> np.ndarray:
        if self.delays.size == 0:
            return np.zeros(0)
        pos = (t - self.delays) / self.dt
        out = np.zeros(self.delays.size)
        near = np.rint(pos)
        on_node = np.abs(pos - near) < 1e-9
        idx = near.astype(np.int64)
        hit = on_node & (idx >= 0)
        out[hit] = self.zc[idx[hit], self.cols[hit]]
        # zero-padded history: stencils straddling t = 0 read zeros below it
        off = ~on_node & (pos > -2)
        if np.any(off):
            j = np.floor(pos[off]).astype(np.int64)
            w = _lagrange_weights(pos[off] - j)
            nodes = j[:, None] + np.arange(-1, 3)
            cols = self.cols[off][:, None]
            vals = np.where(nodes >= 0, self.zc[np.clip(nodes, 0, None), cols], 0.0)
            out[off] = np.sum(w * vals, axis=1)
        if self.feed:
            # zero-order hold: sample index of the delayed time
            k = np.where(on_node, idx, np.floor(pos).astype(np.int64))
            live = k >= 0
            if np.any(live):
                out[live] += np.einsum("km,km->k", self.D21[live], self.u[k[live]])
        return out


def simulate(m: GltiModel, u, t) -> SimulationResult:
    """Response of ``m`` to samples ``u`` on the uniform time grid ``t``.

    ``u`` has shape ``(len(t),)`` or ``(len(t), n_inputs)``. The step size
    is the grid spacing and must not exceed a quarter of the shortest delay.
    """
    m = normalize(as_model(m))
    t = np.asarray(t, dtype=float)
    if t.ndim != 1 or t.size < 2:
        raise ModelError("time grid needs at least two samples")
    dt = float(t[1] - t[0])
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12 * max(1.0, abs(t[-1]))):
        raise ModelError("time grid must be uniform and ascending")
    u = np.asarray(u, dtype=float)
    if u.ndim == 1:
        u = u[:, None]
    if u.shape != (t.size, m.n_inputs):
        raise ModelError(f"input has shape {u.shape}, expected ({t.size}, {m.n_inputs})")
    ch = m.channel_delays()
    if ch.size and dt > float(np.min(ch)) / 4 * (1 + 1e-12):
        raise NumericalError(f"dt={dt} exceeds min(tau)/4={float(np.min(ch)) / 4}")

    A, B1, B2, C1, C2 = m.A, m.B1, m.B2, m.C1, m.C2
    D11, D12, D21, D22 = m.D11, m.D12, m.D21, m.D22
    n, k = m.n_states, t.size
    t0 = t[0]
    x = np.zeros(n)
    zc_hist = np.zeros((k, ch.size))
    z_hist = np.zeros((k, ch.size))
    y = np.zeros((k, m.n_outputs))
    tap = _DelayTap(ch, dt, zc_hist, u, D21)

    def deriv(xs, uk, tt):
        return A @ xs + B1 @ uk + B2 @ tap(tt)

    for i in range(k):
        # local time from the start of the grid; history before 0 is zero
        ti = i * dt
        w = tap(ti)
        zc_hist[i] = C2 @ x + D22 @ w
        z_hist[i] = zc_hist[i] + D21 @ u[i]
        y[i] = C1 @ x + D11 @ u[i] + D12 @ w
        if i == k - 1 or n == 0:
            continue
        uk = u[i]
        k1 = deriv(x, uk, ti)
        k2 = deriv(x + 0.5 * dt * k1, uk, ti + 0.5 * dt)
        k3 = deriv(x + 0.5 * dt * k2, uk, ti + 0.5 * dt)
        k4 = deriv(x + dt * k3, uk, ti + dt)
        x = x + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(y)):
        raise NumericalError("simulation diverged to non-finite values")
    return SimulationResult(t, u, y, z_hist)


def lsim(m, u, t):
    """:func:`simulate` mapped over a :class:`ModelArray` when given one."""
    if isinstance(m, ModelArray):
        return [simulate(g, u, t) for g in m]
    return simulate(m, u, t)


def step_response(m, t_final: float, dt: float | None = None):
    """Unit-step response from rest on ``[0, t_final]``."""
    if isinstance(m, ModelArray):
        return [step_response(g, t_final, dt) for g in m]
    m = as_model(m)
    dt = default_dt(m) if dt is None else dt
    steps = int(round(t_final / dt))
    t = np.arange(steps + 1) * dt
    return simulate(m, np.ones((t.size, m.n_inputs)), t)


def tank_tracking_reference(t) -> np.ndarray:
    """Setpoint 4 on ``[0, 1000)`` and 8 on ``[1000, 2000]``."""
    t = np.asarray(t, dtype=float)
    return ((t >= 0) & (t < 1000)) * 4.0 + ((t >= 1000) & (t <= 2000)) * 8.0


@dataclass(frozen=True)
class StepMetrics:
    """Transient characteristics; NaN fields mean "undefined"."""

    overshoot_pct: float
    rise_time_s: float
    settling_time_s: float
    peak: float
    peak_time_s: float
    final_value: float
    settled: bool

    def as_dict(self) -> dict:
        return {
            "overshoot_pct": self.overshoot_pct, "rise_time_s": self.rise_time_s,
            "settling_time_s": self.settling_time_s, "peak": self.peak,
            "peak_time_s": self.peak_time_s, "final_value": self.final_value,
            "settled": self.settled,
        }


def _first_crossing(t: np.ndarray, y: np.ndarray, level: float) -> float:
    above = np.flatnonzero(y >= level)
    if above.size == 0:
        return math.nan
    i = int(above[0])
    if i == 0:
        return float(t[0])
    y0, y1 = y[i - 1], y[i]
    return float(t[i - 1] + (level - y0) / (y1 - y0) * (t[i] - t[i - 1]))


def step_metrics(r: SimulationResult, settle_band: float = 0.02,
                 tail_fraction: float = 0.05) -> StepMetrics:
    """Overshoot, 10-90% rise time, settling time and peak of a step response.

    The final value is the mean of the last ``tail_fraction`` of samples. If
    the tail still wanders outside the settling band, every metric except
    the peak is NaN and ``settled`` is False.
    """
    if r.y.shape[1] != 1:
        raise ModelError("step_metrics needs a single-output result")
    t, y = r.t, r.y[:, 0]
    n_tail = max(2, int(round(tail_fraction * y.size)))
    tail = y[-n_tail:]
    final = float(np.mean(tail))
    ip = int(np.argmax(y * np.sign(final))) if final != 0 else int(np.argmax(np.abs(y)))
    peak, t_peak = float(y[ip]), float(t[ip])
    if final == 0 or np.max(np.abs(tail - final)) > settle_band * abs(final):
        nan = math.nan
        return StepMetrics(nan, nan, nan, peak, t_peak, final, False)
    s = np.sign(final)
    ys, fs = y * s, abs(final)
    overshoot = max(0.0, (ys[ip] - fs) / fs * 100)
    rise = _first_crossing(t, ys, 0.9 * fs) - _first_crossing(t, ys, 0.1 * fs)
    outside = np.flatnonzero(np.abs(ys - fs) > settle_band * fs)
    if outside.size == 0:
        settling = float(t[0])
    else:
        i = int(outside[-1])
        if i + 1 < t.size:
            # interpolate the exit through the band edge
            e0, e1 = abs(ys[i] - fs), abs(ys[i + 1] - fs)
            band = settle_band * fs
            settling = float(t[i] + (e0 - band) / (e0 - e1) * (t[i + 1] - t[i])) if e0 != e1 else float(t[i + 1])
        else:
            settling = float(t[i])
    return StepMetrics(float(overshoot), float(rise), settling, peak, t_peak, final, True)

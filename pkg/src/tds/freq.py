"""Frequency-domain analysis of delay models.

Responses are evaluated exactly: the rational part by a linear solve with
``(jw I - A)``, then the delay bank ``Diag(e^{-jw tau})`` is closed with
:func:`lft_eval` semantics. Nothing is approximated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DimensionError, IllPosedError, NoCrossingError
from .interconnect import ModelArray
from .model import GltiModel, as_model, close_delays, normalize

_SINGULAR_COND = 1e14


def _map_array(fn):
    def wrapper(m, *args, **kwargs):
        if isinstance(m, ModelArray):
            return [fn(g, *args, **kwargs) for g in m]
        return fn(as_model(m), *args, **kwargs)
    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    wrapper.__wrapped__ = fn
    return wrapper


@_map_array
def freq_response(m: GltiModel, omega, *, strict: bool = False) -> np.ndarray:
    """Response at every ``omega`` as an array of shape ``(len(omega), p, m)``.

    Points where ``jw`` is a pole or the delay loop is singular come back as
    NaN unless ``strict`` is set, in which case :class:`IllPosedError` is
    raised.
    """
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    return _response_s(m, 1j * omega, strict=strict)


def _response_s(m: GltiModel, s: np.ndarray, strict: bool = False) -> np.ndarray:
    A, B, C, D = m.plant()
    n, (p, nu), q = m.n_states, m.shape, m.n_channels
    k = s.size
    bad = np.zeros(k, dtype=bool)
    if n:
        M = s[:, None, None] * np.eye(n) - A
        cond = np.linalg.cond(M)
        bad |= ~np.isfinite(cond) | (cond > _SINGULAR_COND)
        M[bad] = np.eye(n)
        H = D + C @ np.linalg.solve(M, np.broadcast_to(B, (k,) + B.shape))
    else:
        H = np.broadcast_to(D.astype(complex), (k,) + D.shape).copy()
    if q:
        theta = np.exp(-np.outer(s, m.channel_delays()))
        H11, H12, H21, H22 = H[:, :p, :nu], H[:, :p, nu:], H[:, p:, :nu], H[:, p:, nu:]
        lhs = np.eye(q) - H22 * theta[:, None, :]
        cond = np.linalg.cond(lhs)
        bad_loop = ~np.isfinite(cond) | (cond > _SINGULAR_COND)
        bad |= bad_loop
        lhs[bad] = np.eye(q)
        out = H11 + (H12 * theta[:, None, :]) @ np.linalg.solve(lhs, H21)
    else:
        out = H[:, :p, :nu]
    if bad.any():
        if strict:
            raise IllPosedError(f"response undefined at s={s[bad][0]}")
        out = out.copy()
        out[bad] = np.nan
    return out


def freq_response_at(m: GltiModel, omega: float) -> np.ndarray:
    """``H(j omega)`` as a ``p x m`` complex matrix.

    Raises :class:`IllPosedError` at a pole or a singular delay loop.
    """
    return _response_s(as_model(m), np.array([1j * float(omega)]), strict=True)[0]


def _features(m: GltiModel) -> list[float]:
    feats = []
    if m.n_states:
        ev = np.linalg.eigvals(m.A)
        feats.extend(abs(v) for v in ev if abs(v) > 1e-12)
        feats.extend(_zero_magnitudes(m))
    feats.extend(2 * math.pi / t for t in m.tau if t > 0)
    return [f for f in feats if np.isfinite(f)]


def _zero_magnitudes(m: GltiModel) -> list[float]:
    # invariant zeros of the delay-free channel (A, B1, C1, D11), SISO only
    if not m.is_siso:
        return []
    from scipy.linalg import eigvals
    n = m.n_states
    pencil_a = np.block([[m.A, m.B1], [m.C1, m.D11]])
    pencil_b = np.zeros_like(pencil_a)
    pencil_b[:n, :n] = np.eye(n)
    with np.errstate(all="ignore"):
        z = eigvals(pencil_a, pencil_b)
    return [abs(v) for v in z if np.isfinite(v) and abs(v) > 1e-12]


def frequency_band(m: GltiModel) -> tuple[float, float]:
    """Band ``[0.01 * smallest feature, 100 * largest feature]``.

    Features are nonzero pole/zero magnitudes of the rational part and
    ``2 pi / tau`` for every delay. Static models get ``[1e-2, 1e2]``.
    """
    feats = _features(m)
    if not feats:
        return 1e-2, 1e2
    return 0.01 * min(feats), 100.0 * max(feats)


def auto_grid(m: GltiModel, n_points: int = 500) -> np.ndarray:
    """Logarithmic grid over :func:`frequency_band` with ``n_points`` entries.

    The delay scales ``2 pi / tau`` are inserted as exact grid points.
    """
    m = as_model(m)
    lo, hi = frequency_band(m)
    extra = sorted({2 * math.pi / t for t in m.tau if t > 0 and lo < 2 * math.pi / t < hi})
    extra = extra[: max(n_points - 2, 0)]
    base = np.logspace(math.log10(lo), math.log10(hi), n_points - len(extra))
    grid = np.union1d(base, extra)
    while grid.size < n_points:
        # an inserted point landed on a base point; refill the widest log gap
        gaps = np.diff(np.log(grid))
        i = int(np.argmax(gaps))
        grid = np.insert(grid, i + 1, math.sqrt(grid[i] * grid[i + 1]))
    return grid


@dataclass(frozen=True)
class FrequencyResponse:
    """Complex response samples on an ascending grid."""

    omega: np.ndarray
    values: np.ndarray
    shape: tuple[int, int]
    phase: np.ndarray | None = field(default=None, repr=False)

    @property
    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    @property
    def mag_db(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 20 * np.log10(self.magnitude)

    @property
    def phase_deg(self) -> np.ndarray:
        ph = self.phase if self.phase is not None else np.unwrap(np.angle(self.values), axis=0)
        return np.degrees(ph)


def _continuous_phase(m: GltiModel, omega: np.ndarray, values: np.ndarray,
                      max_step: float = math.pi / 4, max_depth: int = 16,
                      max_points: int = 1_000_000) -> np.ndarray:
    """Unwrapped phase, bisecting any interval where the phase moves too fast.

    Delay phase ``-w tau`` can wrap by a full turn between coarse samples
    without any visible jump, so each interval is first subdivided until
    the total delay rotates the phase by at most ``max_step / 2``.
    """
    k, p, nu = values.shape
    fine, idx = omega, np.arange(k)
    total = float(np.sum(m.channel_delays()))
    if total > 0 and k > 1:
        sub = np.ceil(np.diff(omega) * total / (max_step / 2)).astype(np.int64)
        sub = np.clip(sub, 1, None)
        if sub.sum() <= max_points:
            pieces = [np.linspace(a, b, n + 1)[:-1] for a, b, n in zip(omega[:-1], omega[1:], sub)]
            fine = np.concatenate(pieces + [omega[-1:]])
            idx = np.concatenate([[0], np.cumsum(sub)])
            fvals = freq_response(m, fine)
            fvals[idx] = values
            values = fvals
    kf = fine.size
    phase = np.empty((kf, p, nu))
    for i in range(p):
        for j in range(nu):
            def at(w):
                return _response_s(m, np.array([1j * w]))[0, i, j]

            ph = np.empty(kf)
            ph[0] = np.angle(values[0, i, j])
            for t in range(1, kf):
                ph[t] = ph[t - 1] + _phase_increment(at, fine[t - 1], fine[t],
                                                     values[t - 1, i, j], values[t, i, j],
                                                     max_step, max_depth)
            phase[:, i, j] = ph
    return phase[idx]


def _phase_increment(at, w0, w1, v0, v1, max_step, depth):
    if not (np.isfinite(v0) and np.isfinite(v1)) or v0 == 0 or v1 == 0:
        return 0.0 if not (np.isfinite(v0) and np.isfinite(v1)) else float(np.angle(v1 / v0))
    d = float(np.angle(v1 / v0))
    if abs(d) <= max_step or depth == 0:
        return d
    wm = 0.5 * (w0 + w1)
    vm = at(wm)
    return (_phase_increment(at, w0, wm, v0, vm, max_step, depth - 1)
            + _phase_increment(at, wm, w1, vm, v1, max_step, depth - 1))


@_map_array
def bode_data(m: GltiModel, omega=None, n_points: int = 500) -> FrequencyResponse:
    """Response with continuous (unwrapped) phase along the grid."""
    omega = auto_grid(m, n_points) if omega is None else np.asarray(omega, dtype=float)
    values = freq_response(m, omega)
    phase = _continuous_phase(m, omega, values)
    return FrequencyResponse(omega, values, m.shape, phase)


@_map_array
def nyquist_data(m: GltiModel, omega=None, n_points: int = 500) -> FrequencyResponse:
    """Raw complex response on ``omega`` (default :func:`auto_grid`)."""
    omega = auto_grid(m, n_points) if omega is None else np.asarray(omega, dtype=float)
    return FrequencyResponse(omega, freq_response(m, omega), m.shape)


@_map_array
def dcgain(m: GltiModel) -> np.ndarray:
    """Steady-state gain ``H(0)`` (every delay factor equals one at ``s = 0``).

    Entries driven by an integrator come back as ``inf``.
    """
    g = close_delays(m, 0.0)
    if g.n_states == 0:
        return g.D11.copy()
    if np.linalg.cond(g.A) < 1e12:
        return g.D11 - g.C1 @ np.linalg.solve(g.A, g.B1)
    # singular A: either a real integrator or an unobservable/uncontrollable mode
    h1 = freq_response(m, [1e-7])[0]
    h2 = freq_response(m, [1e-8])[0]
    out = np.real(h2).copy()
    grows = np.abs(h2) > 5 * np.abs(h1) + 1e-300
    out[grows] = np.inf
    return out


def _siso(m: GltiModel, what: str):
    if not m.is_siso:
        raise DimensionError(f"{what} needs a SISO model, got {m.shape}")


def search_grid(m: GltiModel, n_log: int = 2000, max_points: int = 400_000) -> np.ndarray:
    """Dense grid for crossing searches.

    Logarithmic over :func:`frequency_band`, plus a linear grid fine enough
    that no delay can rotate the phase by more than ~pi/8 between samples.
    """
    lo, hi = frequency_band(m)
    grid = np.logspace(math.log10(lo), math.log10(hi), n_log)
    total = float(np.sum(m.channel_delays()))
    if total > 0:
        step = math.pi / (8 * total)
        count = int(min((hi - lo) / step, max_points))
        grid = np.union1d(grid, np.linspace(lo, hi, count + 1))
    return grid


@_map_array
def bandwidth(m: GltiModel, rtol: float = 1e-6) -> float:
    """First frequency where the gain falls 3 dB below the DC gain."""
    _siso(m, "bandwidth")
    dc = float(np.abs(dcgain(m)[0, 0]))
    if not np.isfinite(dc) or dc == 0:
        raise NoCrossingError("bandwidth needs a finite nonzero DC gain")
    level = dc * 10 ** (-3 / 20)
    grid = search_grid(m)

    def f(w):
        return float(np.abs(freq_response(m, [w])[0, 0, 0])) - level

    mags = np.abs(freq_response(m, grid)[:, 0, 0])
    below = np.flatnonzero(mags < level)
    if below.size == 0:
        raise NoCrossingError("gain never drops 3 dB below DC inside the band")
    i = int(below[0])
    a = grid[i - 1] if i > 0 else 0.0
    return float(brentq(f, a, grid[i], xtol=1e-15, rtol=min(rtol, 1e-12), maxiter=200))


@dataclass(frozen=True)
class MarginReport:
    """Gain/phase crossings of a SISO loop.

    ``gain_margins`` holds ``(w_pc, gm)`` pairs and ``phase_margins`` holds
    ``(w_gc, pm_deg)`` pairs. ``gm``/``pm`` are the worst-case values, i.e.
    the gain margin closest to 1 in log scale and the phase margin of
    smallest magnitude; ``inf`` when there is no crossing.
    """

    gain_margins: tuple[tuple[float, float], ...]
    phase_margins: tuple[tuple[float, float], ...]
    gm: float
    gm_frequency: float
    pm: float
    pm_frequency: float
    search_band: tuple[float, float]
    truncated: bool

    @property
    def gm_min(self) -> tuple[float, float]:
        return self.gm_frequency, self.gm

    @property
    def pm_min(self) -> tuple[float, float]:
        return self.pm_frequency, self.pm


def _wrap_pm(phase_rad: float) -> float:
    pm = math.degrees(phase_rad) + 180.0
    pm = (pm + 180.0) % 360.0 - 180.0
    return 180.0 if pm == -180.0 else pm


@_map_array
def margins(m: GltiModel) -> MarginReport:
    """All gain/phase margins of ``m`` read as a loop transfer function.

    Crossings are located on :func:`search_grid` and refined with Brent's
    method. A unit DC gain counts as a gain crossover at ``w = 0`` with
    phase margin ``180 + phase(0+)``. Models with delays have infinitely
    many phase crossings; only those inside the band are listed and
    ``truncated`` is set.
    """
    _siso(m, "margins")
    lo, hi = frequency_band(m)
    grid = search_grid(m)
    L = freq_response(m, grid)[:, 0, 0]

    def resp(w):
        return complex(freq_response(m, [w])[0, 0, 0])

    gains: list[tuple[float, float]] = []
    phases: list[tuple[float, float]] = []

    dc = dcgain(m)[0, 0]
    if np.isfinite(dc):
        if abs(abs(dc) - 1.0) < 1e-9:
            phases.append((0.0, _wrap_pm(math.atan2(0.0, dc) if dc != 0 else 0.0)))
        if dc < 0:
            gains.append((0.0, 1.0 / abs(dc)))

    logmag = np.log(np.abs(L))
    im = L.imag
    ok = np.isfinite(L)
    for t in range(grid.size - 1):
        if not (ok[t] and ok[t + 1]):
            continue
        a, b = grid[t], grid[t + 1]
        if logmag[t] == 0.0:
            phases.append((a, _wrap_pm(np.angle(L[t]))))
        elif logmag[t] * logmag[t + 1] < 0:
            w = brentq(lambda x: math.log(abs(resp(x))), a, b, xtol=1e-15, rtol=1e-15)
            phases.append((w, _wrap_pm(np.angle(resp(w)))))
        if im[t] == 0.0 and L[t].real < 0:
            gains.append((a, 1.0 / abs(L[t])))
        elif im[t] * im[t + 1] < 0 and (L[t].real < 0 or L[t + 1].real < 0):
            w = brentq(lambda x: resp(x).imag, a, b, xtol=1e-15, rtol=1e-15)
            v = resp(w)
            if v.real < 0:
                gains.append((w, 1.0 / abs(v)))

    if gains:
        w_gm, gm = min(gains, key=lambda e: abs(math.log(e[1])))
    else:
        w_gm, gm = math.nan, math.inf
    if phases:
        w_pm, pm = min(phases, key=lambda e: abs(e[1]))
    else:
        w_pm, pm = math.nan, math.inf
    return MarginReport(tuple(gains), tuple(phases), float(gm), float(w_gm), float(pm),
                        float(w_pm), (lo, hi), bool(m.n_delays > 0))

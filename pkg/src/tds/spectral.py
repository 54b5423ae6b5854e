"""Padé approximation and characteristic roots of delay models.

Rightmost roots come from a Chebyshev collocation of the infinitesimal
generator of the retarded delay equation

    x'(t) = A x(t) + sum_k A_k x(t - tau_k),    A_k = B2_k C2_k

followed by Newton refinement on the exact characteristic matrix
``Delta(s) = s I - A - B2 Theta(s) C2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from math import factorial

import numpy as np
import scipy.linalg

from .errors import NeutralSystemError
from .interconnect import ModelArray, _route
from .model import GltiModel, as_model, normalize, ss


# -- Padé ------------------------------------------------------------------------

def pade_delay(tau: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal ``[order/order]`` Padé approximant of ``e^{-tau s}``.

    Returns ``(num, den)`` in descending powers of ``s``.
    """
    if tau < 0:
        raise ValueError("delay must be nonnegative")
    if order < 0:
        raise ValueError("order must be nonnegative")
    if tau == 0 or order == 0:
        return np.array([1.0]), np.array([1.0])
    n = order
    c = np.array([factorial(2 * n - k) * factorial(n)
                  / (factorial(2 * n) * factorial(k) * factorial(n - k)) for k in range(n + 1)])
    powers = tau ** np.arange(n + 1)
    num = (c * powers * (-1.0) ** np.arange(n + 1))[::-1]
    den = (c * powers)[::-1]
    return num / den[0], den / den[0]


def _pade_ss(tau: float, order: int, width: int) -> GltiModel:
    import scipy.signal
    num, den = pade_delay(tau, order)
    if num.size == 1:
        return ss(np.zeros((0, 0)), np.zeros((0, width)), np.zeros((width, 0)), np.eye(width))
    a, b, c, d = scipy.signal.tf2ss(num, den)
    I = np.eye(width)
    return ss(np.kron(I, a), np.kron(I, b), np.kron(I, c), np.kron(I, d))


def pade_model(m: GltiModel, order: int):
    """Replace every delay channel by its Padé realization (result has no delays)."""
    if isinstance(m, ModelArray):
        return ModelArray(tuple(pade_model(g, order) for g in m))
    m = normalize(as_model(m))
    if m.n_delays == 0:
        return m
    A, B, C, D = m.plant()
    rational = ss(A, B, C, D)
    subs = [_pade_ss(t, order, w) for t, w in zip(m.tau, m.delay_widths)]
    nu, ny, q = m.n_inputs, m.n_outputs, m.n_channels
    # blocks: [rational (inputs u,w; outputs y,z), pade_1, ..., pade_N]
    mu = nu + q + q
    py = ny + q + q
    K = np.zeros((mu, py))
    K[nu:nu + q, ny + q:] = np.eye(q)      # w <- pade outputs
    K[nu + q:, ny:ny + q] = np.eye(q)      # pade inputs <- z
    E = np.zeros((mu, nu))
    E[:nu] = np.eye(nu)
    S = np.zeros((ny, py))
    S[:, :ny] = np.eye(ny)
    out = _route([rational] + subs, K, E, S, m.input_names, m.output_names)
    return out


# -- spectrum --------------------------------------------------------------------

ROOT_TOL = 1e-8  # Newton step length accepted as a confirmed root


def cheb(N: int) -> tuple[np.ndarray, np.ndarray]:
    """Chebyshev points ``x_j = cos(pi j / N)`` and differentiation matrix."""
    if N == 0:
        return np.array([1.0]), np.zeros((1, 1))
    x = np.cos(np.pi * np.arange(N + 1) / N)
    c = np.hstack([2.0, np.ones(N - 1), 2.0]) * (-1.0) ** np.arange(N + 1)
    X = np.tile(x, (N + 1, 1)).T
    dX = X - X.T
    Dm = np.outer(c, 1.0 / c) / (dX + np.eye(N + 1))
    Dm -= np.diag(Dm.sum(axis=1))
    return x, Dm


def _barycentric_row(nodes: np.ndarray, x: float) -> np.ndarray:
    """Lagrange basis values at ``x`` for Chebyshev extreme points."""
    N = nodes.size - 1
    hit = np.flatnonzero(np.abs(nodes - x) < 1e-14)
    row = np.zeros(N + 1)
    if hit.size:
        row[hit[0]] = 1.0
        return row
    wts = (-1.0) ** np.arange(N + 1)
    wts[0] *= 0.5
    wts[-1] *= 0.5
    r = wts / (x - nodes)
    return r / r.sum()


def _delay_matrices(m: GltiModel) -> list[tuple[float, np.ndarray]]:
    terms = []
    start = 0
    for tau, w in zip(m.tau, m.delay_widths):
        Ak = m.B2[:, start:start + w] @ m.C2[start:start + w]
        terms.append((float(tau), Ak))
        start += w
    return terms


def generator_matrix(m: GltiModel, n_cheb: int) -> np.ndarray:
    """Collocation matrix of the infinitesimal generator on ``[-tau_max, 0]``.

    Rows for the interior and left nodes differentiate the state history;
    the block row at ``theta = 0`` imposes the delay equation itself.
    """
    n = m.n_states
    terms = _delay_matrices(m)
    tau_max = max(t for t, _ in terms)
    x, Dm = cheb(n_cheb)
    theta = (x - 1.0) * tau_max / 2.0     # x=1 -> 0, x=-1 -> -tau_max
    Dm = Dm * (2.0 / tau_max)
    big = np.kron(Dm, np.eye(n))
    row0 = np.zeros((n, n * (n_cheb + 1)))
    row0[:, :n] += m.A
    for tau, Ak in terms:
        ell = _barycentric_row(theta, -tau)
        row0 += np.kron(ell[None, :], Ak)
    big[:n] = row0
    return big


def char_matrix(m: GltiModel, s: complex) -> np.ndarray:
    """``Delta(s) = s I - A - B2 Theta(s) C2`` for a retarded model."""
    theta = np.exp(-m.channel_delays() * s)
    return s * np.eye(m.n_states) - m.A - (m.B2 * theta) @ m.C2


def _char_derivative(m: GltiModel, s: complex) -> np.ndarray:
    ch = m.channel_delays()
    return np.eye(m.n_states) + (m.B2 * (ch * np.exp(-ch * s))) @ m.C2


def newton_residual(m: GltiModel, s: complex) -> float:
    """Newton step length ``|det Delta / (d/ds det Delta)|`` at ``s``."""
    M = char_matrix(m, s)
    try:
        tr = np.trace(np.linalg.solve(M, _char_derivative(m, s)))
    except np.linalg.LinAlgError:
        return 0.0
    return float(abs(1.0 / tr)) if tr != 0 else math.inf


def newton_refine(m: GltiModel, s0: complex, tol: float = 1e-13, max_iter: int = 50):
    """Newton iteration on ``det Delta(s) = 0`` using ``d log det = tr(Delta^-1 Delta')``.

    Returns ``(root, residual)`` where the residual is the last Newton step
    length, i.e. ``|det Delta|`` normalized by its derivative.
    """
    s = complex(s0)
    step = math.inf
    for _ in range(max_iter):
        M = char_matrix(m, s)
        if np.linalg.cond(M) > 1e15:
            return s, 0.0
        tr = np.trace(np.linalg.solve(M, _char_derivative(m, s)))
        if tr == 0:
            break
        delta = 1.0 / tr
        s = s - delta
        step = abs(delta)
        if step < tol * max(1.0, abs(s)):
            break
    return s, newton_residual(m, s)


@dataclass(frozen=True)
class SpectrumResult:
    roots: np.ndarray
    n_cheb: int
    converged: bool
    rightmost_residual: float

    @property
    def abscissa(self) -> float:
        return float(np.max(self.roots.real)) if self.roots.size else -math.inf


def _check_retarded(m: GltiModel):
    if m.n_channels and np.any(m.D22 != 0):
        raise NeutralSystemError("delay-channel feedthrough D22 is nonzero; only retarded models are supported")


def _sorted_roots(vals: np.ndarray) -> np.ndarray:
    order = np.lexsort((-vals.imag, -vals.real))
    return vals[order]


def rightmost_roots(m: GltiModel, k: int = 10, tol: float = 1e-6,
                    n_start: int = 16, n_cap: int = 256) -> SpectrumResult:
    """``k`` rightmost characteristic roots of a retarded delay model.

    The collocation size doubles from ``n_start`` until the real part of
    the rightmost refined root moves by less than ``tol`` (capped at
    ``n_cap``; ``converged`` is False if the cap is hit first).
    """
    m = normalize(as_model(m))
    _check_retarded(m)
    if m.n_states == 0:
        return SpectrumResult(np.zeros(0, dtype=complex), 0, True, 0.0)
    if m.n_delays == 0:
        ev = _sorted_roots(np.linalg.eigvals(m.A))[:k]
        return SpectrumResult(ev, 0, True, 0.0)

    prev = None
    best = None
    n_cheb = n_start
    while True:
        ev = scipy.linalg.eigvals(generator_matrix(m, n_cheb))
        ev = ev[np.isfinite(ev)]
        cand = _sorted_roots(ev)[: max(2 * k, k + 4)]
        refined = []
        for z in cand:
            r, res = newton_refine(m, z)
            # keep Newton only if it stayed near the discretized eigenvalue;
            # candidates that do not refine are discretization artifacts
            if np.isfinite(r) and abs(r - z) <= 0.1 * max(1.0, abs(z)) and res < ROOT_TOL:
                refined.append(r)
        trusted = bool(refined)
        roots = _dedupe(np.array(refined)) if trusted else _dedupe(cand)
        roots = _sorted_roots(roots)[:k]
        lead = roots[0].real
        best = (roots, n_cheb, trusted)
        if trusted and prev is not None and abs(lead - prev) < tol:
            return SpectrumResult(roots, n_cheb, True, newton_residual(m, roots[0]))
        prev = lead
        if n_cheb >= n_cap:
            break
        n_cheb = min(2 * n_cheb, n_cap)
    roots, n_used, _ = best
    return SpectrumResult(roots, n_used, False, newton_residual(m, roots[0]))


def _dedupe(vals: np.ndarray, rtol: float = 1e-8) -> np.ndarray:
    out: list[complex] = []
    for v in vals:
        if all(abs(v - u) > rtol * max(1.0, abs(v)) for u in out):
            out.append(v)
    return np.array(out)


class Verdict(str, enum.Enum):
    STABLE = "stable"
    UNSTABLE = "unstable"
    UNDECIDED = "undecided"


def is_stable(m, tol_margin: float = 1e-8, **kwargs) -> Verdict:
    """Stability verdict from the rightmost characteristic root."""
    if isinstance(m, ModelArray):
        return [is_stable(g, tol_margin, **kwargs) for g in m]
    res = rightmost_roots(m, **kwargs)
    if res.roots.size == 0:
        return Verdict.STABLE
    a = res.abscissa
    if not res.converged or abs(a) <= tol_margin:
        return Verdict.UNDECIDED
    return Verdict.STABLE if a < -tol_margin else Verdict.UNSTABLE

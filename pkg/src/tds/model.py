"""Delay LTI models in LFT form.

A model is a delay-free state-space plant closed through a diagonal bank of
pure delays::

    dx/dt = A x  + B1 u   + B2 w
        y = C1 x + D11 u  + D12 w
        z = C2 x + D21 u  + D22 w
        w_k(t) = z_k(t - tau_k)

Delay channel ``k`` may carry several scalar signals (``delay_widths[k]``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.signal

from .errors import DimensionError, IllPosedError, ModelError


def _mat(a, rows: int | None = None, cols: int | None = None) -> np.ndarray:
    if a is None:
        return np.zeros((rows or 0, cols or 0))
    out = np.asarray(a, dtype=float)
    if out.ndim == 0:
        out = out.reshape(1, 1)
    elif out.ndim == 1:
        out = out.reshape(1, -1) if out.size else np.zeros((rows or 0, cols or 0))
    if out.size == 0:
        out = np.zeros((rows if rows is not None else out.shape[0],
                        cols if cols is not None else out.shape[1]))
    return out


def lft_eval(M11, M12, M21, M22, Theta) -> np.ndarray:
    """Upper-left LFT ``M11 + M12 Theta (I - M22 Theta)^-1 M21``.

    Uses a linear solve rather than an explicit inverse. Raises
    :class:`IllPosedError` when ``I - M22 Theta`` is singular.
    """
    M11 = np.atleast_2d(np.asarray(M11))
    M12 = np.atleast_2d(np.asarray(M12))
    M21 = np.atleast_2d(np.asarray(M21))
    M22 = np.atleast_2d(np.asarray(M22))
    Theta = np.atleast_2d(np.asarray(Theta))
    q = Theta.shape[0]
    if q == 0:
        return M11.copy()
    lhs = np.eye(q) - M22 @ Theta
    try:
        cond = np.linalg.cond(lhs)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e14:
        raise IllPosedError("I - M22*Theta is singular", theta=Theta)
    return M11 + M12 @ Theta @ np.linalg.solve(lhs, M21)


@dataclass(frozen=True, eq=False)
class GltiModel:
    """Delay-free state-space plant plus a vector of delays.

    Blocks follow the signal layout in the module docstring. ``tau[k]`` is
    the delay of channel group ``k`` of width ``delay_widths[k]``; zero
    entries and repeated values are allowed until :func:`normalize`.
    """

    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    C1: np.ndarray
    C2: np.ndarray
    D11: np.ndarray
    D12: np.ndarray
    D21: np.ndarray
    D22: np.ndarray
    tau: np.ndarray = field(default_factory=lambda: np.zeros(0))
    delay_widths: tuple[int, ...] = ()
    input_names: tuple[str, ...] | None = None
    output_names: tuple[str, ...] | None = None

    def __post_init__(self):
        A = _mat(self.A)
        n = A.shape[0]
        D11 = _mat(self.D11)
        p, m = D11.shape
        tau = np.atleast_1d(np.asarray(self.tau, dtype=float)).ravel()
        widths = tuple(int(w) for w in self.delay_widths) if self.delay_widths else (1,) * tau.size
        q = sum(widths)
        B1 = _mat(self.B1, n, m)
        B2 = _mat(self.B2, n, q)
        C1 = _mat(self.C1, p, n)
        C2 = _mat(self.C2, q, n)
        D12 = _mat(self.D12, p, q)
        D21 = _mat(self.D21, q, m)
        D22 = _mat(self.D22, q, q)
        if len(widths) != tau.size:
            raise DimensionError("delay_widths and tau lengths differ")
        if np.any(tau < 0) or not np.all(np.isfinite(tau)):
            raise ModelError("delays must be finite and nonnegative")
        expected = {
            "A": (A, (n, n)), "B1": (B1, (n, m)), "B2": (B2, (n, q)),
            "C1": (C1, (p, n)), "C2": (C2, (q, n)), "D12": (D12, (p, q)),
            "D21": (D21, (q, m)), "D22": (D22, (q, q)),
        }
        for name, (arr, shape) in expected.items():
            if arr.shape != shape:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
        for name, names, size in (("input_names", self.input_names, m),
                                  ("output_names", self.output_names, p)):
            if names is not None:
                names = (names,) if isinstance(names, str) else tuple(names)
                if len(names) != size:
                    raise DimensionError(f"{name} has {len(names)} labels for {size} signals")
                object.__setattr__(self, name, names)
        for name, arr in (("A", A), ("B1", B1), ("B2", B2), ("C1", C1), ("C2", C2),
                          ("D11", D11), ("D12", D12), ("D21", D21), ("D22", D22)):
            arr = arr.copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        tau = tau.copy()
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "delay_widths", widths)

    # -- sizes ------------------------------------------------------------
    @property
    def n_states(self) -> int:
        return self.A.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.D11.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.D11.shape[0]

    @property
    def n_delays(self) -> int:
        return self.tau.size

    @property
    def n_channels(self) -> int:
        return self.D22.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_outputs, self.n_inputs

    @property
    def is_siso(self) -> bool:
        return self.shape == (1, 1)

    def channel_delays(self) -> np.ndarray:
        """Delay value of every scalar delay channel."""
        return np.repeat(self.tau, self.delay_widths)

    # -- plant view -------------------------------------------------------
    def plant(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Delay-free plant from ``[u; w]`` to ``[y; z]``."""
        B = np.hstack([self.B1, self.B2])
        C = np.vstack([self.C1, self.C2])
        D = np.block([[self.D11, self.D12], [self.D21, self.D22]])
        return self.A, B, C, D

    @classmethod
    def from_plant(cls, A, B, C, D, n_inputs: int, n_outputs: int,
                   channel_delays=(), input_names=None, output_names=None) -> "GltiModel":
        """Split a plant ``[u; w] -> [y; z]`` into blocks, one delay per channel."""
        m, p = n_inputs, n_outputs
        A = _mat(A)
        n = A.shape[0]
        ch = np.asarray(channel_delays, dtype=float).ravel()
        q = ch.size
        B = _mat(B, n, m + q)
        C = _mat(C, p + q, n)
        D = _mat(D, p + q, m + q)
        return cls(A, B[:, :m], B[:, m:], C[:p], C[p:], D[:p, :m], D[:p, m:],
                   D[p:, :m], D[p:, m:], tau=ch, delay_widths=(1,) * q,
                   input_names=input_names, output_names=output_names)

    def with_names(self, inputs=None, outputs=None) -> "GltiModel":
        """Copy with new signal labels (``None`` keeps the current ones)."""
        return GltiModel(self.A, self.B1, self.B2, self.C1, self.C2, self.D11,
                         self.D12, self.D21, self.D22, self.tau, self.delay_widths,
                         self.input_names if inputs is None else inputs,
                         self.output_names if outputs is None else outputs)

    def rational_part(self, s: complex) -> np.ndarray:
        """Evaluate the delay-free plant ``H(s)`` from ``[u; w]`` to ``[y; z]``."""
        A, B, C, D = self.plant()
        if self.n_states == 0:
            return D.astype(complex)
        sI_A = s * np.eye(self.n_states) - A
        if np.linalg.cond(sI_A) > 1e14:
            raise IllPosedError(f"s={s} is a pole of the rational part")
        return D + C @ np.linalg.solve(sI_A, B)

    def evaluate(self, s: complex) -> np.ndarray:
        """Transfer matrix at complex frequency ``s`` (delays kept exact)."""
        H = self.rational_part(s)
        p, m = self.shape
        theta = np.diag(np.exp(-self.channel_delays() * s))
        return lft_eval(H[:p, :m], H[:p, m:], H[p:, :m], H[p:, m:], theta)

    def __repr__(self) -> str:
        return (f"GltiModel(outputs={self.n_outputs}, inputs={self.n_inputs}, "
                f"states={self.n_states}, tau={list(self.tau)}, widths={list(self.delay_widths)})")

    # -- algebra (implemented in interconnect) ----------------------------
    def __mul__(self, other):
        from .interconnect import series
        return series(as_model(other, self.n_inputs, self.n_inputs), self)

    def __rmul__(self, other):
        from .interconnect import series
        return series(self, as_model(other, self.n_outputs, self.n_outputs))

    def __add__(self, other):
        from .interconnect import parallel
        return parallel(self, as_model(other, *self.shape))

    __radd__ = __add__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-as_model(other, *self.shape))

    def __rsub__(self, other):
        return as_model(other, *self.shape) + (-self)

    def __truediv__(self, other):
        if np.isscalar(other):
            return self * (1.0 / other)
        from .interconnect import inverse
        return self * inverse(as_model(other))

    def __rtruediv__(self, other):
        from .interconnect import inverse
        return as_model(other, self.n_outputs, self.n_outputs) * inverse(self)


def static_gain(K, input_names=None, output_names=None) -> GltiModel:
    """Memoryless model ``y = K u``."""
    K = _mat(K)
    p, m = K.shape
    return GltiModel(np.zeros((0, 0)), np.zeros((0, m)), None, np.zeros((p, 0)), None,
                     K, None, None, None, input_names=input_names,
                     output_names=output_names)


def as_model(obj, p: int | None = None, m: int | None = None) -> GltiModel:
    """Coerce scalars, arrays and transfer functions to :class:`GltiModel`.

    A scalar becomes ``k * I`` when the target shape is square.
    """
    if isinstance(obj, GltiModel):
        return obj
    if isinstance(obj, TransferFunction):
        return to_glti(obj)
    if np.isscalar(obj):
        p = p or 1
        m = m or p
        if p == m:
            return static_gain(float(obj) * np.eye(p))
        return static_gain(np.full((p, m), float(obj)))
    return static_gain(obj)


def pure_delay(tau: float, width: int = 1) -> GltiModel:
    """``e^{-tau s} I`` as the LFT of ``[[0, I], [I, 0]]`` with the delay."""
    I = np.eye(width)
    Z = np.zeros((width, width))
    return GltiModel(np.zeros((0, 0)), np.zeros((0, width)), np.zeros((0, width)),
                     np.zeros((width, 0)), np.zeros((width, 0)), Z, I, I, Z,
                     tau=[tau], delay_widths=(width,))


# -- transfer functions --------------------------------------------------------

@dataclass(frozen=True)
class TransferFunction:
    """Rational transfer matrix with per-channel transport delays.

    ``num[i][j]`` and ``den[i][j]`` are coefficient arrays in descending
    powers of ``s``. The delay of channel ``(i, j)`` is
    ``io_delay[i, j] + input_delay[j] + output_delay[i]``.
    """

    num: tuple
    den: tuple
    io_delay: np.ndarray
    input_delay: np.ndarray
    output_delay: np.ndarray
    input_names: tuple[str, ...] | None = None
    output_names: tuple[str, ...] | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.num), len(self.num[0])

    def channel_delay(self, i: int, j: int) -> float:
        return float(self.io_delay[i, j] + self.input_delay[j] + self.output_delay[i])

    def evaluate(self, s: complex) -> np.ndarray:
        """Direct evaluation ``num(s)/den(s) e^{-delay s}`` per channel."""
        p, m = self.shape
        out = np.empty((p, m), dtype=complex)
        for i in range(p):
            for j in range(m):
                out[i, j] = (np.polyval(self.num[i][j], s) / np.polyval(self.den[i][j], s)
                             * np.exp(-self.channel_delay(i, j) * s))
        return out


def _poly(c) -> np.ndarray:
    c = np.atleast_1d(np.asarray(c, dtype=float)).ravel()
    nz = np.flatnonzero(c)
    return c[nz[0]:] if nz.size else np.zeros(1)


def _is_poly(c) -> bool:
    if isinstance(c, np.ndarray):
        return c.ndim <= 1
    return np.isscalar(c) or all(np.isscalar(x) for x in c)


def make_tf(num, den, io_delay=None, input_delay=None, output_delay=None,
            input_names=None, output_names=None) -> TransferFunction:
    """Build a transfer function record.

    ``num``/``den`` are either single coefficient sequences (SISO) or nested
    ``p x m`` lists of them. A single ``den`` is shared by every channel.
    """
    if _is_poly(num):
        num_grid = [[_poly(num)]]
    else:
        num_grid = [[_poly(c) for c in row] for row in num]
    p, m = len(num_grid), len(num_grid[0])
    if any(len(row) != m for row in num_grid):
        raise DimensionError("ragged numerator array")
    if _is_poly(den):
        den_grid = [[_poly(den) for _ in range(m)] for _ in range(p)]
    else:
        den_grid = [[_poly(c) for c in row] for row in den]
        if len(den_grid) != p or any(len(row) != m for row in den_grid):
            raise DimensionError("numerator and denominator arrays differ in shape")
    for row in den_grid:
        for d in row:
            if not np.any(d):
                raise ModelError("zero denominator polynomial")

    def _delays(val, shape, what):
        if val is None:
            return np.zeros(shape)
        arr = np.asarray(val, dtype=float)
        if arr.ndim == 0:
            arr = np.full(shape, float(arr))
        if arr.shape != shape:
            raise DimensionError(f"{what} has shape {arr.shape}, expected {shape}")
        if np.any(arr < 0) or not np.all(np.isfinite(arr)):
            raise ModelError(f"{what} must be finite and nonnegative")
        return arr

    io = _delays(io_delay, (p, m), "io_delay")
    ind = _delays(input_delay, (m,), "input_delay")
    outd = _delays(output_delay, (p,), "output_delay")
    nt = tuple(tuple(r) for r in num_grid)
    dt = tuple(tuple(r) for r in den_grid)
    return TransferFunction(nt, dt, io, ind, outd,
                            tuple(input_names) if input_names is not None else None,
                            tuple(output_names) if output_names is not None else None)


def _siso_ss(num: np.ndarray, den: np.ndarray):
    if num.size > den.size:
        raise ModelError("improper transfer function cannot be realized")
    if den.size == 1:
        return (np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)),
                np.array([[num[-1] / den[0]]]))
    return scipy.signal.tf2ss(num, den)


def to_glti(tf: TransferFunction) -> GltiModel:
    """Realize a transfer function as a delay model.

    Every channel gets its own controllable canonical realization; channels
    with a positive total delay are routed through a delay channel on their
    output. Equal delays stay separate until :func:`normalize`.
    """
    p, m = tf.shape
    blocks, b_cols, c_rows = [], [], []
    delays = []
    D11 = np.zeros((p, m))
    B2_cols, C2_rows, D12_cols, D21_rows = [], [], [], []
    n_total = 0
    for i in range(p):
        for j in range(m):
            a, b, c, d = _siso_ss(tf.num[i][j], tf.den[i][j])
            k = a.shape[0]
            blocks.append(a)
            delay = tf.channel_delay(i, j)
            if delay > 0:
                delays.append(delay)
                b_cols.append((j, b))
                c_rows.append((None, c))
                C2_rows.append((n_total, c))
                D21_rows.append((j, float(d[0, 0])))
                D12_cols.append(i)
            else:
                b_cols.append((j, b))
                c_rows.append((i, c))
                D11[i, j] += float(d[0, 0])
            n_total += k
    n = n_total
    A = np.zeros((n, n))
    B1 = np.zeros((n, m))
    C1 = np.zeros((p, n))
    off = 0
    for a, (j, b), (i, c) in zip(blocks, b_cols, c_rows):
        k = a.shape[0]
        A[off:off + k, off:off + k] = a
        B1[off:off + k, j] = b[:, 0]
        if i is not None:
            C1[i, off:off + k] = c[0]
        off += k
    q = len(delays)
    C2 = np.zeros((q, n))
    D21 = np.zeros((q, m))
    D12 = np.zeros((p, q))
    for r, ((start, c), (j, d), i) in enumerate(zip(C2_rows, D21_rows, D12_cols)):
        C2[r, start:start + c.shape[1]] = c[0]
        D21[r, j] = d
        D12[i, r] = 1.0
    return GltiModel(A, B1, np.zeros((n, q)), C1, C2, D11, D12, D21, np.zeros((q, q)),
                     tau=delays, delay_widths=(1,) * q,
                     input_names=tf.input_names, output_names=tf.output_names)


def tf(num, den, io_delay=None, input_delay=None, output_delay=None,
       input_names=None, output_names=None) -> GltiModel:
    """Shorthand for ``to_glti(make_tf(...))``."""
    return to_glti(make_tf(num, den, io_delay, input_delay, output_delay,
                           input_names, output_names))


def ss(A, B, C, D, input_names=None, output_names=None) -> GltiModel:
    """Delay-free state-space model."""
    D = _mat(D)
    A = _mat(A)
    n = A.shape[0]
    return GltiModel(A, _mat(B, n, D.shape[1]), None, _mat(C, D.shape[0], n), None, D,
                     None, None, None, input_names=input_names, output_names=output_names)


# -- delay differential form ----------------------------------------------------

@dataclass(frozen=True)
class DelayTerm:
    theta: float
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray


@dataclass(frozen=True)
class DelayDdeForm:
    """``x' = A0 x + B0 u + sum_j (A_j x(t-θ_j) + B_j u(t-θ_j))``, same for ``y``."""

    A0: np.ndarray
    B0: np.ndarray
    C0: np.ndarray
    D0: np.ndarray
    terms: tuple[DelayTerm, ...] = ()

    @classmethod
    def build(cls, A0, B0, C0, D0, terms=()) -> "DelayDdeForm":
        A0 = _mat(A0)
        n = A0.shape[0]
        D0 = _mat(D0)
        p, m = D0.shape
        B0 = _mat(B0, n, m)
        C0 = _mat(C0, p, n)
        built = []
        for t in terms:
            if isinstance(t, DelayTerm):
                theta, Aj, Bj, Cj, Dj = t.theta, t.A, t.B, t.C, t.D
            elif isinstance(t, dict):
                theta, Aj, Bj, Cj, Dj = (t["theta"], t.get("A"), t.get("B"),
                                         t.get("C"), t.get("D"))
            else:
                theta, Aj, Bj, Cj, Dj = t
            Aj = np.zeros((n, n)) if Aj is None else _mat(Aj, n, n)
            Bj = np.zeros((n, m)) if Bj is None else _mat(Bj, n, m)
            Cj = np.zeros((p, n)) if Cj is None else _mat(Cj, p, n)
            Dj = np.zeros((p, m)) if Dj is None else _mat(Dj, p, m)
            if (Aj.shape, Bj.shape, Cj.shape, Dj.shape) != ((n, n), (n, m), (p, n), (p, m)):
                raise DimensionError("delay term dimensions do not match A0/B0/C0/D0")
            built.append(DelayTerm(float(theta), Aj, Bj, Cj, Dj))
        if (B0.shape, C0.shape) != ((n, m), (p, n)):
            raise DimensionError("B0/C0 dimensions do not match A0/D0")
        return cls(A0, B0, C0, D0, tuple(built))

    def evaluate(self, s: complex) -> np.ndarray:
        """Transfer matrix from the quasipolynomial form directly."""
        n = self.A0.shape[0]
        A, B, C, D = (self.A0.astype(complex), self.B0.astype(complex),
                      self.C0.astype(complex), self.D0.astype(complex))
        for t in self.terms:
            e = np.exp(-t.theta * s)
            A = A + t.A * e
            B = B + t.B * e
            C = C + t.C * e
            D = D + t.D * e
        if n == 0:
            return D
        return D + C @ np.linalg.solve(s * np.eye(n) - A, B)


def from_delay_dde(d: DelayDdeForm) -> GltiModel:
    """Embed a delay-differential model.

    Each distinct delay gets one channel group that taps ``x`` and/or ``u``
    (whichever the delayed matrices actually use) and re-enters through
    ``[A_j B_j; C_j D_j]``.
    """
    A0, B0, C0, D0 = d.A0, d.B0, d.C0, d.D0
    n, m, p = A0.shape[0], D0.shape[1], D0.shape[0]
    merged: dict[float, list[np.ndarray]] = {}
    for t in d.terms:
        if not t.theta > 0:
            raise ModelError("delay terms need theta > 0")
        acc = merged.setdefault(t.theta, [np.zeros((n, n)), np.zeros((n, m)),
                                          np.zeros((p, n)), np.zeros((p, m))])
        for k, mat in enumerate((t.A, t.B, t.C, t.D)):
            acc[k] = acc[k] + mat
    B2s, C2s, D12s, D21s, taus, widths = [], [], [], [], [], []
    for theta, (Aj, Bj, Cj, Dj) in merged.items():
        use_x = bool(np.any(Aj) or np.any(Cj))
        use_u = bool(np.any(Bj) or np.any(Dj))
        if not (use_x or use_u):
            continue
        if use_x:
            B2s.append(Aj)
            D12s.append(Cj)
            C2s.append(np.eye(n))
            D21s.append(np.zeros((n, m)))
        if use_u:
            B2s.append(Bj)
            D12s.append(Dj)
            C2s.append(np.zeros((m, n)))
            D21s.append(np.eye(m))
        taus.append(theta)
        widths.append(n * use_x + m * use_u)
    q = sum(widths)
    B2 = np.hstack(B2s) if B2s else np.zeros((n, 0))
    D12 = np.hstack(D12s) if D12s else np.zeros((p, 0))
    C2 = np.vstack(C2s) if C2s else np.zeros((0, n))
    D21 = np.vstack(D21s) if D21s else np.zeros((0, m))
    return GltiModel(A0, B0, B2, C0, C2, D0, D12, D21, np.zeros((q, q)),
                     tau=taus, delay_widths=tuple(widths))


# -- normalization ----------------------------------------------------------------

def close_static(A, B, C, D, K, E):
    """Close ``v = K y + E r`` around ``x' = Ax + Bv, y = Cx + Dv``.

    Returns the plant from ``r`` to all of ``y``. Raises
    :class:`IllPosedError` when ``I - D K`` is singular.
    """
    p = D.shape[0]
    M = np.eye(p) - D @ K
    if p and np.linalg.cond(M) > 1e12:
        raise IllPosedError("algebraic loop is singular (ill-posed interconnection)")
    rhs = np.hstack([C, D @ E]) if p else np.zeros((0, C.shape[1] + E.shape[1]))
    sol = np.linalg.solve(M, rhs) if p else rhs
    n = A.shape[0]
    Cc, Dc = sol[:, :n], sol[:, n:]
    Ac = A + B @ K @ Cc
    Bc = B @ K @ Dc + B @ E
    return Ac, Bc, Cc, Dc


def normalize(m: GltiModel) -> GltiModel:
    """Fold zero delays, merge identical delays, sort ascending.

    Frequency response is unchanged. Raises :class:`IllPosedError` if the
    zero-delay algebraic loop is singular.
    """
    ch = m.channel_delays()
    A, B, C, D = m.plant()
    nu, ny = m.n_inputs, m.n_outputs
    zero = np.flatnonzero(ch == 0)
    keep = np.flatnonzero(ch > 0)
    if zero.size:
        # inputs v = [u; w], r = [u; w_keep]; w_zero = z_zero
        nv = nu + ch.size
        nr = nu + keep.size
        K = np.zeros((nv, ny + ch.size))
        E = np.zeros((nv, nr))
        E[:nu, :nu] = np.eye(nu)
        for r, c in enumerate(keep):
            E[nu + c, nu + r] = 1.0
        for c in zero:
            K[nu + c, ny + c] = 1.0
        A, B, C, D = close_static(A, B, C, D, K, E)
        rows = np.concatenate([np.arange(ny), ny + keep])
        C, D = C[rows], D[rows]
        ch = ch[keep]
    # stable sort keeps channel order within each merged delay
    order = np.argsort(ch, kind="stable")
    ch = ch[order]
    perm_in = np.concatenate([np.arange(nu), nu + order]).astype(int)
    perm_out = np.concatenate([np.arange(ny), ny + order]).astype(int)
    B = B[:, perm_in]
    C = C[perm_out]
    D = D[np.ix_(perm_out, perm_in)]
    taus, widths = [], []
    for t in ch:
        if taus and taus[-1] == t:
            widths[-1] += 1
        else:
            taus.append(float(t))
            widths.append(1)
    q = ch.size
    return GltiModel(A, B[:, :nu], B[:, nu:], C[:ny], C[ny:], D[:ny, :nu], D[:ny, nu:],
                     D[ny:, :nu], D[ny:, nu:], tau=taus, delay_widths=tuple(widths),
                     input_names=m.input_names, output_names=m.output_names)


def is_normalized(m: GltiModel) -> bool:
    t = m.tau
    return bool(np.all(t > 0) and np.all(np.diff(t) > 0))


def close_delays(m: GltiModel, s: float = 0.0) -> GltiModel:
    """Delay-free model obtained by freezing every delay at ``e^{-tau s}``.

    With ``s = 0`` this is the zero-delay model that shares the DC behaviour.
    """
    theta = np.exp(-m.channel_delays() * s)
    A, B, C, D = m.plant()
    nu, ny, q = m.n_inputs, m.n_outputs, m.n_channels
    K = np.zeros((nu + q, ny + q))
    K[nu:, ny:] = np.diag(theta)
    E = np.zeros((nu + q, nu))
    E[:nu] = np.eye(nu)
    A, B, C, D = close_static(A, B, C, D, K, E)
    return ss(A, B, C[:ny], D[:ny], m.input_names, m.output_names)

"""Block-diagram algebra on delay models.

Every connective appends its operands and closes a static routing loop
around the appended plant, so results are always exact delay models: the
delay channels of the operands are carried over unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import block_diag

from .errors import ConnectError, DimensionError, IllPosedError
from .model import GltiModel, as_model, close_static, static_gain


@dataclass(frozen=True)
class SumJunction:
    """Summing point ``output = sum_i signs[i] * inputs[i]``."""

    signs: tuple[float, ...]
    input_names: tuple[str, ...]
    output_name: str

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(float(s) for s in self.signs))
        object.__setattr__(self, "input_names", tuple(self.input_names))
        if not self.signs:
            raise ConnectError("a sum junction needs at least one input")
        if len(self.signs) != len(self.input_names):
            raise ConnectError("sum junction signs and inputs differ in length")

    def to_model(self) -> GltiModel:
        return static_gain(np.array([self.signs]), self.input_names, (self.output_name,))


@dataclass(frozen=True)
class ModelArray:
    """Ordered family of models with identical I/O dimensions."""

    models: tuple[GltiModel, ...]

    def __post_init__(self):
        object.__setattr__(self, "models", tuple(self.models))
        if not self.models:
            raise DimensionError("empty model array")
        shape = self.models[0].shape
        if any(g.shape != shape for g in self.models):
            raise DimensionError("stacked models must share input/output counts")

    @property
    def array_dim(self) -> int:
        return len(self.models)

    @property
    def shape(self) -> tuple[int, int]:
        return self.models[0].shape

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __getitem__(self, i):
        return self.models[i]

    def map(self, fn):
        return [fn(g) for g in self.models]


def stack(*models) -> ModelArray:
    """Bundle models (e.g. perturbed plants) into an array."""
    if len(models) == 1 and not isinstance(models[0], GltiModel):
        models = tuple(models[0])
    return ModelArray(tuple(as_model(g) for g in models))


def _plant_of_append(models: Sequence[GltiModel]):
    """Plant of the appended models with signals ordered ``[u_all; w_all] -> [y_all; z_all]``."""
    A = block_diag(*[g.A for g in models]) if models else np.zeros((0, 0))
    A = np.atleast_2d(A) if A.size else np.zeros((sum(g.n_states for g in models),) * 2)
    B1 = _bd([g.B1 for g in models])
    B2 = _bd([g.B2 for g in models])
    C1 = _bd([g.C1 for g in models])
    C2 = _bd([g.C2 for g in models])
    D11 = _bd([g.D11 for g in models])
    D12 = _bd([g.D12 for g in models])
    D21 = _bd([g.D21 for g in models])
    D22 = _bd([g.D22 for g in models])
    B = np.hstack([B1, B2])
    C = np.vstack([C1, C2])
    D = np.block([[D11, D12], [D21, D22]])
    ch = np.concatenate([g.channel_delays() for g in models]) if models else np.zeros(0)
    return A, B, C, D, ch


def _bd(mats):
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols))
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def _route(models: Sequence[GltiModel], K, E, S, input_names=None, output_names=None) -> GltiModel:
    """Append ``models`` and close ``u_all = K y_all + E r``; output ``S y_all``.

    Delay channels pass through untouched: ``w`` stays an external input of
    the closed plant and ``z`` stays an output.
    """
    A, B, C, D, ch = _plant_of_append(models)
    mu = sum(g.n_inputs for g in models)
    py = sum(g.n_outputs for g in models)
    q = ch.size
    K = np.asarray(K, dtype=float).reshape(mu, py)
    E = np.asarray(E, dtype=float).reshape(mu, -1)
    S = np.asarray(S, dtype=float).reshape(-1, py)
    nr, ns = E.shape[1], S.shape[0]
    Kf = np.zeros((mu + q, py + q))
    Kf[:mu, :py] = K
    Ef = np.zeros((mu + q, nr + q))
    Ef[:mu, :nr] = E
    Ef[mu:, nr:] = np.eye(q)
    Ac, Bc, Cc, Dc = close_static(A, B, C, D, Kf, Ef)
    Sf = np.zeros((ns + q, py + q))
    Sf[:ns, :py] = S
    Sf[ns:, py:] = np.eye(q)
    return GltiModel.from_plant(Ac, Bc, Sf @ Cc, Sf @ Dc, nr, ns, ch,
                                input_names=input_names, output_names=output_names)


def series(g1, g2) -> GltiModel:
    """``u -> g1 -> g2 -> y``; response ``G2(s) G1(s)``."""
    g1, g2 = as_model(g1), as_model(g2)
    if g1.n_outputs != g2.n_inputs:
        raise DimensionError(f"series: g1 has {g1.n_outputs} outputs, g2 has {g2.n_inputs} inputs")
    m1, p1, m2, p2 = g1.n_inputs, g1.n_outputs, g2.n_inputs, g2.n_outputs
    K = np.zeros((m1 + m2, p1 + p2))
    K[m1:, :p1] = np.eye(p1)
    E = np.vstack([np.eye(m1), np.zeros((m2, m1))])
    S = np.hstack([np.zeros((p2, p1)), np.eye(p2)])
    return _route([g1, g2], K, E, S, g1.input_names, g2.output_names)


def parallel(g1, g2) -> GltiModel:
    """Shared input, summed outputs; response ``G1(s) + G2(s)``."""
    g1, g2 = as_model(g1), as_model(g2)
    if g1.shape != g2.shape:
        raise DimensionError(f"parallel: shapes {g1.shape} and {g2.shape} differ")
    p, m = g1.shape
    K = np.zeros((2 * m, 2 * p))
    E = np.vstack([np.eye(m), np.eye(m)])
    S = np.hstack([np.eye(p), np.eye(p)])
    return _route([g1, g2], K, E, S, g1.input_names or g2.input_names,
                  g1.output_names or g2.output_names)


def feedback(g, h=1.0, sign: float = -1.0) -> GltiModel:
    """Close ``h`` around ``g``: response ``(I - sign*G H)^-1 G``.

    The default ``sign=-1`` is negative feedback.
    """
    g = as_model(g)
    h = as_model(h, g.n_inputs, g.n_outputs)
    if h.shape != (g.n_inputs, g.n_outputs):
        raise DimensionError(f"feedback: h must be {g.n_inputs}x{g.n_outputs}, got {h.shape}")
    m, p = g.n_inputs, g.n_outputs
    K = np.zeros((m + p, p + m))
    K[:m, p:] = sign * np.eye(m)
    K[m:, :p] = np.eye(p)
    E = np.vstack([np.eye(m), np.zeros((p, m))])
    S = np.hstack([np.eye(p), np.zeros((p, m))])
    return _route([g, h], K, E, S, g.input_names, g.output_names)


def append(*models) -> GltiModel:
    """Block-diagonal grouping of inputs and outputs."""
    models = [as_model(g) for g in models]
    mu = sum(g.n_inputs for g in models)
    py = sum(g.n_outputs for g in models)
    in_names = _concat_names([g.input_names for g in models], [g.n_inputs for g in models])
    out_names = _concat_names([g.output_names for g in models], [g.n_outputs for g in models])
    return _route(models, np.zeros((mu, py)), np.eye(mu), np.eye(py), in_names, out_names)


def _concat_names(lists, sizes):
    if all(n is None for n in lists):
        return None
    out = []
    for names, k in zip(lists, sizes):
        out.extend(names if names is not None else [""] * k)
    return tuple(out)


def lft(g1, g2, n_feedback_out: int, n_feedback_in: int) -> GltiModel:
    """Lower LFT: the last ``n_feedback_out`` outputs of ``g1`` drive ``g2``,
    whose outputs return as the last ``n_feedback_in`` inputs of ``g1``.
    """
    g1, g2 = as_model(g1), as_model(g2)
    m1, p1 = g1.n_inputs, g1.n_outputs
    if g2.shape != (n_feedback_in, n_feedback_out):
        raise DimensionError("lft: g2 shape does not match the feedback partition")
    m2, p2 = g2.n_inputs, g2.n_outputs
    ext_in, ext_out = m1 - n_feedback_in, p1 - n_feedback_out
    K = np.zeros((m1 + m2, p1 + p2))
    K[ext_in:m1, p1:] = np.eye(n_feedback_in)
    K[m1:, ext_out:p1] = np.eye(n_feedback_out)
    E = np.zeros((m1 + m2, ext_in))
    E[:ext_in] = np.eye(ext_in)
    S = np.zeros((ext_out, p1 + p2))
    S[:, :ext_out] = np.eye(ext_out)
    return _route([g1, g2], K, E, S)


def inverse(g) -> GltiModel:
    """Inverse system; needs a square, invertible ``D11`` (static part)."""
    g = as_model(g)
    p, m = g.shape
    if p != m:
        raise DimensionError("only square systems can be inverted")
    # swap roles of u and y: u = D11^-1 (y - C1 x - D12 w)
    D11 = g.D11
    if np.linalg.cond(D11) > 1e12:
        raise IllPosedError("inverse needs an invertible feedthrough D11")
    Di = np.linalg.inv(D11)
    Ai = g.A - g.B1 @ Di @ g.C1
    B1i = g.B1 @ Di
    B2i = g.B2 - g.B1 @ Di @ g.D12
    C1i = -Di @ g.C1
    D11i = Di
    D12i = -Di @ g.D12
    C2i = g.C2 - g.D21 @ Di @ g.C1
    D21i = g.D21 @ Di
    D22i = g.D22 - g.D21 @ Di @ g.D12
    return GltiModel(Ai, B1i, B2i, C1i, C2i, D11i, D12i, D21i, D22i, g.tau, g.delay_widths,
                     g.output_names, g.input_names)


def connect(blocks: Iterable, external_inputs: Sequence[str], external_outputs: Sequence[str]):
    """Interconnect named blocks.

    Each block is a :class:`GltiModel` with ``input_names``/``output_names``
    or a :class:`SumJunction`. Matching is exact and case-sensitive; every
    signal must have exactly one source (a block output or an external
    input). If any block is a :class:`ModelArray`, the connection is built
    per entry and a :class:`ModelArray` is returned.
    """
    blocks = list(blocks)
    external_inputs = [external_inputs] if isinstance(external_inputs, str) else list(external_inputs)
    external_outputs = [external_outputs] if isinstance(external_outputs, str) else list(external_outputs)
    arrays = [b for b in blocks if isinstance(b, ModelArray)]
    if arrays:
        size = arrays[0].array_dim
        if any(a.array_dim != size for a in arrays):
            raise DimensionError("model arrays in one netlist must have equal length")
        out = []
        for k in range(size):
            entry = [b[k] if isinstance(b, ModelArray) else b for b in blocks]
            out.append(connect(entry, external_inputs, external_outputs))
        return ModelArray(tuple(out))

    models = []
    for b in blocks:
        if isinstance(b, SumJunction):
            models.append(b.to_model())
            continue
        if not isinstance(b, GltiModel):
            raise ConnectError(f"unsupported block type {type(b).__name__}")
        if b.input_names is None or b.output_names is None:
            raise ConnectError("every block needs input and output names")
        models.append(b)

    sources: dict[str, tuple[str, int]] = {}
    for k, name in enumerate(external_inputs):
        if name in sources:
            raise ConnectError(f"signal '{name}' is driven more than once")
        sources[name] = ("ext", k)
    off = 0
    for g in models:
        for i, name in enumerate(g.output_names):
            if name in sources:
                raise ConnectError(f"signal '{name}' is driven more than once")
            sources[name] = ("out", off + i)
        off += g.n_outputs

    mu = sum(g.n_inputs for g in models)
    py = sum(g.n_outputs for g in models)
    nr = len(external_inputs)
    K = np.zeros((mu, py))
    E = np.zeros((mu, nr))
    row = 0
    for g in models:
        for name in g.input_names:
            if name not in sources:
                raise ConnectError(f"unknown or undriven signal '{name}'")
            kind, idx = sources[name]
            if kind == "ext":
                E[row, idx] = 1.0
            else:
                K[row, idx] = 1.0
            row += 1

    known_inputs = {n for g in models for n in g.input_names}
    for name in external_inputs:
        if name not in known_inputs and name not in external_outputs:
            raise ConnectError(f"external input '{name}' feeds no block")

    S = np.zeros((len(external_outputs), py))
    feed = np.zeros((len(external_outputs), nr))
    for r, name in enumerate(external_outputs):
        if name not in sources:
            raise ConnectError(f"unknown output signal '{name}'")
        kind, idx = sources[name]
        if kind == "ext":
            feed[r, idx] = 1.0
        else:
            S[r, idx] = 1.0
    out = _route(models, K, E, S, tuple(external_inputs), tuple(external_outputs))
    if np.any(feed):
        out = parallel(out, static_gain(feed)).with_names(tuple(external_inputs),
                                                           tuple(external_outputs))
    return out

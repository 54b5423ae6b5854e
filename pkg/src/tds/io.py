"""JSON model schema and CSV writers.

Model JSON objects carry a ``kind`` field:

``tf``       ``num``, ``den`` (+ ``io_delay``, ``input_delay``, ``output_delay``)
``ss``       ``A``, ``B``, ``C``, ``D`` (+ ``B2``, ``C2``, ``D12``, ``D21``, ``D22``,
             ``tau``, ``delay_widths``)
``dde``      ``A0``, ``B0``, ``C0``, ``D0``, ``terms`` = [{``theta``, ``A``, ``B``, ``C``, ``D``}]
``delay``    ``tau`` (+ ``width``)
``gain``     ``K``
``pid``      ``kp``, ``ki``, ``kd``, ``t_filter``
``series``   ``models`` in signal-flow order
``parallel`` ``models``
``feedback`` ``forward``, ``loop`` (+ ``sign``, default -1)
``netlist``  ``blocks``, ``sums``, ``from``, ``to``
``array``    ``models``

Every kind accepts optional ``input_names`` / ``output_names``.
"""

from __future__ import annotations

import csv
import json
import math
from functools import reduce
from pathlib import Path

import numpy as np

from .errors import ModelError
from .interconnect import ModelArray, SumJunction, connect, feedback, parallel, series, stack
from .model import DelayDdeForm, GltiModel, from_delay_dde, pure_delay, static_gain, tf
from .pid import PidController


def fmt(x: float) -> str:
    """Shortest round-trip text of ``x`` rounded to 12 significant digits.

    Integers and booleans print as plain integers.
    """
    if isinstance(x, (bool, int, np.bool_, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(f"{x:.12g}"))


def _round(obj):
    if isinstance(obj, float):
        # JSON has no literal for non-finite numbers
        return float(f"{obj:.12g}") if math.isfinite(obj) else fmt(obj)
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return _round(obj.item())
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def _names(spec, key):
    v = spec.get(key)
    if v is None:
        return None
    return [v] if isinstance(v, str) else list(v)


def model_from_dict(spec: dict):
    """Build a model (or :class:`ModelArray`) from its JSON description."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ModelError("model description needs a 'kind' field")
    kind = spec["kind"]
    ins, outs = _names(spec, "input_names"), _names(spec, "output_names")
    try:
        if kind == "tf":
            m = tf(spec["num"], spec["den"], spec.get("io_delay"), spec.get("input_delay"),
                   spec.get("output_delay"))
        elif kind == "ss" and "n_states" in spec:
            m = model_from_ss_dict(spec)
        elif kind == "ss":
            m = GltiModel(spec["A"], spec.get("B", spec.get("B1")), spec.get("B2"),
                          spec.get("C", spec.get("C1")), spec.get("C2"),
                          spec.get("D", spec.get("D11")), spec.get("D12"), spec.get("D21"),
                          spec.get("D22"), spec.get("tau", []),
                          tuple(spec.get("delay_widths", ())))
        elif kind == "dde":
            d = DelayDdeForm.build(spec["A0"], spec.get("B0"), spec.get("C0"), spec["D0"],
                                   spec.get("terms", []))
            m = from_delay_dde(d)
        elif kind == "delay":
            m = pure_delay(float(spec["tau"]), int(spec.get("width", 1)))
        elif kind == "gain":
            m = static_gain(spec["K"])
        elif kind == "pid":
            m = PidController(float(spec.get("kp", 0.0)), float(spec.get("ki", 0.0)),
                              float(spec.get("kd", 0.0)), float(spec.get("t_filter", 0.0))).to_glti()
        elif kind == "series":
            m = reduce(series, [model_from_dict(s) for s in spec["models"]])
        elif kind == "parallel":
            m = reduce(parallel, [model_from_dict(s) for s in spec["models"]])
        elif kind == "feedback":
            m = feedback(model_from_dict(spec["forward"]), model_from_dict(spec["loop"]),
                         float(spec.get("sign", -1.0)))
        elif kind == "netlist":
            return netlist_from_dict(spec)
        elif kind == "array":
            return stack(*[model_from_dict(s) for s in spec["models"]])
        else:
            raise ModelError(f"unknown model kind {kind!r}")
    except KeyError as exc:
        raise ModelError(f"{kind} model is missing field {exc.args[0]!r}") from None
    except (TypeError, IndexError) as exc:
        raise ModelError(f"malformed {kind} model: {exc}") from None
    if ins is not None or outs is not None:
        m = m.with_names(ins, outs)
    return m


def netlist_from_dict(spec: dict):
    """``{"blocks": [{"model", "inputs", "outputs"}], "sums": [...], "from", "to"}``."""
    blocks = []
    for b in spec.get("blocks", []):
        m = model_from_dict(b["model"])
        ins, outs = _names(b, "inputs"), _names(b, "outputs")
        if isinstance(m, ModelArray):
            m = ModelArray(tuple(g.with_names(ins, outs) for g in m))
        else:
            m = m.with_names(ins, outs)
        blocks.append(m)
    for s in spec.get("sums", []):
        blocks.append(SumJunction(tuple(s["signs"]), tuple(s["inputs"]), s["output"]))
    if "from" not in spec or "to" not in spec:
        raise ModelError("netlist needs 'from' and 'to' signal lists")
    return connect(blocks, _names(spec, "from"), _names(spec, "to"))


def load_model(path):
    try:
        spec = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"invalid JSON in {path}: {exc}") from None
    return model_from_dict(spec)


def model_to_dict(m) -> dict:
    """Lossless ``ss`` description of a model (or ``array`` of them)."""
    if isinstance(m, ModelArray):
        return {"kind": "array", "models": [model_to_dict(g) for g in m]}
    out = {
        "kind": "ss", "A": m.A.tolist(), "B": m.B1.tolist(), "C": m.C1.tolist(),
        "D": m.D11.tolist(), "B2": m.B2.tolist(), "C2": m.C2.tolist(),
        "D12": m.D12.tolist(), "D21": m.D21.tolist(), "D22": m.D22.tolist(),
        "tau": m.tau.tolist(), "delay_widths": list(m.delay_widths),
        # keep empty-dimension information explicit
        "n_states": m.n_states, "n_inputs": m.n_inputs, "n_outputs": m.n_outputs,
    }
    if m.input_names is not None:
        out["input_names"] = list(m.input_names)
    if m.output_names is not None:
        out["output_names"] = list(m.output_names)
    return out


def _shape_hint(spec: dict):
    n, nu, ny = spec.get("n_states"), spec.get("n_inputs"), spec.get("n_outputs")
    return n, nu, ny


def model_from_ss_dict(spec: dict) -> GltiModel:
    """Inverse of :func:`model_to_dict` that also survives empty blocks."""
    n, nu, ny = _shape_hint(spec)
    tau = spec.get("tau", [])
    widths = tuple(spec.get("delay_widths", (1,) * len(tau)))
    q = sum(widths)

    def arr(key, r, c):
        a = np.asarray(spec.get(key, []), dtype=float)
        if a.size != r * c:
            raise ModelError(f"ss field {key!r} has {a.size} entries, expected {r}x{c}")
        return a.reshape(r, c)

    return GltiModel(arr("A", n, n), arr("B", n, nu), arr("B2", n, q), arr("C", ny, n),
                     arr("C2", q, n), arr("D", ny, nu), arr("D12", ny, q), arr("D21", q, nu),
                     arr("D22", q, q), tau, widths, spec.get("input_names"),
                     spec.get("output_names"))


def write_csv(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def read_input_csv(path):
    """``t,u1[,u2,...]`` -> ``(t, u)``."""
    data = np.genfromtxt(path, delimiter=",", names=True)
    if data.dtype.names is None or data.dtype.names[0] != "t":
        raise ModelError("input CSV must start with a 't' column")
    t = np.atleast_1d(data["t"]).astype(float)
    cols = [np.atleast_1d(data[n]).astype(float) for n in data.dtype.names[1:]]
    if not cols:
        raise ModelError("input CSV has no input columns")
    return t, np.column_stack(cols)


def channel_suffixes(p: int, m: int):
    return [f"{i + 1}{j + 1}" for i in range(p) for j in range(m)]

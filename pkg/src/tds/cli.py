"""``tds`` command line.

Exit status: 0 success, 1 usage error, 2 model/schema error, 3 numerical
failure. Errors print one ``error: <kind>: <message>`` line on stderr.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import demos
from .errors import ModelError, NumericalError, TdsError
from .freq import bandwidth, bode_data, dcgain, margins, nyquist_data
from .interconnect import ModelArray
from .io import (channel_suffixes, dumps, fmt, load_model, model_to_dict, read_input_csv,
                 write_csv)
from .pid import tune_pid
from .sim import default_dt, simulate, step_response, tank_tracking_reference
from .spectral import pade_model, rightmost_roots

VERBS = ("sim", "step", "bode", "nyquist", "margin", "bandwidth", "dcgain", "pade",
         "roots", "pidtune", "connect", "demo")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tds", description="Analysis of LTI systems with time delays.")
    p.add_argument("verb", choices=VERBS)
    p.add_argument("name", nargs="?", help="demo name (tank-pi, smith, pidtune)")
    p.add_argument("--model", help="model JSON file")
    p.add_argument("--out", help="output file (stdout when omitted)")
    p.add_argument("--out-dir", default=".", help="directory for demo artifacts")
    p.add_argument("--input", help="input CSV t,u1[,u2,...] for sim")
    p.add_argument("--ref", choices=["tank-tracking"], help="built-in reference signal for sim")
    p.add_argument("--t1", type=float, help="final time (s)")
    p.add_argument("--dt", type=float, help="integration step (s)")
    p.add_argument("--points", type=int, default=500, help="frequency grid size")
    p.add_argument("--order", type=int, default=8, help="Padé order")
    p.add_argument("--wc", type=float, help="target crossover frequency (rad/s)")
    p.add_argument("--pm", type=float, default=60.0, help="target phase margin (deg)")
    p.add_argument("--type", default="PID", choices=["P", "PI", "PID"], help="controller structure")
    p.add_argument("-k", type=int, default=10, help="number of rightmost roots")
    return p


def _entries(model):
    return list(model) if isinstance(model, ModelArray) else [model]


def _emit_text(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header, rows, index: int | None = None):
    if args.out:
        path = Path(args.out)
        if index is not None:
            path = path.with_name(f"{path.stem}_{index}{path.suffix}")
        write_csv(path, header, rows)
    else:
        sys.stdout.write(",".join(header) + "\n")
        for row in rows:
            sys.stdout.write(",".join(fmt(v) for v in row) + "\n")


def _need_model(args):
    if not args.model:
        raise UsageError(f"{args.verb} needs --model")
    return load_model(args.model)


def _sim_rows(res):
    header = ["t"] + [f"y{i + 1}" for i in range(res.y.shape[1])]
    return header, (np.concatenate([[t], y]) for t, y in zip(res.t, res.y))


def cmd_sim(args):
    model = _need_model(args)
    multi = isinstance(model, ModelArray)
    for k, g in enumerate(_entries(model)):
        if args.input:
            t, u = read_input_csv(args.input)
        else:
            dt = args.dt or (0.1 if args.ref else default_dt(g))
            t1 = args.t1 or (2000.0 if args.ref else 10.0)
            t = np.arange(int(round(t1 / dt)) + 1) * dt
            if args.ref:
                u = np.repeat(tank_tracking_reference(t)[:, None], g.n_inputs, axis=1)
            else:
                raise UsageError("sim needs --input or --ref")
        res = simulate(g, u, t)
        _emit_csv(args, *_sim_rows(res), index=k if multi else None)


def cmd_step(args):
    model = _need_model(args)
    multi = isinstance(model, ModelArray)
    for k, g in enumerate(_entries(model)):
        res = step_response(g, args.t1 or 100.0, args.dt)
        _emit_csv(args, *_sim_rows(res), index=k if multi else None)


def cmd_bode(args, nyquist=False):
    model = _need_model(args)
    multi = isinstance(model, ModelArray)
    for k, g in enumerate(_entries(model)):
        p, m = g.shape
        suffix = channel_suffixes(p, m)
        if nyquist:
            fr = nyquist_data(g, n_points=args.points)
            header = ["omega"] + [c for s in suffix for c in (f"re_{s}", f"im_{s}")]
            vals = fr.values.reshape(len(fr.omega), -1)
            rows = (np.concatenate([[w], np.column_stack([v.real, v.imag]).ravel()])
                    for w, v in zip(fr.omega, vals))
        else:
            fr = bode_data(g, n_points=args.points)
            header = ["omega"] + [c for s in suffix for c in (f"mag_db_{s}", f"phase_deg_{s}")]
            mag = fr.mag_db.reshape(len(fr.omega), -1)
            ph = fr.phase_deg.reshape(len(fr.omega), -1)
            rows = (np.concatenate([[w], np.column_stack([a, b]).ravel()])
                    for w, a, b in zip(fr.omega, mag, ph))
        _emit_csv(args, header, rows, index=k if multi else None)


def _one_or_list(values, model):
    return values if isinstance(model, ModelArray) else values[0]


def cmd_margin(args):
    model = _need_model(args)
    out = []
    for g in _entries(model):
        r = margins(g)
        out.append({
            "gm": r.gm, "gm_frequency": r.gm_frequency, "pm": r.pm,
            "pm_frequency": r.pm_frequency,
            "gain_margins": [list(e) for e in r.gain_margins],
            "phase_margins": [list(e) for e in r.phase_margins],
            "search_band": list(r.search_band), "truncated": r.truncated,
        })
    _emit_text(args, dumps(_one_or_list(out, model)))


def cmd_bandwidth(args):
    model = _need_model(args)
    _emit_text(args, dumps({"bandwidth": _one_or_list([bandwidth(g) for g in _entries(model)], model)}))


def cmd_dcgain(args):
    model = _need_model(args)
    _emit_text(args, dumps({"dcgain": _one_or_list([dcgain(g).tolist() for g in _entries(model)], model)}))


def cmd_pade(args):
    model = _need_model(args)
    _emit_text(args, dumps(model_to_dict(pade_model(model, args.order))))


def cmd_roots(args):
    model = _need_model(args)
    multi = isinstance(model, ModelArray)
    for k, g in enumerate(_entries(model)):
        res = rightmost_roots(g, k=args.k)
        rows = ((r.real, r.imag, int(res.converged)) for r in res.roots)
        _emit_csv(args, ["re", "im", "converged"], rows, index=k if multi else None)


def cmd_pidtune(args):
    model = _need_model(args)
    if isinstance(model, ModelArray):
        raise ModelError("pidtune needs a single plant, not an array")
    rep = tune_pid(model, args.type, args.wc, args.pm)
    _emit_text(args, dumps(rep.as_dict()))


def cmd_connect(args):
    model = _need_model(args)
    _emit_text(args, dumps(model_to_dict(model)))


def cmd_demo(args):
    if args.name not in demos.DEMOS:
        raise UsageError(f"unknown demo {args.name!r}; choose from {sorted(demos.DEMOS)}")
    demos.DEMOS[args.name](args.out_dir, dt=args.dt or 0.1)


COMMANDS = {
    "sim": cmd_sim, "step": cmd_step, "bode": cmd_bode,
    "nyquist": lambda a: cmd_bode(a, nyquist=True), "margin": cmd_margin,
    "bandwidth": cmd_bandwidth, "dcgain": cmd_dcgain, "pade": cmd_pade,
    "roots": cmd_roots, "pidtune": cmd_pidtune, "connect": cmd_connect, "demo": cmd_demo,
}


def _one_line(exc) -> str:
    return " ".join(str(exc).split())


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"error: usage: {_one_line(exc)}", file=sys.stderr)
        return 1
    except (ModelError, FileNotFoundError) as exc:
        print(f"error: model: {_one_line(exc)}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: numerical: {_one_line(exc)}", file=sys.stderr)
        return 3
    except (TdsError, ValueError) as exc:
        print(f"error: model: {_one_line(exc)}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())

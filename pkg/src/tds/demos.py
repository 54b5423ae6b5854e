"""Case-study reproductions that write CSV/JSON artifacts."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import cases
from .freq import bandwidth, bode_data, margins
from .interconnect import feedback, series
from .io import write_csv, write_json
from .pid import tune_pid
from .sim import simulate, step_metrics, step_response, tank_tracking_reference
from .spectral import pade_model

PID_CROSSOVER = 0.0067
PID_FAST_CROSSOVER = 0.0074


def count_setpoint_crossings(y: np.ndarray, ref: np.ndarray) -> int:
    """Sign changes of ``y - ref`` (exact touches do not count)."""
    e = np.sign(y - ref)
    e = e[e != 0]
    return int(np.count_nonzero(np.diff(e)))


def worst_error(t, y, ref, t0=200.0, t1=1000.0) -> float:
    sel = (t >= t0) & (t <= t1)
    return float(np.max(np.abs(y[sel] - ref[sel])))


@dataclass
class TrackingRun:
    t: np.ndarray
    ref: np.ndarray
    y: np.ndarray


def _track(model, dt=0.1) -> TrackingRun:
    t = cases.tracking_time(dt)
    ref = tank_tracking_reference(t)
    return TrackingRun(t, ref, simulate(model, ref, t).y[:, 0])


def run_tank_pi(out_dir=None, dt: float = 0.1) -> dict:
    """PI loop under the two-level tracking reference."""
    run = _track(cases.pi_loop(), dt)
    summary = {
        "setpoint_crossings": count_setpoint_crossings(run.y, run.ref),
        "worst_error_200_1000": worst_error(run.t, run.y, run.ref),
        "local_maxima": int(np.count_nonzero((np.diff(run.y)[:-1] > 0) & (np.diff(run.y)[1:] <= 0))),
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_csv(out / "tpi_track.csv", ["t", "ref", "y"], zip(run.t, run.ref, run.y))
        write_json(out / "summary.json", summary)
    return {"run": run, "summary": summary}


def run_smith(out_dir=None, dt: float = 0.1) -> dict:
    """Smith predictor: nominal tracking, mismatch robustness, bandwidth and margins."""
    T = cases.smith_loop(cases.perturbed_plants())
    bw = bandwidth(T)
    reps = margins(T)
    table = {
        "gm": [r.gm for r in reps],
        "pm": [r.pm for r in reps],
        "gm_frequency": [r.gm_frequency for r in reps],
        "pm_frequency": [r.pm_frequency for r in reps],
        "truncated": [r.truncated for r in reps],
    }
    runs = [_track(g, dt) for g in T]
    pi_run = _track(cases.pi_loop(), dt)
    summary = {
        "worst_error_200_1000": {
            "smith": worst_error(runs[0].t, runs[0].y, runs[0].ref),
            "pi": worst_error(pi_run.t, pi_run.y, pi_run.ref),
        }
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        t, ref = runs[0].t, runs[0].ref
        write_csv(out / "tsp_track.csv", ["t", "ref", "y_sp", "y_pi"],
                  zip(t, ref, runs[0].y, pi_run.y))
        for label, run in zip(("p1", "p2"), runs[1:]):
            write_csv(out / f"tsp_robust_{label}.csv", ["t", "ref", "y"], zip(t, ref, run.y))
        write_json(out / "bandwidth.json", {"bandwidth": bw, "plants": ["P", "P1", "P2"]})
        write_json(out / "margins.json", table)
        write_json(out / "summary.json", summary)
        bd = bode_data(T)
        header = ["omega"] + [f"{k}_{p}" for p in ("P", "P1", "P2") for k in ("mag_db", "phase_deg")]
        grid = bd[0].omega
        cols = [bode_data(g, grid) for g in T]
        rows = zip(grid, *[c for r in cols for c in (r.mag_db[:, 0, 0], r.phase_deg[:, 0, 0])])
        write_csv(out / "tsp_bode.csv", header, rows)
    return {"loop": T, "bandwidth": bw, "margins": reps, "runs": runs, "pi_run": pi_run,
            "summary": summary}


def run_pidtune(out_dir=None, dt: float = 0.1) -> dict:
    """PID on the exact plant at two crossovers, PID on the order-8 Padé plant."""
    P = cases.tank_plant()
    Pa = pade_model(P, 8)
    rep = tune_pid(P, "PID", PID_CROSSOVER)
    rep_fast = tune_pid(P, "PID", PID_FAST_CROSSOVER)
    rep_pade = tune_pid(Pa, "PID")
    loops = {
        "cpid": feedback(series(rep.controller.to_glti(), P), 1.0),
        "cpidf": feedback(series(rep_fast.controller.to_glti(), P), 1.0),
        "ca": feedback(series(rep_pade.controller.to_glti(), P), 1.0),
    }
    steps = {k: step_response(g, 2000.0, dt) for k, g in loops.items() if k != "ca"}
    metrics = {k: step_metrics(r) for k, r in steps.items()}
    track = {k: _track(g, dt) for k, g in loops.items()}
    sp = _track(cases.smith_loop(), dt)
    result = {
        "reports": {"cpid": rep, "cpidf": rep_fast, "ca": rep_pade},
        "metrics": metrics, "steps": steps, "track": track, "smith": sp,
    }
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_json(out / "metrics.json", {
            k: {"report": result["reports"][k].as_dict(),
                **({"step": metrics[k].as_dict()} if k in metrics else {})}
            for k in ("cpid", "cpidf", "ca")
        })
        t = steps["cpid"].t
        write_csv(out / "pid_step.csv", ["t", "y_cpid", "y_cpidf"],
                  zip(t, steps["cpid"].y[:, 0], steps["cpidf"].y[:, 0]))
        write_csv(out / "pid_track.csv", ["t", "ref", "y_sp", "y_ca", "y_cpid"],
                  zip(sp.t, sp.ref, sp.y, track["ca"].y, track["cpid"].y))
    return result


DEMOS = {"tank-pi": run_tank_pi, "smith": run_smith, "pidtune": run_pidtune}

"""Run an experiment end to end and write its output directory."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import results
from .collocation import advance_rows
from .config import ExperimentConfig
from .grids import Grids, MeasureField
from .time_integration import RunState, advance_to
from .ym import MeasureReconstructor


@dataclass
class RunResult:
    u: np.ndarray
    grids: Grids
    diagnostics: list
    measure: MeasureField | None = None


def _records(state: RunState, i=None):
    rows = []
    for k, (t, dt, res, its) in enumerate(
        zip(state.t_history, state.dt_history, state.residuals, state.lp_iterations), start=1
    ):
        r = dict(step=k, t=t, dt=dt, residual=res, lp_iterations=its)
        if i is not None:
            r["i"] = i
        rows.append(r)
    return rows


def simulate(cfg: ExperimentConfig, progress=None, snapshot=None) -> RunResult:
    """Run ``cfg`` in memory.

    ``snapshot(t, u)`` is called at every requested output time and at the
    final time; ``progress(step, t, dt, residual)`` after every step.
    """
    problem = cfg.make_problem()
    grids = cfg.grids()
    scheme = cfg.scheme()
    u = cfg.initial_moments(grids)
    stops = sorted(set(cfg.output_times) | {cfg.t_final})

    if scheme.mode == "collocation":
        states = [RunState(0.0, u[i : i + 1].copy()) for i in range(u.shape[0])]
        cb = None if progress is None else (lambda i, *a: progress(*a))
        for t_stop in stops:
            states = advance_rows(states, t_stop, problem, grids, scheme, cb)
            if snapshot:
                snapshot(t_stop, np.concatenate([s.u for s in states], axis=0))
        diagnostics = [r for i, s in enumerate(states) for r in _records(s, i)]
        return RunResult(np.concatenate([s.u for s in states], axis=0), grids, diagnostics)

    recon = MeasureReconstructor(grids.phase, cfg.make_entropy(problem), cfg.lambda_f, cfg.workers)
    try:
        state = RunState(0.0, u)
        for t_stop in stops:
            state = advance_to(state, t_stop, scheme, grids, problem, recon, callback=progress)
            if snapshot:
                snapshot(t_stop, state.u)
        measure = recon.solve_field(state.u, "cell", state.t)
    finally:
        recon.close()
    return RunResult(state.u, grids, _records(state), measure)


def run_experiment(cfg: ExperimentConfig, out_dir=None, progress=None) -> RunResult:
    """Run ``cfg`` and write the output directory.

    Files: ``moments_final.csv``, ``snapshots/moments_t<t>.csv`` for each
    requested output time, ``diagnostics.csv``, ``manifest.conf`` (the
    resolved config, which reproduces the run) and, in Young-measure
    mode, ``support_final.csv`` plus ``marginals_final.csv`` for systems.
    """
    out = Path(out_dir if out_dir is not None else cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    grids = cfg.grids()
    (out / results.MANIFEST).write_text(cfg.to_text(), encoding="utf-8")

    def snap(t, u):
        if t in cfg.output_times:
            results.write_moments(out / results.SNAPSHOTS / results.snapshot_name(t), u, grids)

    res = simulate(cfg, progress=progress, snapshot=snap)
    results.write_moments(out / results.MOMENTS_FINAL, res.u, grids)
    results.write_diagnostics(out / results.DIAGNOSTICS, res.diagnostics,
                              with_row=cfg.mode == "collocation")
    if res.measure is not None:
        results.write_support(out / results.SUPPORT_FINAL, res.measure, grids)
        if res.measure.phase.ndim > 1:
            results.write_marginals(out / results.MARGINALS_FINAL, res.measure, grids)
    if cfg.plots:
        from .plots import emit_plots

        emit_plots(out)
    return res

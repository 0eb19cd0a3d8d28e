"""Stochastic collocation: independent deterministic runs per parameter node."""

from __future__ import annotations

import numpy as np

from .errors import ConfigError
from .grids import Grids, StochasticGrid
from .schemes import SchemeConfig
from .time_integration import RunState, advance_to


def run_collocation(problem, grids: Grids, config: SchemeConfig, t_final: float, u0,
                    callback=None) -> tuple[np.ndarray, list[RunState]]:
    """Advance every row ``u0[i]`` on its own, with its own time steps.

    Returns the final moment field and the per-row run states.
    """
    u0 = np.asarray(u0, dtype=float)
    states = [RunState(0.0, u0[i : i + 1].copy()) for i in range(u0.shape[0])]
    states = advance_rows(states, t_final, problem, grids, config, callback)
    return np.concatenate([s.u for s in states], axis=0), states


def advance_rows(states: list[RunState], t_final: float, problem, grids: Grids,
                 config: SchemeConfig, callback=None) -> list[RunState]:
    """Advance one single-row state per parameter node to ``t_final``.

    ``callback(i, step, t, dt, residual)`` is called after every step.
    """
    if config.mode != "collocation":
        raise ConfigError("collocation runs need mode = collocation")
    row_grids = Grids(grids.x, StochasticGrid(grids.xi.xi_min, grids.xi.xi_max, 1))
    out = []
    for i, st in enumerate(states):
        cb = None if callback is None else (lambda *a, _i=i: callback(_i, *a))
        out.append(advance_to(st, t_final, config, row_grids, problem, callback=cb))
    return out

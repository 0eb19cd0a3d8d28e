"""Grid-refinement study against a preset's exact solution."""

from __future__ import annotations

import numpy as np

from .config import ExperimentConfig
from .driver import simulate
from .errors import ConfigError
from .problems import INITIAL_CONDITIONS


def refinement_dt(cfg: ExperimentConfig, n_x: int, base_n_x: int) -> float | None:
    """Fixed step for order 5 so the time error shrinks like ``dx^5``.

    ``dt = cfl * dx0 / s0 * (dx / dx0)^(5/3)`` with ``s0`` the initial wave
    speed; lower orders keep the CFL rule (returns ``None``).
    """
    if cfg.order != 5 or cfg.fixed_dt is not None:
        return cfg.fixed_dt
    u0 = cfg.initial_moments()
    x = cfg.grids().x.centers
    s0 = float(np.max(cfg.make_problem().max_wave_speed(u0, x)))
    dx0 = (cfg.x_max - cfg.x_min) / base_n_x
    dx = (cfg.x_max - cfg.x_min) / n_x
    return cfg.cfl * dx0 / s0 * (dx / dx0) ** (5 / 3)


def convergence_study(cfg: ExperimentConfig, levels: int = 2) -> list[dict]:
    """Run ``cfg`` at ``n_x * 2**l`` for ``l < levels``.

    Returns one dict per level with the grid size, the discrete L1 error
    (averaged over parameter rows) and the observed rate against the
    previous level.
    """
    ic = INITIAL_CONDITIONS[cfg.initial]
    if ic.exact is None:
        raise ConfigError(f"initial data {cfg.initial!r} has no exact solution to compare with")
    if levels < 2:
        raise ConfigError("a convergence study needs at least two levels")
    rows = []
    for level in range(levels):
        n_x = cfg.n_x * 2**level
        c = cfg.with_updates(n_x=n_x, output_times=[])
        c = c.with_updates(fixed_dt=refinement_dt(c, n_x, cfg.n_x))
        res = simulate(c)
        g = res.grids
        X, XI = np.meshgrid(g.x.centers, g.xi.nodes)
        exact = ic.exact(X, XI, c.t_final)
        err = float(np.mean(np.sum(np.abs(res.u - exact), axis=(1, 2)) * g.x.dx))
        rate = float(np.log2(rows[-1]["error"] / err)) if rows else float("nan")
        rows.append({"n_x": n_x, "error": err, "rate": rate})
    return rows

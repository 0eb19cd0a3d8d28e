"""Time marching: SSP-RK3 for orders 2 and 5, the fully discrete march for order 1."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .errors import BlowUpError, PositivityError, SolverError
from .grids import Grids
from .schemes import (
    RhsOutput,
    SchemeConfig,
    cfl_dt,
    conservation_audit,
    first_order_step,
    relative_residual,
    semidiscrete_rhs,
)

MAX_STEPS = 10**7


@dataclass
class RunState:
    """Moment field at time ``t`` plus diagnostics per completed step.

    ``residuals`` holds the largest relative conservation residual of each
    step, ``abs_residuals`` the largest absolute one and ``lp_iterations``
    the simplex iterations spent in it. ``t_history`` is only filled by
    :func:`advance_to`.
    """

    t: float
    u: np.ndarray
    step: int = 0
    dt_history: list = field(default_factory=list)
    t_history: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    abs_residuals: list = field(default_factory=list)
    lp_iterations: list = field(default_factory=list)

    def copy(self) -> "RunState":
        return replace(
            self, u=self.u.copy(), dt_history=list(self.dt_history), t_history=list(self.t_history),
            residuals=list(self.residuals), abs_residuals=list(self.abs_residuals),
            lp_iterations=list(self.lp_iterations),
        )


def _check(u, step, stage):
    if not np.all(np.isfinite(u)):
        raise BlowUpError(f"non-finite values at step {step}, stage {stage}",
                          context={"step": step, "stage": stage})


def ssp_rk3_step(state: RunState, rhs: Callable, dt: float, dx: float | None = None) -> RunState:
    """One three-stage SSP Runge-Kutta step (Shu-Osher form).

    ``rhs(u, stage)`` returns either the time derivative or a
    :class:`RhsOutput`. When it returns the latter and ``dx`` is given,
    the step's conservation residual is recorded using the stage-weighted
    boundary fluxes ``(B0 + B1 + 4 B2) / 6``.
    """
    if not dt > 0:
        raise ValueError(f"time step must be positive, got {dt}")
    u = state.u
    outs = []

    def L(v, stage):
        out = rhs(v, stage)
        outs.append(out)
        d = out.dudt if isinstance(out, RhsOutput) else np.asarray(out)
        _check(d, state.step, stage)
        return d

    u1 = u + dt * L(u, 0)
    _check(u1, state.step, 1)
    u2 = 0.75 * u + 0.25 * (u1 + dt * L(u1, 1))
    _check(u2, state.step, 2)
    un = u / 3 + 2 / 3 * (u2 + dt * L(u2, 2))
    _check(un, state.step, 3)

    new = state.copy()
    new.u = un
    new.t = state.t + dt
    new.step += 1
    new.dt_history.append(dt)
    if all(isinstance(o, RhsOutput) for o in outs):
        new.lp_iterations.append(sum(o.lp_iterations for o in outs))
        if dx is not None:
            bf = (outs[0].boundary_flux + outs[1].boundary_flux + 4 * outs[2].boundary_flux) / 6
            res = conservation_audit(u, un, dt, bf, dx)
            new.residuals.append(float(relative_residual(res, u, dx).max()))
            new.abs_residuals.append(float(res.max()))
    return new


def advance_to(state: RunState, t_final: float, config: SchemeConfig, grids: Grids, problem,
               recon=None, callback: Callable | None = None, max_steps: int = MAX_STEPS) -> RunState:
    """March ``state`` to exactly ``t_final``.

    The time step is evaluated once per step from the state at its start
    and the last step is clipped to land on ``t_final``. ``callback`` is
    called as ``callback(step, t, dt, residual)`` after every step.
    """
    if t_final < state.t:
        raise ValueError(f"t_final {t_final} precedes current time {state.t}")
    if config.young_measure and recon is None:
        raise ValueError("Young-measure mode needs a MeasureReconstructor")
    state = state.copy()
    dx = grids.x.dx
    need_cell_lp = config.young_measure and (
        config.order == 1 or config.fixed_dt is None or config.flux_variant == "mean-field"
    )
    taken = 0
    while state.t < t_final:
        if taken >= max_steps:
            raise SolverError(f"step limit {max_steps} reached at t={state.t}")
        remaining = t_final - state.t
        it0 = recon.iterations if recon is not None else 0
        try:
            measure = recon.solve_field(state.u, "cell", state.t) if need_cell_lp else None
            if config.fixed_dt is not None:
                dt = min(config.fixed_dt, remaining)
            else:
                dt = cfl_dt(state.u, grids, problem, config.cfl, measure, remaining,
                            config.speed_rule)
            last = dt >= remaining
            if last:
                dt = remaining

            if config.order == 1:
                un, bf = first_order_step(state.u, dt, grids, problem, measure, config.bc)
                _check(un, state.step, 1)
                res = conservation_audit(state.u, un, dt, bf, dx)
                new = state.copy()
                new.u, new.t, new.step = un, state.t + dt, state.step + 1
                new.dt_history.append(dt)
                new.residuals.append(float(relative_residual(res, state.u, dx).max()))
                new.abs_residuals.append(float(res.max()))
                new.lp_iterations.append((recon.iterations - it0) if recon is not None else 0)
            else:
                t0 = state.t

                def rhs(v, stage, _m=measure):
                    m = _m if stage == 0 and config.flux_variant == "mean-field" else None
                    return semidiscrete_rhs(v, grids, problem, config, recon, m, t0)

                new = ssp_rk3_step(state, rhs, dt, dx)
                new.lp_iterations[-1] = (recon.iterations - it0) if recon is not None else 0
        except PositivityError as err:
            raise PositivityError(f"step {state.step}, t={state.t}: {err}") from err
        if last:
            new.t = t_final
        new.t_history.append(new.t)
        state = new
        taken += 1
        if callback is not None:
            callback(state.step, state.t, dt, state.residuals[-1])
    return state

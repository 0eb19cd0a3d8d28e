"""Numerical fluxes, semi-discrete right-hand sides and the time-step rule.

Moment fields have shape ``(n_xi, n_x, n)``. In Young-measure mode every
flux evaluation goes through measures reconstructed by a
:class:`~ymlp.ym.MeasureReconstructor`; collocation mode evaluates the
same kernels on point values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BlowUpError, ConfigError
from .grids import Grids, MeasureField
from .reconstruct import interface_states
from .ym import MeasureReconstructor, measure_fluxes, measure_means, measure_speeds

ORDERS = (1, 2, 5)
MODES = ("young-measure", "collocation")
FLUX_VARIANTS = ("mean-field", "interface-lp")
CORRECTIONS = ("flux", "pointvalue")
BOUNDARIES = ("free", "periodic")
CFL_RULES = ("mean", "max")

# ghost cells per side; order 5 needs two extra interface fluxes on each
# side for the correction stencil
GHOSTS = {1: 1, 2: 2, 5: 5}


@dataclass(frozen=True)
class SchemeConfig:
    """Scheme switches.

    ``flux_variant`` selects how interface fluxes are formed in
    Young-measure mode: ``"mean-field"`` reconstructs the field of measure
    means (one LP per cell), ``"interface-lp"`` reconstructs the moments and
    solves LPs at both one-sided interface values. ``correction`` selects
    the order-5 derivative estimate: from interface fluxes (``"flux"``) or
    from point fluxes at cell centers (``"pointvalue"``).

    ``cfl_rule`` picks the Young-measure speed estimate: ``"mean"`` takes
    the ``xi``-expectation of the measure speed averages, ``"max"`` their
    largest value over ``(i, j)``. ``None`` means ``"mean"`` for order 1
    and ``"max"`` for orders 2 and 5, where the mean rule lets the fastest
    rows run at up to ``n_xi`` times the nominal Courant number.
    """

    order: int = 1
    flux_variant: str = "mean-field"
    correction: str = "flux"
    theta: float = 1.5
    cfl: float = 0.45
    mode: str = "young-measure"
    bc: str = "free"
    fixed_dt: float | None = None
    cfl_rule: str | None = None

    def __post_init__(self):
        checks = [
            (self.order in ORDERS, f"order must be one of {ORDERS}, got {self.order}"),
            (self.flux_variant in FLUX_VARIANTS, f"flux_variant must be one of {FLUX_VARIANTS}"),
            (self.correction in CORRECTIONS, f"correction must be one of {CORRECTIONS}"),
            (1 <= self.theta <= 2, f"theta must lie in [1, 2], got {self.theta}"),
            (0 < self.cfl < 1, f"cfl must lie in (0, 1), got {self.cfl}"),
            (self.mode in MODES, f"mode must be one of {MODES}, got {self.mode!r}"),
            (self.bc in BOUNDARIES, f"bc must be one of {BOUNDARIES}, got {self.bc!r}"),
            (self.fixed_dt is None or self.fixed_dt > 0, "fixed_dt must be positive"),
            (self.cfl_rule in (None,) + CFL_RULES, f"cfl_rule must be one of {CFL_RULES}"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)

    @property
    def young_measure(self) -> bool:
        return self.mode == "young-measure"

    @property
    def speed_rule(self) -> str:
        if self.cfl_rule is not None:
            return self.cfl_rule
        return "mean" if self.order == 1 else "max"


@dataclass
class RhsOutput:
    """Semi-discrete right-hand side of one stage.

    ``boundary_flux[:, 0]`` and ``boundary_flux[:, 1]`` are the numerical
    fluxes through the left and right domain ends (used by the
    conservation audit).
    """

    dudt: np.ndarray
    dt: float
    boundary_flux: np.ndarray
    lp_iterations: int = 0


def pad(u, g, bc="free"):
    """Add ``g`` ghost cells on both ends of axis 1."""
    width = [(0, 0)] * np.ndim(u)
    width[1] = (g, g)
    return np.pad(u, width, mode="wrap" if bc == "periodic" else "edge")


def local_speed(u_left, u_right, problem, x=None):
    """Largest absolute eigenvalue over both one-sided states."""
    return np.maximum(problem.max_wave_speed(u_left, x), problem.max_wave_speed(u_right, x))


def llf_flux(u_left, u_right, a, problem, x=None):
    """Local Lax-Friedrichs flux with speed ``a`` (scalar or one per interface)."""
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    a = np.asarray(a, dtype=float)
    if a.ndim:
        a = a[..., None]
    central = 0.5 * (problem.flux(u_left, x) + problem.flux(u_right, x))
    return central - 0.5 * a * (u_right - u_left)


def cell_fluxes(u, grids: Grids, problem, measure: MeasureField | None = None):
    """Flux at cell centers: measure flux averages, or ``f(u, x_j)`` without a measure."""
    x = grids.x.centers
    if measure is not None:
        return measure_fluxes(measure, problem, x)
    return problem.flux(u, x)


def cfl_dt(u, grids: Grids, problem, cfl=0.45, measure: MeasureField | None = None,
           remaining=np.inf, rule="mean") -> float:
    """Time step ``cfl * dx / speed``, capped at ``remaining``.

    With a measure and ``rule="mean"`` the speed is the largest over ``j``
    of the ``xi``-expectation of the measure speed averages; ``rule="max"``
    takes the largest speed average over every ``(i, j)``. Without a
    measure it is the largest pointwise wave speed.
    """
    x = grids.x.centers
    if measure is not None:
        s = measure_speeds(measure, problem, x)
        if rule == "mean":
            speed = float(np.max(grids.xi.dxi * grids.xi.p0 * s.sum(axis=0)))
        elif rule == "max":
            speed = float(np.max(s))
        else:
            raise ValueError(f"unknown CFL rule {rule!r}")
    else:
        speed = float(np.max(problem.max_wave_speed(u, x)))
    if not np.isfinite(speed):
        raise BlowUpError(f"non-finite wave speed {speed}")
    dt = cfl * grids.x.dx / speed if speed > 0 else np.inf
    return min(dt, remaining)


def first_order_step(u, dt, grids: Grids, problem, measure: MeasureField | None = None,
                     bc="free"):
    """One fully discrete Lax-Friedrichs step.

    ``u_j <- (u_{j+1} + u_{j-1}) / 2 - dt / (2 dx) (F_{j+1} - F_{j-1})`` with
    ``F`` the measure flux average (or ``f(u_j)`` without a measure).

    Returns ``(u_new, boundary_flux)``.
    """
    u = np.asarray(u, dtype=float)
    F = cell_fluxes(u, grids, problem, measure)
    up, Fp = pad(u, 1, bc), pad(F, 1, bc)
    lam = dt / grids.x.dx
    new = 0.5 * (up[:, 2:] + up[:, :-2]) - 0.5 * lam * (Fp[:, 2:] - Fp[:, :-2])
    # equivalent flux form, evaluated at the two domain ends
    ends = np.stack([
        0.5 * (Fp[:, 0] + Fp[:, 1]) - 0.5 / lam * (up[:, 1] - up[:, 0]),
        0.5 * (Fp[:, -2] + Fp[:, -1]) - 0.5 / lam * (up[:, -1] - up[:, -2]),
    ], axis=1)
    return new, ends


def aweno_correction(F, dx):
    """Second and fourth flux derivatives at ``x_{j+1/2}`` from five interface fluxes.

    ``F`` holds the fluxes at ``x_{j-3/2} .. x_{j+5/2}`` along axis 0.
    """
    F = np.asarray(F, dtype=float)
    fxx = (-F[0] + 16 * F[1] - 30 * F[2] + 16 * F[3] - F[4]) / (12 * dx**2)
    fxxxx = (F[0] - 4 * F[1] + 6 * F[2] - 4 * F[3] + F[4]) / dx**4
    return fxx, fxxxx


def aweno_correction_legacy(F, dx):
    """Same derivatives from six point fluxes at ``x_{j-2} .. x_{j+3}``."""
    F = np.asarray(F, dtype=float)
    fxx = (-5 * F[0] + 39 * F[1] - 34 * F[2] - 34 * F[3] + 39 * F[4] - 5 * F[5]) / (48 * dx**2)
    fxxxx = (F[0] - 3 * F[1] + 2 * F[2] + 2 * F[3] - 3 * F[4] + F[5]) / (2 * dx**4)
    return fxx, fxxxx


def _require_recon(config, recon):
    if config.young_measure and recon is None:
        raise ValueError("Young-measure mode needs a MeasureReconstructor")


def _interface_fluxes(u, grids: Grids, problem, config: SchemeConfig,
                      recon: MeasureReconstructor | None, measure, t):
    """LLF fluxes at the physical interfaces plus the extra ones order 5 needs.

    Returns ``(F, x_if, measure, iterations)`` where ``F`` has one entry per
    interface ``x_min + dx * k`` for ``k`` in ``-e .. n_x + e``, ``e`` being 0
    for order 2 and 2 for order 5.
    """
    order = config.order
    g = GHOSTS[order]
    e = 0 if order == 2 else 2
    n_x = grids.x.n_x
    x_if = grids.x.x_min + grids.x.dx * np.arange(-e, n_x + e + 1)
    it0 = recon.iterations if recon is not None else 0

    interface_lp = config.young_measure and config.flux_variant == "interface-lp"
    if config.young_measure and measure is None and not interface_lp:
        measure = recon.solve_field(u, "cell", t)
    src = measure_means(measure) if config.young_measure and not interface_lp else u

    minus, plus = interface_states(pad(src, g, config.bc), order, config.theta, problem.lcd)
    if interface_lp:
        m_minus = recon.solve_field(minus, "minus", t)
        m_plus = recon.solve_field(plus, "plus", t)
        s_minus, s_plus = measure_means(m_minus), measure_means(m_plus)
        a = local_speed(s_minus, s_plus, problem, x_if)
        F = 0.5 * (measure_fluxes(m_minus, problem, x_if) + measure_fluxes(m_plus, problem, x_if))
        F = F - 0.5 * a[..., None] * (s_plus - s_minus)
    else:
        a = local_speed(minus, plus, problem, x_if)
        F = llf_flux(minus, plus, a, problem, x_if)
    iters = (recon.iterations - it0) if recon is not None else 0
    return F, x_if, measure, iters


def _dt_estimate(u, grids, problem, config, measure):
    if config.young_measure and measure is not None:
        return cfl_dt(u, grids, problem, config.cfl, measure, rule=config.speed_rule)
    return cfl_dt(u, grids, problem, config.cfl)


def semidiscrete_rhs_order2(u, grids: Grids, problem, config: SchemeConfig,
                            recon: MeasureReconstructor | None = None,
                            measure: MeasureField | None = None, t=None) -> RhsOutput:
    """``-(F_{j+1/2} - F_{j-1/2}) / dx`` with minmod-reconstructed LLF fluxes.

    ``measure`` may carry already solved cell measures of ``u`` (reused
    for the mean field and the time-step estimate).
    """
    if config.order != 2:
        raise ValueError("semidiscrete_rhs_order2 needs order 2")
    _require_recon(config, recon)
    F, _, measure, iters = _interface_fluxes(u, grids, problem, config, recon, measure, t)
    dudt = -(F[:, 1:] - F[:, :-1]) / grids.x.dx
    return RhsOutput(dudt, _dt_estimate(u, grids, problem, config, measure), F[:, [0, -1]], iters)


def semidiscrete_rhs_order5(u, grids: Grids, problem, config: SchemeConfig,
                            recon: MeasureReconstructor | None = None,
                            measure: MeasureField | None = None, t=None) -> RhsOutput:
    """A-WENO right-hand side built from WENO-Z reconstructed LLF fluxes.

    The numerical flux is ``F - dx^2/24 F_xx + 7 dx^4/5760 F_xxxx`` with the
    derivatives estimated from neighbouring interface fluxes
    (``correction="flux"``) or from point fluxes (``"pointvalue"``).
    """
    if config.order != 5:
        raise ValueError("semidiscrete_rhs_order5 needs order 5")
    _require_recon(config, recon)
    dx = grids.x.dx
    n_x = grids.x.n_x
    F, _, measure, iters = _interface_fluxes(u, grids, problem, config, recon, measure, t)
    if config.correction == "flux":
        stencil = [F[:, k : k + n_x + 1] for k in range(5)]
        fxx, fxxxx = aweno_correction(stencil, dx)
    else:
        if config.young_measure:
            if measure is None:
                measure = recon.solve_field(u, "cell", t)
            pts = cell_fluxes(u, grids, problem, measure)
        else:
            pts = cell_fluxes(u, grids, problem)
        # point fluxes x_{j-2} .. x_{j+3} for interface j + 1/2, j = -1 .. n_x - 1
        pp = pad(pts, 3, config.bc)
        stencil = [pp[:, k : k + n_x + 1] for k in range(6)]
        fxx, fxxxx = aweno_correction_legacy(stencil, dx)
    H = F[:, 2 : n_x + 3] - dx**2 / 24 * fxx + 7 * dx**4 / 5760 * fxxxx
    dudt = -(H[:, 1:] - H[:, :-1]) / dx
    return RhsOutput(dudt, _dt_estimate(u, grids, problem, config, measure), H[:, [0, -1]], iters)


def semidiscrete_rhs(u, grids: Grids, problem, config: SchemeConfig,
                     recon: MeasureReconstructor | None = None,
                     measure: MeasureField | None = None, t=None) -> RhsOutput:
    """Dispatch on ``config.order`` (2 or 5)."""
    if config.order == 2:
        return semidiscrete_rhs_order2(u, grids, problem, config, recon, measure, t)
    if config.order == 5:
        return semidiscrete_rhs_order5(u, grids, problem, config, recon, measure, t)
    raise ValueError("order 1 is fully discrete; use first_order_step")


def conservation_audit(before, after, dt, boundary_flux, dx):
    """Telescoping-sum residual per ``(i, component)``.

    ``|sum_j (after - before) dx + dt (H_right - H_left)|`` where
    ``boundary_flux`` has shape ``(n_xi, 2, n)``.
    """
    change = np.sum(np.asarray(after) - np.asarray(before), axis=1) * dx
    net = boundary_flux[:, 1] - boundary_flux[:, 0]
    return np.abs(change + dt * net)


def relative_residual(residual, before, dx):
    """Residual scaled by the total mass ``sum_j |u_j| dx`` of each row and component."""
    scale = np.sum(np.abs(before), axis=1) * dx
    return residual / np.maximum(scale, np.finfo(float).tiny)

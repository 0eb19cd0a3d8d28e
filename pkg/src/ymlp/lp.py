"""Measure-reconstruction linear program and a bounded-variable simplex solver.

For one stochastic node and one cell the LP reads::

    minimize    du * sum_l eta(u_l) mu_l
    subject to  0 <= mu_l <= lambda_f / du
                du * sum_l mu_l = 1
                du * sum_l u_l mu_l = m

The solver is a revised simplex for bounded variables with a dense
``(n+1) x (n+1)`` basis inverse. Cold starts go through an artificial
phase 1; warm starts reuse a previous optimal basis and restore primal
feasibility with the dual simplex (only the right-hand side changes between
time steps, so the old basis stays dual feasible).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InfeasibleError
from .grids import PhaseGrid

FEAS_TOL = 1e-9
COST_TOL = 1e-9
PIVOT_TOL = 1e-11
HULL_SLACK = 1e-7
# dual restarts longer than this fall back to a cold solve (degenerate stalls)
DUAL_MAX_ITER = 40

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
ITERATION_LIMIT = "iteration-limit"


@dataclass(frozen=True)
class Basis:
    """Warm-start description: basic columns (row order) and columns at their upper bound."""

    basic: tuple[int, ...]
    upper: tuple[int, ...] = ()


@dataclass(frozen=True, eq=False)
class _Template:
    A: np.ndarray
    cost: np.ndarray
    upper: np.ndarray
    scale: float
    # equilibrated copies used by the solver
    A_s: np.ndarray
    c_s: np.ndarray
    ub_s: np.ndarray
    row_scale: np.ndarray
    col_scale: np.ndarray
    hull_lo: np.ndarray
    hull_hi: np.ndarray


@dataclass(frozen=True, eq=False)
class LpInstance:
    """Equality rows ``A mu = b`` with bounds ``0 <= mu <= upper``.

    ``cost`` is ``eta(u_l)`` with the positive factor ``scale`` (= du) dropped;
    reported objectives are ``scale * cost @ mu``.
    """

    template: _Template
    b: np.ndarray

    @property
    def A(self):
        return self.template.A

    @property
    def cost(self):
        return self.template.cost

    @property
    def upper(self):
        return self.template.upper

    @property
    def shape(self):
        return self.template.A.shape

    def objective(self, mu) -> float:
        return float(self.template.scale * (self.template.cost @ mu))

    def dump(self) -> str:
        """Plain-text tableau: rows, then bounds, then objective."""
        A, b = self.A, self.b
        lines = [f"# lp {A.shape[0]} rows {A.shape[1]} columns", "rows"]
        for k in range(A.shape[0]):
            lines.append(" ".join(repr(float(a)) for a in A[k]) + f" = {float(b[k])!r}")
        lines.append("bounds")
        lines.extend(f"0 {float(u)!r}" for u in self.upper)
        lines.append("objective")
        lines.append(" ".join(repr(float(c)) for c in self.cost) + f" * {self.template.scale!r}")
        return "\n".join(lines) + "\n"


@dataclass
class LpSolution:
    status: str
    indices: np.ndarray
    values: np.ndarray
    n_columns: int
    objective: float
    iterations: int
    basis: Basis | None = None
    row: int | None = None
    certificate: np.ndarray | None = None

    @property
    def weights(self) -> np.ndarray:
        w = np.zeros(self.n_columns)
        w[self.indices] = self.values
        return w


def _make_template(A, cost, upper, scale, hull_lo, hull_hi) -> _Template:
    col_scale = np.max(np.abs(A), axis=0)
    col_scale[col_scale == 0] = 1.0
    A1 = A / col_scale
    row_scale = 1.0 / np.max(np.abs(A1), axis=1)
    A_s = A1 * row_scale[:, None]
    c_s = cost / col_scale
    cmax = np.max(np.abs(c_s))
    if cmax > 0:
        c_s = c_s / cmax
    for arr in (A, cost, upper, A_s, c_s):
        arr.setflags(write=False)
    return _Template(A, cost, upper, scale, A_s, c_s, upper * col_scale, row_scale, col_scale,
                     hull_lo, hull_hi)


@lru_cache(maxsize=64)
def _template(phase: PhaseGrid, entropy, lambda_f: float) -> _Template:
    du = phase.du
    N = phase.size
    A = np.empty((phase.ndim + 1, N))
    A[0] = du
    A[1:] = du * phase.centers.T
    cost = np.asarray(entropy(phase.centers), dtype=float).copy()
    upper = np.full(N, lambda_f / du)
    lo = phase.centers.min(axis=0)
    hi = phase.centers.max(axis=0)
    return _make_template(A, cost, upper, du, lo, hi)


def assemble_lp(moment, phase: PhaseGrid, entropy, lambda_f: float = 1.0) -> LpInstance:
    """Build the reconstruction LP for one moment vector.

    Moments outside the box hull of the phase centers by at most
    ``HULL_SLACK`` are clipped onto it; larger excursions are left for the
    solver to report as infeasible.
    """
    if not 0 < lambda_f <= 1:
        raise ValueError(f"lambda_f must lie in (0, 1], got {lambda_f}")
    if lambda_f * phase.size < 1 - 1e-12:
        raise InfeasibleError(
            f"lambda_f * cells = {lambda_f * phase.size:g} < 1: total mass cannot reach one", row=0
        )
    m = np.asarray(moment, dtype=float).reshape(-1)
    if m.shape != (phase.ndim,) or not np.all(np.isfinite(m)):
        raise ValueError(f"moment must be a finite vector of length {phase.ndim}, got {moment!r}")
    t = _template(phase, entropy, float(lambda_f))
    m = _project(m, t.hull_lo, t.hull_hi)
    return LpInstance(t, np.concatenate([[1.0], m]))


def _project(m, lo, hi):
    below = (m < lo) & (m >= lo - HULL_SLACK)
    above = (m > hi) & (m <= hi + HULL_SLACK)
    if below.any() or above.any():
        m = np.where(below, lo, np.where(above, hi, m))
    return m


def general_lp(A, b, cost, upper) -> LpInstance:
    """Wrap an arbitrary ``A x = b, 0 <= x <= upper`` problem (used by tests and self-checks)."""
    A = np.array(A, dtype=float)
    t = _make_template(A, np.array(cost, dtype=float), np.array(upper, dtype=float), 1.0,
                       np.full(1, -np.inf), np.full(1, np.inf))
    return LpInstance(t, np.asarray(b, dtype=float))


# ---------------------------------------------------------------------------
# simplex kernels; all work on the equilibrated arrays with lower bounds 0


class _State:
    __slots__ = ("basis", "is_basic", "at_upper")

    def __init__(self, basis, n, upper=()):
        self.basis = np.array(basis, dtype=np.int64)
        self.is_basic = np.zeros(n, dtype=bool)
        self.is_basic[self.basis] = True
        self.at_upper = np.zeros(n, dtype=bool)
        if len(upper):
            self.at_upper[np.asarray(upper, dtype=np.int64)] = True

    def primal(self, A, b, ub):
        up = np.flatnonzero(self.at_upper)
        rhs = b - A[:, up] @ ub[up] if len(up) else b
        Binv = np.linalg.inv(A[:, self.basis])
        return Binv, Binv @ rhs


def _primal_simplex(A, b, c, ub, st: _State, max_iter, bland_after):
    """Primal bounded simplex from a primal-feasible basis.

    Returns ``(status, iterations, Binv, xB)``.
    """
    ub_fin = np.where(np.isfinite(ub), ub, np.inf)
    movable = ub > 0
    degenerate = 0
    it = 0
    while True:
        Binv, xB = st.primal(A, b, ub)
        y = c[st.basis] @ Binv
        d = c - y @ A
        elig = ~st.is_basic & movable & np.where(st.at_upper, d > COST_TOL, d < -COST_TOL)
        if not elig.any():
            return OPTIMAL, it, Binv, xB
        if it >= max_iter:
            return ITERATION_LIMIT, it, Binv, xB
        it += 1
        if degenerate > bland_after:
            q = int(np.argmax(elig))
        else:
            q = int(np.argmax(np.where(elig, np.abs(d), -1.0)))
        direction = -1.0 if st.at_upper[q] else 1.0
        rate = -direction * (Binv @ A[:, q])

        ubB = ub_fin[st.basis]
        xc = np.clip(xB, 0.0, ubB)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_dec = np.where(rate < -PIVOT_TOL, xc / -rate, np.inf)
            t_inc = np.where(rate > PIVOT_TOL, (ubB - xc) / rate, np.inf)
        t_row = np.minimum(t_dec, t_inc)
        t_min = t_row.min(initial=np.inf)
        if ub_fin[q] <= t_min:
            t_best, leave = ub_fin[q], -1
        else:
            t_best = t_min
            ties = np.flatnonzero(t_row <= t_min + 1e-12)
            leave = int(ties[np.argmin(st.basis[ties])])
            to_upper = bool(t_inc[leave] < t_dec[leave])
        if not np.isfinite(t_best):
            # unbounded direction; cannot happen with finite bounds on the structurals
            return ITERATION_LIMIT, it, Binv, xB
        degenerate = degenerate + 1 if t_best <= 1e-12 else 0
        if leave < 0:
            st.at_upper[q] = not st.at_upper[q]
            continue
        out = st.basis[leave]
        st.is_basic[out] = False
        st.at_upper[out] = to_upper
        st.basis[leave] = q
        st.is_basic[q] = True
        st.at_upper[q] = False


def _dual_simplex(A, b, c, ub, st: _State, max_iter):
    """Dual simplex from a dual-feasible basis.

    Returns ``(status, iterations, Binv, xB, row)``; status ``None`` means the
    starting basis was not dual feasible.
    """
    movable = ub > 0
    it = 0
    while True:
        Binv, xB = st.primal(A, b, ub)
        y = c[st.basis] @ Binv
        d = c - y @ A
        if it == 0:
            bad = ~st.is_basic & movable & np.where(st.at_upper, d > COST_TOL, d < -COST_TOL)
            if bad.any():
                return None, it, Binv, xB, None
        ubB = ub[st.basis]
        below = -xB
        above = xB - ubB
        viol = np.maximum(below, above)
        r = int(np.argmax(viol))
        if viol[r] <= FEAS_TOL:
            return OPTIMAL, it, Binv, xB, None
        if it >= max_iter:
            return ITERATION_LIMIT, it, Binv, xB, None
        it += 1
        alpha = Binv[r] @ A
        going_down = below[r] >= above[r]
        sgn = -1.0 if going_down else 1.0
        # entering from lower must have sgn*alpha > 0, from upper sgn*alpha < 0
        s_alpha = sgn * alpha
        cand = ~st.is_basic & movable & np.where(st.at_upper, s_alpha < -PIVOT_TOL, s_alpha > PIVOT_TOL)
        if not cand.any():
            return INFEASIBLE, it, Binv, xB, r
        ratio = np.where(cand, np.abs(d) / np.where(cand, np.abs(alpha), 1.0), np.inf)
        q = int(np.argmin(ratio))
        out = st.basis[r]
        st.is_basic[out] = False
        st.at_upper[out] = not going_down
        st.basis[r] = q
        st.is_basic[q] = True
        st.at_upper[q] = False


def solve(instance: LpInstance, warm_start: Basis | None = None) -> LpSolution:
    """Solve a reconstruction LP to an optimal basic feasible solution.

    Parameters
    ----------
    instance : LpInstance
    warm_start : Basis, optional
        A basis of a previous solve on the same template; used for a dual
        simplex restart when it is still dual feasible.

    Returns
    -------
    LpSolution
        ``status`` is ``"optimal"``, ``"infeasible"`` (``row`` and
        ``certificate`` identify the Farkas ray) or ``"iteration-limit"``.
    """
    t = instance.template
    A, c, ub = t.A_s, t.c_s, t.ub_s
    b = instance.b * t.row_scale
    m, N = A.shape
    max_iter = 10 * N
    iters = 0

    if warm_start is not None and len(warm_start.basic) == m:
        st = _State(warm_start.basic, N, warm_start.upper)
        try:
            status, it, Binv, xB, row = _dual_simplex(A, b, c, ub, st, DUAL_MAX_ITER)
        except np.linalg.LinAlgError:
            status, it = None, 0
        iters += it
        if status == OPTIMAL:
            return _finish(instance, st, xB, iters)
        if status == INFEASIBLE:
            return _infeasible(instance, Binv[row], row, iters)
        if status is None:
            # dual infeasible: continue primal if the basis happens to be primal feasible
            if np.all(xB >= -FEAS_TOL) and np.all(xB <= ub[st.basis] + FEAS_TOL):
                status, it, Binv, xB = _primal_simplex(A, b, c, ub, st, max_iter - iters, 3 * N)
                iters += it
                if status == OPTIMAL:
                    return _finish(instance, st, xB, iters)

    return _cold(instance, A, b, c, ub, max_iter, iters)


def _cold(instance, A, b, c, ub, max_iter, iters):
    m, N = A.shape
    sign = np.where(b < 0, -1.0, 1.0)
    A1 = np.hstack([A, np.diag(sign)])
    ub1 = np.concatenate([ub, np.full(m, np.inf)])
    c1 = np.concatenate([np.zeros(N), np.ones(m)])
    st = _State(np.arange(N, N + m), N + m)
    status, it, Binv, xB = _primal_simplex(A1, b, c1, ub1, st, max_iter, 3 * N)
    iters += it
    if status != OPTIMAL:
        return LpSolution(ITERATION_LIMIT, np.zeros(0, dtype=np.int64), np.zeros(0), N, np.nan, iters)
    infeas = float(c1[st.basis] @ xB)
    if infeas > FEAS_TOL:
        y = c1[st.basis] @ Binv
        art = st.basis >= N
        row = int(st.basis[art][np.argmax(xB[art])] - N)
        return _infeasible(instance, y, row, iters)

    # drive zero-level artificials out of the basis with degenerate pivots
    for k in range(m):
        if st.basis[k] < N:
            continue
        alpha = Binv[k] @ A
        cand = ~st.is_basic[:N] & (ub > 0) & (np.abs(alpha) > 1e-9)
        if cand.any():
            q = int(np.argmax(cand))
            st.is_basic[st.basis[k]] = False
            st.basis[k] = q
            st.is_basic[q] = True
            st.at_upper[q] = False
            Binv, xB = st.primal(A1, b, ub1)
    ub1[N:] = 0.0
    if np.any(st.basis >= N):
        # redundant row keeps an artificial, fixed at zero
        c2 = np.concatenate([c, np.zeros(m)])
        status, it, Binv, xB = _primal_simplex(A1, b, c2, ub1, st, max_iter - iters, 3 * N)
        iters += it
        sol = _finish(instance, st, xB, iters, n_struct=N)
        sol.basis = None
        if status != OPTIMAL:
            sol.status = ITERATION_LIMIT
        return sol

    st2 = _State(st.basis, N, np.flatnonzero(st.at_upper[:N]))
    status, it, Binv, xB = _primal_simplex(A, b, c, ub, st2, max_iter - iters, 3 * N)
    iters += it
    sol = _finish(instance, st2, xB, iters)
    if status != OPTIMAL:
        sol.status = ITERATION_LIMIT
    return sol


def _finish(instance, st: _State, xB, iters, n_struct=None):
    t = instance.template
    N = t.A.shape[1] if n_struct is None else n_struct
    ub = t.ub_s
    basic = st.basis
    keep = basic < N
    up = np.flatnonzero(st.at_upper[:N])
    idx = np.concatenate([basic[keep], up])
    xs = np.concatenate([np.clip(xB[keep], 0.0, ub[basic[keep]]), ub[up]])
    nz = xs > 0
    idx, xs = idx[nz], xs[nz]
    order = np.argsort(idx, kind="stable")
    idx = idx[order]
    mu = xs[order] / t.col_scale[idx]
    obj = float(t.scale * (t.cost[idx] @ mu))
    basis = Basis(tuple(int(k) for k in basic), tuple(int(k) for k in up))
    return LpSolution(OPTIMAL, idx.astype(np.int64), mu, N, obj, iters, basis)


def _infeasible(instance, y, row, iters):
    N = instance.template.A.shape[1]
    return LpSolution(INFEASIBLE, np.zeros(0, dtype=np.int64), np.zeros(0), N, np.nan, iters,
                      row=int(row), certificate=np.asarray(y, dtype=float).copy())


def primal_residual(instance: LpInstance, mu) -> float:
    """Max violation of the equality rows and bounds, in equilibrated units."""
    t = instance.template
    mu = np.asarray(mu, dtype=float)
    eq = np.abs((t.A @ mu - instance.b) * t.row_scale)
    x = mu * t.col_scale
    bnd = np.maximum(np.maximum(-x, 0), np.maximum(x - t.ub_s, 0))
    return float(max(eq.max(initial=0.0), bnd.max(initial=0.0)))


# ---------------------------------------------------------------------------
# averages against a (sparse or dense) measure


def _support(weights, phase: PhaseGrid):
    if isinstance(weights, LpSolution):
        return phase.centers[weights.indices], weights.values
    w = np.asarray(weights, dtype=float)
    idx = np.flatnonzero(w)
    return phase.centers[idx], w[idx]


def measure_mean(weights, phase: PhaseGrid) -> np.ndarray:
    """``du * sum_l u_l mu_l``."""
    u, w = _support(weights, phase)
    return phase.du * (w @ u)


def measure_flux_average(weights, phase: PhaseGrid, problem, x=None) -> np.ndarray:
    """``du * sum_l f(u_l, x) mu_l``."""
    u, w = _support(weights, phase)
    xx = None if x is None else np.full(len(u), float(x))
    return phase.du * (w @ problem.flux(u, xx))


def measure_speed_average(weights, phase: PhaseGrid, problem, x=None) -> float:
    """``du * sum_l sigma(u_l) mu_l`` with sigma the spectral radius."""
    u, w = _support(weights, phase)
    xx = None if x is None else np.full(len(u), float(x))
    return float(phase.du * (w @ problem.max_wave_speed(u, xx)))

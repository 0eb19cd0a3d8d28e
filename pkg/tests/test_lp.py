import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ymlp.errors import InfeasibleError
from ymlp.grids import build_phase_grid
from ymlp.lp import (
    FEAS_TOL,
    INFEASIBLE,
    OPTIMAL,
    assemble_lp,
    general_lp,
    measure_flux_average,
    measure_mean,
    measure_speed_average,
    primal_residual,
    solve,
)
from ymlp.lp_oracle import enumerate_vertices, random_reconstruction_lp
from ymlp.problems import EntropySpec, burgers, isentropic_euler, kruzhkov_entropy, quadratic_entropy

QUAD = quadratic_entropy()
G4 = build_phase_grid([(-1, 1)], [4])


def test_assemble_burgers_shape():
    inst = assemble_lp([0.25], G4, QUAD)
    assert inst.shape == (2, 4)
    assert inst.upper.tolist() == [2.0] * 4
    assert inst.b.tolist() == [1.0, 0.25]


def test_assemble_euler_shape():
    g = build_phase_grid([(0.3, 1.8), (0.3, 1.3)], [25, 25])
    inst = assemble_lp([1.0, 1.0], g, isentropic_euler().entropies["euler"])
    assert inst.shape == (3, 625)


def test_assemble_small_support_factor_bound():
    g = build_phase_grid([(-2, 2)], [100])
    inst = assemble_lp([1.0], g, QUAD, 0.05)
    assert inst.upper == pytest.approx(np.full(100, 1.25))


def test_assemble_rejects_unreachable_mass():
    with pytest.raises(InfeasibleError):
        assemble_lp([0.0], G4, QUAD, 0.2)
    with pytest.raises(ValueError):
        assemble_lp([0.0], G4, QUAD, 1.5)


def test_atomic_solution_on_center():
    g = build_phase_grid([(-1, 1)], [12])
    for l in range(12):
        sol = solve(assemble_lp(g.centers[l], g, QUAD))
        assert sol.status == OPTIMAL
        w = sol.weights
        assert w[l] == pytest.approx(1 / g.du, abs=1e-9)
        assert np.abs(np.delete(w, l)).max() < 1e-9
        best, _ = enumerate_vertices(*_oracle_args(assemble_lp(g.centers[l], g, QUAD)))
        assert sol.objective == pytest.approx(best, abs=1e-12)
        assert sol.objective == pytest.approx(0.5 * g.centers[l, 0] ** 2, abs=1e-12)


def test_outside_hull_is_infeasible():
    sol = solve(assemble_lp([1.75], G4, QUAD))
    assert sol.status == INFEASIBLE
    assert sol.row is not None


def test_symmetric_two_point_support():
    sol = solve(assemble_lp([0.0], G4, QUAD))
    assert sol.status == OPTIMAL
    assert sol.weights == pytest.approx([0, 1.0, 1.0, 0], abs=1e-12)
    best, x = enumerate_vertices(*_oracle_args(assemble_lp([0.0], G4, QUAD)))
    assert x == pytest.approx(sol.weights, abs=1e-12)


def _oracle_args(inst):
    return inst.A, inst.b, inst.cost * inst.template.scale, inst.upper


def test_hull_slack_is_clipped():
    sol = solve(assemble_lp([0.75 + 5e-8], G4, QUAD))
    assert sol.status == OPTIMAL
    assert sol.weights[3] == pytest.approx(2.0)


def test_general_lp_matches_enumeration():
    inst = general_lp([[1.0, 1.0, 1.0], [0.0, 1.0, 2.0]], [1.5, 1.0], [3.0, 2.0, 1.0],
                      [1.0, 1.0, 1.0])
    sol = solve(inst)
    best, x = enumerate_vertices(inst.A, inst.b, inst.cost, inst.upper)
    assert sol.status == OPTIMAL
    assert sol.objective == pytest.approx(best, abs=1e-12)
    assert sol.weights == pytest.approx(x, abs=1e-12)


def test_measure_mean_examples():
    g = build_phase_grid([(-1, 1)], [4])
    atomic = np.array([0, 0, 2.0, 0])
    assert measure_mean(atomic, g) == pytest.approx([0.25])
    assert measure_mean(np.array([0, 1.0, 1.0, 0]), g) == pytest.approx([0.0])
    sol = solve(assemble_lp([0.3], g, QUAD))
    assert abs(measure_mean(sol, g)[0] - 0.3) <= 1e-9


def test_measure_flux_average_examples():
    p = burgers()
    g = build_phase_grid([(-1.5, 1.5)], [3])  # centers -1, 0, 1
    assert measure_flux_average(np.array([0, 0, 1.0]), g, p) == pytest.approx([0.5])
    # two atoms at +-a, a = 1: each contributes a^2 / 2
    assert measure_flux_average(np.array([0.5, 0, 0.5]), g, p) == pytest.approx([0.5])
    ge = build_phase_grid([(0.5, 1.5), (0.5, 1.5)], [3, 3])  # contains (1, 1)
    w = np.zeros(9)
    w[4] = 1 / ge.du
    assert measure_flux_average(w, ge, isentropic_euler()) == pytest.approx([1.0, 2.0])


def test_measure_speed_average_examples():
    p = burgers()
    g = build_phase_grid([(-3, 1)], [2])  # centers -2, 0
    assert measure_speed_average(np.array([1 / g.du, 0]), g, p) == pytest.approx(2.0)
    uniform = np.full(4, 0.5)
    assert measure_speed_average(uniform, G4, p) == pytest.approx(0.5)
    ge = build_phase_grid([(0.5, 1.5), (-0.5, 0.5)], [3, 3])  # contains (1, 0)
    w = np.zeros(9)
    w[4] = 1 / ge.du
    assert measure_speed_average(w, ge, isentropic_euler()) == pytest.approx(np.sqrt(1.5))


def test_dump_lists_rows_bounds_objective():
    text = assemble_lp([0.25], G4, QUAD).dump()
    lines = text.splitlines()
    assert lines[0] == "# lp 2 rows 4 columns"
    assert lines[1] == "rows" and lines[4] == "bounds" and lines[9] == "objective"


def test_oracle_equivalence_sample():
    rng = np.random.default_rng(7)
    for _ in range(40):
        inst = random_reconstruction_lp(rng)
        sol = solve(inst)
        best, _ = enumerate_vertices(*_oracle_args(inst))
        assert sol.status == OPTIMAL
        assert sol.objective == pytest.approx(best, abs=1e-8)


def test_solution_feasibility_and_dual_signs():
    rng = np.random.default_rng(11)
    for _ in range(50):
        inst = random_reconstruction_lp(rng)
        sol = solve(inst)
        mu = sol.weights
        assert primal_residual(inst, mu) <= FEAS_TOL
        # reduced costs: with duals from the basic columns, nonbasic columns
        # at zero must have d >= 0 and those at the cap d <= 0
        basic = list(sol.basis.basic)
        c = inst.cost
        y = np.linalg.solve(inst.A[:, basic].T, c[basic])
        d = c - inst.A.T @ y
        at_upper = set(sol.basis.upper)
        for k in range(len(c)):
            if k in basic:
                continue
            if k in at_upper:
                assert d[k] <= 1e-9 * max(1.0, np.abs(c).max())
            else:
                assert d[k] >= -1e-9 * max(1.0, np.abs(c).max())


@given(st.integers(0, 2**31 - 1))
def test_basic_solution_structure(seed):
    inst = random_reconstruction_lp(np.random.default_rng(seed))
    sol = solve(inst)
    mu = sol.weights
    cap = inst.upper
    tol = 1e-9
    interior = np.sum((mu > tol) & (mu < cap - tol))
    assert interior <= inst.shape[0]


@given(st.integers(0, 2**31 - 1), st.floats(1e-3, 1e3))
def test_objective_scaling_keeps_argmin(seed, factor):
    rng = np.random.default_rng(seed)
    g = build_phase_grid([(-1, 1)], [int(rng.integers(3, 15))])
    m = [float(rng.uniform(g.centers.min(), g.centers.max()))]
    base = kruzhkov_entropy(float(rng.uniform(-1, 1)))
    scaled = EntropySpec("scaled", lambda u, f=base.evaluate: factor * f(u))
    a = solve(assemble_lp(m, g, base))
    b = solve(assemble_lp(m, g, scaled))
    assert np.array_equal(a.indices, b.indices)
    assert a.values == pytest.approx(b.values, abs=1e-12)


def test_never_infeasible_inside_hull():
    rng = np.random.default_rng(3)
    g1 = build_phase_grid([(-1, 1)], [10])
    g2 = build_phase_grid([(0.3, 1.8), (0.3, 1.3)], [5, 5])
    e2 = isentropic_euler().entropies["euler"]
    for _ in range(5000):
        sol = solve(assemble_lp([rng.uniform(-0.9, 0.9)], g1, QUAD))
        assert sol.status == OPTIMAL
    for _ in range(5000):
        m = [rng.uniform(0.45, 1.65), rng.uniform(0.4, 1.2)]
        assert solve(assemble_lp(m, g2, e2)).status == OPTIMAL


def test_warm_start_matches_cold_over_a_run():
    from ymlp.grids import Grids, SpatialGrid, StochasticGrid
    from ymlp.problems import initial_data
    from ymlp.schemes import SchemeConfig, cfl_dt, first_order_step
    from ymlp.ym import MeasureReconstructor

    p = burgers()
    g = build_phase_grid([(-1.5, 1.5)], [60])
    grids = Grids(SpatialGrid(0, 1, 40), StochasticGrid(-1, 1, 3), g)
    u = initial_data("example1")(grids.x.centers, grids.xi.nodes)
    recon = MeasureReconstructor(g, QUAD)
    for _ in range(50):
        warm = recon.solve_field(u)
        for i in range(u.shape[0]):
            for j in range(u.shape[1]):
                cold = solve(assemble_lp(u[i, j], g, QUAD))
                obj_warm = g.du * float(QUAD(g.centers[warm.cell(i, j)[0]]) @ warm.cell(i, j)[1])
                assert obj_warm == pytest.approx(cold.objective, abs=1e-10)
        dt = cfl_dt(u, grids, p, 0.45, warm)
        u, _ = first_order_step(u, dt, grids, p, warm)
    assert SchemeConfig().order == 1

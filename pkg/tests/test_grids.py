import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ymlp.errors import ConfigError
from ymlp.grids import (
    MeasureField,
    SpatialGrid,
    StochasticGrid,
    build_phase_grid,
    flatten_index,
    marginal,
    unflatten_index,
)


def test_phase_grid_four_cells():
    g = build_phase_grid([(-1, 1)], [4])
    assert g.centers[:, 0].tolist() == [-0.75, -0.25, 0.25, 0.75]
    assert g.du == 0.5


def test_phase_grid_euler_box():
    g = build_phase_grid([(0.3, 1.8), (0.3, 1.3)], [25, 25])
    assert g.centers.shape == (625, 2)
    assert g.du == pytest.approx(0.06 * 0.04, rel=1e-14)


def test_phase_grid_two_cells():
    g = build_phase_grid([(0, 1)], [2])
    assert g.centers[:, 0].tolist() == [0.25, 0.75]
    assert g.du == 0.5


def test_phase_grid_node_layout_includes_ends():
    g = build_phase_grid([(-1, 1)], [5], layout="node")
    assert g.centers[:, 0].tolist() == [-1.0, -0.5, 0.0, 0.5, 1.0]
    assert g.du == 0.5


@pytest.mark.parametrize("bounds,counts", [([(1, 1)], [4]), ([(0, 1)], [1]), ([(2, 1)], [3])])
def test_phase_grid_rejects_degenerate(bounds, counts):
    with pytest.raises(ConfigError):
        build_phase_grid(bounds, counts)


def test_phase_grid_rejects_unknown_layout():
    with pytest.raises(ConfigError):
        build_phase_grid([(0, 1)], [3], layout="staggered")


def test_flatten_examples():
    assert flatten_index((0, 0), (25, 25)) == 0
    assert flatten_index((1, 0), (25, 25)) == 25
    assert flatten_index((24, 24), (25, 25)) == 624


def test_flatten_out_of_range():
    with pytest.raises(IndexError):
        flatten_index((25, 0), (25, 25))


@given(st.integers(1, 50), st.integers(1, 50), st.data())
def test_flatten_roundtrip(a, b, data):
    multi = (data.draw(st.integers(0, a - 1)), data.draw(st.integers(0, b - 1)))
    assert unflatten_index(flatten_index(multi, (a, b)), (a, b)) == multi


@given(
    st.lists(
        st.tuples(st.floats(-5, 5), st.floats(0.01, 5), st.integers(2, 30)), min_size=1, max_size=2
    )
)
def test_cell_volumes_fill_box(axes):
    bounds = [(lo, lo + w) for lo, w, _ in axes]
    counts = [c for *_, c in axes]
    g = build_phase_grid(bounds, counts)
    volume = np.prod([w for _, w, _ in axes])
    assert g.du * g.size == pytest.approx(volume, rel=1e-12)


def test_marginal_atomic():
    g = build_phase_grid([(0, 1), (0, 1)], [3, 4])
    w = np.zeros(g.size)
    w[flatten_index((2, 1), g.counts)] = 1 / g.du
    m0 = marginal(w, 0, g)
    assert np.flatnonzero(m0).tolist() == [2]
    assert m0[2] * g.widths[0] == pytest.approx(1.0)


def test_marginal_uniform():
    g = build_phase_grid([(0, 1), (0, 2)], [4, 5])
    w = np.full(g.size, 1 / (g.du * g.size))
    m1 = marginal(w, 1, g)
    assert np.allclose(m1, m1[0])


def test_marginal_two_by_two_hand_sum():
    g = build_phase_grid([(0, 1), (0, 3)], [2, 2])
    w = np.array([0.1, 0.2, 0.3, 0.4])
    m0 = marginal(w, 0, g)
    assert m0 == pytest.approx([(0.1 + 0.2) * 1.5, (0.3 + 0.4) * 1.5])


@given(st.integers(0, 2**31 - 1))
def test_marginals_of_measure_field_normalize(seed):
    rng = np.random.default_rng(seed)
    g = build_phase_grid([(0, 1), (-1, 2)], [4, 3])
    cells = []
    for _ in range(6):
        idx = np.sort(rng.choice(g.size, size=int(rng.integers(1, 5)), replace=False))
        w = rng.random(len(idx)) + 0.1
        cells.append((idx, w / (w.sum() * g.du)))
    field = MeasureField.from_cells((2, 3), cells, g)
    for k in range(2):
        m = marginal(field, k, g)
        assert np.all(m >= 0)
        assert np.allclose(m.sum(axis=-1) * g.widths[k], 1.0, atol=1e-10)


def test_measure_field_cell_access():
    g = build_phase_grid([(-1, 1)], [4])
    field = MeasureField.from_cells((1, 2), [([1], [2.0]), ([0, 3], [1.0, 1.0])], g)
    idx, w = field.cell(0, 1)
    assert idx.tolist() == [0, 3] and w.tolist() == [1.0, 1.0]
    assert field.dense(0, 0).tolist() == [0, 2.0, 0, 0]
    assert field.cell_sums(g.centers[field.indices])[0, :, 0] == pytest.approx([-0.25, 0.0])


def test_spatial_grid_geometry():
    g = SpatialGrid(-1.0, 1.0, 100)
    assert g.dx == 0.02
    assert not np.any(g.centers == 0.0)
    assert g.interfaces[50] == 0.0
    assert len(g.extended_centers(3)) == 106


def test_stochastic_nodes_are_midpoints():
    g = StochasticGrid(-1.0, 1.0, 10)
    assert g.nodes == pytest.approx(np.linspace(-0.9, 0.9, 10))
    assert g.p0 == 0.5 and g.dxi == pytest.approx(0.2)


def test_grid_rejects_bad_sizes():
    with pytest.raises(ConfigError):
        SpatialGrid(0, 1, 0)
    with pytest.raises(ConfigError):
        StochasticGrid(1, 0, 3)

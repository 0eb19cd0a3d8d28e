"""Spatial, stochastic and phase-space grids plus the measure container.

Moment fields are plain ``ndarray`` objects of shape ``(n_xi, n_x, n)``;
everything here is immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigError


@dataclass(frozen=True)
class SpatialGrid:
    x_min: float
    x_max: float
    n_x: int

    def __post_init__(self):
        if self.n_x < 1 or not self.x_max > self.x_min:
            raise ConfigError(f"bad spatial grid [{self.x_min}, {self.x_max}] / {self.n_x}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_x

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(self.n_x) + 0.5)

    @property
    def interfaces(self) -> np.ndarray:
        """The ``n_x + 1`` cell edges, from ``x_min`` to ``x_max``."""
        return self.x_min + self.dx * np.arange(self.n_x + 1)

    def extended_centers(self, n_ghost: int) -> np.ndarray:
        return self.x_min + self.dx * (np.arange(-n_ghost, self.n_x + n_ghost) + 0.5)


@dataclass(frozen=True)
class StochasticGrid:
    """Midpoints of ``n_xi`` equal subintervals of the parameter range.

    ``n_xi == 1`` encodes a deterministic problem.
    """

    xi_min: float = -1.0
    xi_max: float = 1.0
    n_xi: int = 1

    def __post_init__(self):
        if self.n_xi < 1 or not self.xi_max > self.xi_min:
            raise ConfigError(f"bad stochastic grid [{self.xi_min}, {self.xi_max}] / {self.n_xi}")

    @property
    def dxi(self) -> float:
        return (self.xi_max - self.xi_min) / self.n_xi

    @property
    def p0(self) -> float:
        return 1.0 / (self.xi_max - self.xi_min)

    @property
    def nodes(self) -> np.ndarray:
        return self.xi_min + self.dxi * (np.arange(self.n_xi) + 0.5)


@dataclass(frozen=True, eq=False)
class PhaseGrid:
    """Uniform tensor grid of the state space, flattened in row-major order."""

    lower: tuple[float, ...]
    upper: tuple[float, ...]
    counts: tuple[int, ...]
    centers: np.ndarray = field(repr=False)
    widths: tuple[float, ...]
    layout: str = "cell"

    @property
    def ndim(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def du(self) -> float:
        """Phase-space volume element (product of the cell widths)."""
        return float(np.prod(self.widths))

    def axis_centers(self, k: int) -> np.ndarray:
        offset = 0.5 if self.layout == "cell" else 0.0
        return self.lower[k] + self.widths[k] * (np.arange(self.counts[k]) + offset)


def build_phase_grid(bounds: Sequence[Sequence[float]], counts: Sequence[int] | int,
                     layout: str = "cell") -> PhaseGrid:
    """Build a uniform phase grid.

    Parameters
    ----------
    bounds : sequence of (lo, hi)
        One interval per conserved component.
    counts : sequence of int or int
        Points per component; a single int is reused for every component.
    layout : {"cell", "node"}
        ``"cell"`` places points at the midpoints of ``counts`` equal cells;
        ``"node"`` places them at ``linspace(lo, hi, counts)``, including
        both ends.

    Examples
    --------
    >>> g = build_phase_grid([(-1, 1)], [4])
    >>> g.centers[:, 0].tolist(), g.du
    ([-0.75, -0.25, 0.25, 0.75], 0.5)
    """
    bounds = [tuple(map(float, b)) for b in bounds]
    if isinstance(counts, (int, np.integer)):
        counts = [int(counts)] * len(bounds)
    counts = tuple(int(c) for c in counts)
    if len(counts) != len(bounds) or not bounds:
        raise ConfigError("phase bounds and counts must have the same nonzero length")
    for (lo, hi), c in zip(bounds, counts):
        if not hi > lo:
            raise ConfigError(f"degenerate phase interval [{lo}, {hi}]")
        if c < 2:
            raise ConfigError(f"phase cell count must be >= 2, got {c}")

    if layout == "cell":
        widths = tuple((hi - lo) / c for (lo, hi), c in zip(bounds, counts))
        axes = [lo + w * (np.arange(c) + 0.5) for (lo, _), w, c in zip(bounds, widths, counts)]
    elif layout == "node":
        widths = tuple((hi - lo) / (c - 1) for (lo, hi), c in zip(bounds, counts))
        axes = [np.linspace(lo, hi, c) for (lo, hi), c in zip(bounds, counts)]
    else:
        raise ConfigError(f"phase layout must be 'cell' or 'node', got {layout!r}")
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack([m.ravel() for m in mesh], axis=-1)
    centers.setflags(write=False)
    return PhaseGrid(
        lower=tuple(b[0] for b in bounds),
        upper=tuple(b[1] for b in bounds),
        counts=counts,
        centers=centers,
        widths=widths,
        layout=layout,
    )


def flatten_index(multi_index: Sequence[int], counts: Sequence[int]) -> int:
    for m, c in zip(multi_index, counts):
        if not 0 <= m < c:
            raise IndexError(f"phase index {tuple(multi_index)} out of range for {tuple(counts)}")
    return int(np.ravel_multi_index(tuple(multi_index), tuple(counts)))


def unflatten_index(flat: int, counts: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(k) for k in np.unravel_index(flat, tuple(counts)))


@dataclass
class MeasureField:
    """Discrete Young measure, one sparse weight vector per (i, j) cell.

    Stored CSR-style: entries ``offsets[c]:offsets[c+1]`` of ``indices`` and
    ``weights`` belong to flattened cell ``c = i * n_x + j``. ``weights`` are
    densities ``mu`` (so ``du * weights`` sums to one per cell).
    """

    shape: tuple[int, int]
    offsets: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    phase: PhaseGrid

    @property
    def owner(self) -> np.ndarray:
        """Flattened cell number of every stored entry."""
        return np.repeat(np.arange(len(self.offsets) - 1), np.diff(self.offsets))

    def cell(self, i: int, j: int) -> tuple[np.ndarray, np.ndarray]:
        c = i * self.shape[1] + j
        s = slice(self.offsets[c], self.offsets[c + 1])
        return self.indices[s], self.weights[s]

    def dense(self, i: int, j: int) -> np.ndarray:
        out = np.zeros(self.phase.size)
        idx, w = self.cell(i, j)
        out[idx] = w
        return out

    def cell_sums(self, values: np.ndarray) -> np.ndarray:
        """``du * sum_l values_l mu_l`` for every cell; ``values`` is per entry.

        Returns shape ``(n_xi, n_x) + values.shape[1:]``.
        """
        weighted = values * (self.weights * self.phase.du).reshape((-1,) + (1,) * (values.ndim - 1))
        n_cells = len(self.offsets) - 1
        out = np.zeros((n_cells,) + values.shape[1:])
        np.add.at(out, self.owner, weighted)
        return out.reshape(self.shape + values.shape[1:])

    @classmethod
    def from_cells(cls, shape, cells, phase: PhaseGrid) -> "MeasureField":
        """Pack a row-major list of ``(indices, weights)`` pairs."""
        lengths = [len(idx) for idx, _ in cells]
        offsets = np.zeros(len(cells) + 1, dtype=np.int64)
        np.cumsum(lengths, out=offsets[1:])
        if cells:
            indices = np.concatenate([np.asarray(idx, dtype=np.int64) for idx, _ in cells])
            weights = np.concatenate([np.asarray(w, dtype=float) for _, w in cells])
        else:
            indices, weights = np.zeros(0, dtype=np.int64), np.zeros(0)
        return cls(tuple(shape), offsets, indices, weights, phase)


def marginal(measure: MeasureField | np.ndarray, k: int, phase: PhaseGrid) -> np.ndarray:
    """Marginal density of the measure along phase component ``k``.

    Accepts dense weights of shape ``(..., phase.size)`` or a
    :class:`MeasureField` (returns shape ``(n_xi, n_x, counts[k])``).
    The result integrates to one against ``widths[k]``.
    """
    if not 0 <= k < phase.ndim:
        raise IndexError(f"phase component {k} out of range")
    if isinstance(measure, MeasureField):
        comp = np.unravel_index(measure.indices, phase.counts)[k]
        n_cells = len(measure.offsets) - 1
        other = phase.du / phase.widths[k]
        out = np.zeros((n_cells, phase.counts[k]))
        np.add.at(out, (measure.owner, comp), measure.weights * other)
        return out.reshape(measure.shape + (phase.counts[k],))

    w = np.asarray(measure, dtype=float)
    lead = w.shape[:-1]
    if w.shape[-1] != phase.size:
        raise ValueError(f"weights have {w.shape[-1]} entries, phase grid has {phase.size}")
    w = w.reshape(lead + phase.counts)
    axes = tuple(len(lead) + a for a in range(phase.ndim) if a != k)
    other = phase.du / phase.widths[k]
    return w.sum(axis=axes) * other


@dataclass(frozen=True, eq=False)
class Grids:
    """The three grids of a run; ``phase`` is ``None`` in collocation mode."""

    x: SpatialGrid
    xi: StochasticGrid
    phase: PhaseGrid | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return (self.xi.n_xi, self.x.n_x)

"""Per-cell measure reconstruction: one LP per (stochastic node, point).

Warm-start bases are cached per ``(tag, i, j)`` so consecutive time steps
restart from the previous optimum. With ``workers > 1`` cells are split
into contiguous chunks and solved in forked worker processes; bases travel
with the tasks, so results do not depend on the worker count.
"""

from __future__ import annotations

import itertools
import multiprocessing as mp
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import InfeasibleError, SolverError
from .grids import MeasureField, PhaseGrid
from .lp import OPTIMAL, INFEASIBLE, assemble_lp, solve

_CONTEXTS: dict[int, tuple] = {}
_ids = itertools.count()


def _solve_many(ctx_id, moments, bases):
    phase, entropy, lambda_f = _CONTEXTS[ctx_id]
    out = []
    for m, basis in zip(moments, bases):
        sol = solve(assemble_lp(m, phase, entropy, lambda_f), basis)
        out.append((sol.status, sol.indices, sol.values, sol.basis, sol.iterations, sol.row))
    return out


class MeasureReconstructor:
    """Solves the reconstruction LP for whole moment fields.

    Parameters
    ----------
    phase : PhaseGrid
    entropy : EntropySpec
    lambda_f : float
        Support factor; weights are bounded by ``lambda_f / du``.
    workers : int
        Number of processes; 1 solves in-process.
    """

    def __init__(self, phase: PhaseGrid, entropy, lambda_f: float = 1.0, workers: int = 1):
        self.phase = phase
        self.entropy = entropy
        self.lambda_f = float(lambda_f)
        self.workers = max(1, int(workers))
        self._bases: dict = {}
        self._id = next(_ids)
        _CONTEXTS[self._id] = (phase, entropy, self.lambda_f)
        self._pool = None
        self.iterations = 0

    def close(self):
        if self._pool is not None:
            self._pool.shutdown()
            self._pool = None

    def __del__(self):
        try:
            self.close()
        except Exception:
            pass

    def _executor(self):
        if self._pool is None:
            self._pool = ProcessPoolExecutor(self.workers, mp_context=mp.get_context("fork"))
        return self._pool

    def solve_field(self, u, tag="cell", t=None) -> MeasureField:
        """Reconstruct a measure for every ``u[i, j]`` of a ``(n_xi, m, n)`` array."""
        u = np.asarray(u, dtype=float)
        n_xi, m = u.shape[:2]
        flat = u.reshape(n_xi * m, -1)
        keys = [(tag, i, j) for i in range(n_xi) for j in range(m)]
        bases = [self._bases.get(k) for k in keys]

        if self.workers == 1 or len(flat) < 2 * self.workers:
            results = _solve_many(self._id, flat, bases)
        else:
            bounds = np.linspace(0, len(flat), self.workers + 1).astype(int)
            futures = [
                self._executor().submit(_solve_many, self._id, flat[a:b], bases[a:b])
                for a, b in zip(bounds[:-1], bounds[1:])
            ]
            results = [r for f in futures for r in f.result()]

        cells = []
        for c, (status, idx, vals, basis, iters, row) in enumerate(results):
            self.iterations += iters
            if status != OPTIMAL:
                i, j = divmod(c, m)
                ctx = {"i": i, "j": j, "t": t, "moment": flat[c].tolist()}
                if status == INFEASIBLE:
                    raise InfeasibleError(
                        f"reconstruction LP infeasible at i={i}, j={j}, t={t}, moment={flat[c]}",
                        row=row, context=ctx,
                    )
                raise SolverError(f"LP {status} at i={i}, j={j}, t={t}", context=ctx)
            self._bases[keys[c]] = basis
            cells.append((idx, vals))
        return MeasureField.from_cells((n_xi, m), cells, self.phase)


def measure_means(measure: MeasureField) -> np.ndarray:
    return measure.cell_sums(measure.phase.centers[measure.indices])


def measure_fluxes(measure: MeasureField, problem, x=None) -> np.ndarray:
    """Flux averages per cell; ``x`` holds one coordinate per column ``j``."""
    u = measure.phase.centers[measure.indices]
    xe = None
    if x is not None:
        xe = np.asarray(x, dtype=float)[measure.owner % measure.shape[1]]
    return measure.cell_sums(problem.flux(u, xe))


def measure_speeds(measure: MeasureField, problem, x=None) -> np.ndarray:
    u = measure.phase.centers[measure.indices]
    xe = None
    if x is not None:
        xe = np.asarray(x, dtype=float)[measure.owner % measure.shape[1]]
    return measure.cell_sums(problem.max_wave_speed(u, xe))

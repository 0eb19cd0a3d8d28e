"""CSV serialization of moment fields, measure supports and run diagnostics.

Floats are written with ``repr`` (shortest round-trip decimal) so reading a
file back reproduces every value bit for bit.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import YmlpError
from .grids import Grids, MeasureField, marginal

MOMENTS_FINAL = "moments_final.csv"
SUPPORT_FINAL = "support_final.csv"
MARGINALS_FINAL = "marginals_final.csv"
DIAGNOSTICS = "diagnostics.csv"
MANIFEST = "manifest.conf"
SNAPSHOTS = "snapshots"


class RunFormatError(YmlpError, ValueError):
    """A run directory or CSV file is missing, empty or inconsistent."""


def _fmt(v) -> str:
    return repr(float(v))


def _write_rows(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def write_moments(path, u, grids: Grids):
    """Columns ``i, xi, j, x, u1 .. un``; rows ordered by ``i`` then ``j``."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    xi, x = grids.xi.nodes, grids.x.centers
    header = ["i", "xi", "j", "x"] + [f"u{k + 1}" for k in range(n)]
    rows = (
        [i, _fmt(xi[i]), j, _fmt(x[j])] + [_fmt(v) for v in u[i, j]]
        for i in range(u.shape[0])
        for j in range(u.shape[1])
    )
    _write_rows(path, header, rows)


def read_moments(path):
    """Inverse of :func:`write_moments`; returns ``(u, xi, x)``."""
    path = Path(path)
    if not path.is_file():
        raise RunFormatError(f"missing moment file {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise RunFormatError(f"{path} holds no data rows")
    header, body = rows[0], rows[1:]
    n = len(header) - 4
    if header[:4] != ["i", "xi", "j", "x"] or n < 1:
        raise RunFormatError(f"{path} has an unexpected header {header}")
    i = np.array([int(r[0]) for r in body])
    j = np.array([int(r[2]) for r in body])
    n_xi, n_x = i.max() + 1, j.max() + 1
    if len(body) != n_xi * n_x:
        raise RunFormatError(f"{path}: {len(body)} rows do not form a {n_xi} x {n_x} grid")
    u = np.empty((n_xi, n_x, n))
    xi = np.empty(n_xi)
    x = np.empty(n_x)
    for r, a, b in zip(body, i, j):
        xi[a] = float(r[1])
        x[b] = float(r[3])
        u[a, b] = [float(v) for v in r[4:]]
    return u, xi, x


def write_support(path, measure: MeasureField, grids: Grids):
    """Every stored weight: ``i, xi, j, x, l, l1 .. ln, u1 .. un, weight``.

    ``l`` is the flat phase index, ``l1 ..`` its multi-index and ``u1 ..``
    the phase point; ``weight`` is the density ``mu`` (``du * weight``
    sums to one per cell).
    """
    phase = measure.phase
    n = phase.ndim
    multi = np.stack(np.unravel_index(measure.indices, phase.counts), axis=-1)
    pts = phase.centers[measure.indices]
    owner = measure.owner
    n_x = measure.shape[1]
    xi, x = grids.xi.nodes, grids.x.centers
    header = (["i", "xi", "j", "x", "l"] + [f"l{k + 1}" for k in range(n)]
              + [f"u{k + 1}" for k in range(n)] + ["weight"])
    rows = []
    for e in range(len(measure.indices)):
        i, j = divmod(int(owner[e]), n_x)
        rows.append(
            [i, _fmt(xi[i]), j, _fmt(x[j]), int(measure.indices[e])]
            + [int(v) for v in multi[e]] + [_fmt(v) for v in pts[e]] + [_fmt(measure.weights[e])]
        )
    _write_rows(path, header, rows)


def read_support(path):
    """Support rows as a dict of column arrays."""
    path = Path(path)
    if not path.is_file():
        raise RunFormatError(f"missing support file {path}")
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 2:
        raise RunFormatError(f"{path} holds no data rows")
    header, body = rows[0], rows[1:]
    cols = {}
    for k, name in enumerate(header):
        vals = [r[k] for r in body]
        is_int = name in ("i", "j", "l") or (name[0] == "l" and name[1:].isdigit())
        cols[name] = np.array([int(v) for v in vals]) if is_int else np.array([float(v) for v in vals])
    return cols


def write_marginals(path, measure: MeasureField, grids: Grids):
    """Marginal densities per component: ``i, j, x, component, l, u, density``."""
    phase = measure.phase
    xi, x = grids.xi.nodes, grids.x.centers
    rows = []
    for k in range(phase.ndim):
        dens = marginal(measure, k, phase)
        axis = phase.axis_centers(k)
        for i in range(measure.shape[0]):
            for j in range(measure.shape[1]):
                for l in np.nonzero(dens[i, j])[0]:
                    rows.append([i, j, _fmt(x[j]), k + 1, int(l), _fmt(axis[l]), _fmt(dens[i, j, l])])
    _write_rows(path, ["i", "j", "x", "component", "l", "u", "density"], rows)


def write_diagnostics(path, records, with_row=False):
    """One row per step: ``step, t, dt, residual, lp_iterations``.

    Collocation runs march each parameter row separately; ``with_row``
    prepends the row index ``i``.
    """
    header = ["step", "t", "dt", "residual", "lp_iterations"]
    if with_row:
        header = ["i"] + header
    rows = []
    for r in records:
        row = [r["step"], _fmt(r["t"]), _fmt(r["dt"]), _fmt(r["residual"]), int(r["lp_iterations"])]
        rows.append(([r["i"]] if with_row else []) + row)
    _write_rows(path, header, rows)


def snapshot_name(t: float) -> str:
    return f"moments_t{float(t)!r}.csv"


def compare_runs(dir_a, dir_b) -> dict:
    """Norms of the difference of two final moment fields.

    ``L1`` and ``L2`` integrate over ``x`` and average over the parameter
    rows; ``Linf`` is the largest pointwise difference. One entry per
    component, keyed ``u1 .. un``.
    """
    ua, xia, xa = read_moments(Path(dir_a) / MOMENTS_FINAL)
    ub, xib, xb = read_moments(Path(dir_b) / MOMENTS_FINAL)
    if ua.shape != ub.shape or not (np.array_equal(xa, xb) and np.array_equal(xia, xib)):
        raise RunFormatError(f"grid mismatch between {dir_a} {ua.shape} and {dir_b} {ub.shape}")
    return difference_norms(ua, ub, xa)


def difference_norms(ua, ub, x) -> dict:
    d = np.asarray(ua, dtype=float) - np.asarray(ub, dtype=float)
    dx = (x[-1] - x[0]) / (len(x) - 1) if len(x) > 1 else 1.0
    out = {}
    for k in range(d.shape[-1]):
        dk = d[..., k]
        out[f"u{k + 1}"] = {
            "L1": float(np.mean(np.sum(np.abs(dk), axis=1) * dx)),
            "L2": float(np.sqrt(np.mean(np.sum(dk * dk, axis=1) * dx))),
            "Linf": float(np.max(np.abs(dk))),
        }
    return out


def format_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)

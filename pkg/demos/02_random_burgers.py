"""Burgers with a random amplitude: order 1 against order 5.

u0(x, xi) = xi sin(2 pi x) steepens into a shock by t = 1 / (2 pi xi) for
xi > 0, so at t = 0.25 the rows xi > 2 / pi carry a shock at x = 0.5 while
rows with xi < 0 rarefy. The script runs the Young-measure scheme at
orders 1 and 5 on the same grids, prints the 10-90% rise width of the shock
for every shocked row and writes SVG figures under demos/out/random_burgers.

Run:  python3 demos/02_random_burgers.py      (about 20 s on one core)
"""

import sys
from pathlib import Path

import numpy as np

from ymlp.config import load_config
from ymlp.driver import run_experiment

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tests"))
from oracles import rise_width  # noqa: E402

base = load_config(ROOT / "configs" / "example1.conf").with_updates(output_times=[], plots=True)
runs = {}
for order in (1, 5):
    out = ROOT / "demos" / "out" / "random_burgers" / f"order{order}"
    runs[order] = run_experiment(base.with_updates(order=order), out)
    print(f"order {order}: wrote {out}")

xi = runs[1].grids.xi.nodes
print("\n  xi     width o1  width o5   (cells from 10% to 90% of the jump)")
for i in np.flatnonzero(xi > 2 / np.pi):
    w1 = rise_width(runs[1].u[i, :, 0])
    w5 = rise_width(runs[5].u[i, :, 0])
    print(f"  {xi[i]:.2f}   {w1:8d}  {w5:8d}")

m = runs[5].measure
i = len(xi) - 1
j = int(np.argmin(np.abs(runs[5].grids.x.centers - 0.5)))
idx, w = m.cell(i, j)
print(f"\nmeasure at xi = {xi[i]:.2f}, x = {runs[5].grids.x.centers[j]:.3f}: "
      f"{len(idx)} supported phase cells, mean {runs[5].u[i, j, 0]:+.4f}")

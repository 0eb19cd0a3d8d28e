"""What measure does the LP pick for a given mean?

A single moment on a phase grid admits many nonnegative densities with that
mean. The LP picks the one with least expected entropy under a weight cap
mu <= lambda_F / du. This script solves three small LPs and prints the
chosen support:

* a moment on a cell center with lambda_F = 1 gives an atomic measure;
* a moment between two centers splits its mass over both neighbours;
* lambda_F = 0.05 forces the mass over at least 20 cells.

Run:  python3 demos/01_measure_from_a_moment.py
"""

import numpy as np

from ymlp.grids import build_phase_grid
from ymlp.lp import assemble_lp, solve
from ymlp.problems import quadratic_entropy


def show(label, moment, lam):
    sol = solve(assemble_lp([moment], phase, quadratic_entropy(), lam))
    w = sol.weights
    keep = np.flatnonzero(w > 1e-12)
    mean = phase.du * np.dot(phase.centers[:, 0], w)
    print(f"\n{label}: moment = {moment}, lambda_F = {lam}")
    print(f"  {len(keep)} supported cells, recovered mean {mean:.12f}, "
          f"objective {sol.objective:.6f}, {sol.iterations} simplex pivots")
    for l in keep:
        mass = phase.du * w[l]
        print(f"    u = {phase.centers[l, 0]:+.3f}  mass {mass:.4f}  " + "#" * int(round(40 * mass)))


phase = build_phase_grid([(-2.0, 2.0)], [40])
print(f"phase grid: {phase.size} cells of width {phase.du:.2f} on [-2, 2]")
show("on a center", phase.centers[25, 0], 1.0)
show("between centers", 0.53, 1.0)
show("capped weights", 0.53, 0.05)

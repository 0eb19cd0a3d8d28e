"""Brute-force LP oracle: enumerate every basic solution of a small bounded LP.

Independent of the simplex code; only sensible for a dozen columns or so.
"""

from itertools import combinations, product

import numpy as np


def enumerate_vertices(A, b, cost, upper, tol=1e-9):
    """Minimum objective over all basic feasible solutions.

    Every choice of ``m`` linearly independent basic columns, combined with
    every lower/upper assignment of the remaining columns, is solved and
    checked for feasibility.

    Returns ``(objective, x)`` or ``(inf, None)`` when no vertex is feasible.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    cost = np.asarray(cost, dtype=float)
    upper = np.asarray(upper, dtype=float)
    m, N = A.shape
    scale = np.maximum(np.abs(b), 1.0)
    best, best_x = np.inf, None
    for basic in combinations(range(N), m):
        B = A[:, basic]
        if abs(np.linalg.det(B)) < 1e-12:
            continue
        non = [k for k in range(N) if k not in basic]
        # all 2^(N-m) bound assignments at once
        flags = np.array(list(product((0.0, 1.0), repeat=len(non))))
        xn = flags * upper[non]
        rhs = b[None, :] - xn @ A[:, non].T
        xb = np.linalg.solve(B, rhs.T).T
        ok = np.all(xb >= -tol * scale.max(), axis=1) & np.all(
            xb <= upper[list(basic)] + tol * scale.max(), axis=1
        )
        if not ok.any():
            continue
        obj = xb[ok] @ cost[list(basic)] + xn[ok] @ cost[non]
        k = int(np.argmin(obj))
        if obj[k] < best:
            best = float(obj[k])
            x = np.zeros(N)
            x[list(basic)] = xb[ok][k]
            x[non] = xn[ok][k]
            best_x = x
    return best, best_x


def random_reconstruction_lp(rng):
    """A random feasible reconstruction LP with at most 12 columns and 2 components.

    The moment is the mean of a random probability vector mixed with the
    uniform one just enough to respect the weight cap.
    """
    from .grids import build_phase_grid
    from .lp import assemble_lp
    from .problems import kruzhkov_entropy, quadratic_entropy

    if rng.integers(1, 3) == 1:
        phase = build_phase_grid([(-1, 1)], [int(rng.integers(2, 13))])
    else:
        phase = build_phase_grid([(0.3, 1.8), (0.3, 1.3)],
                                 [int(rng.integers(2, 4)), int(rng.integers(2, 4))])
    lam = float(rng.choice([1.0, 0.5, 0.3])) if phase.size * 0.3 >= 1 else 1.0
    if rng.integers(0, 2) == 0:
        entropy = quadratic_entropy()
    else:
        entropy = kruzhkov_entropy(float(rng.uniform(-1, 1)))
    w = rng.dirichlet(np.ones(phase.size))
    a = 0.0 if w.max() <= lam else (w.max() - lam) / (w.max() - 1 / phase.size)
    w = (1 - a) * w + a / phase.size
    return assemble_lp(w @ phase.centers, phase, entropy, lam)


def selftest(count=200, seed=0, tol=1e-8):
    """Compare the simplex against vertex enumeration on random LPs.

    Returns ``(mismatches, worst_gap)``.
    """
    from .lp import OPTIMAL, solve

    rng = np.random.default_rng(seed)
    bad, worst = 0, 0.0
    for _ in range(count):
        inst = random_reconstruction_lp(rng)
        sol = solve(inst)
        best, _ = enumerate_vertices(inst.A, inst.b, inst.cost * inst.template.scale, inst.upper)
        gap = abs(sol.objective - best) if sol.status == OPTIMAL else np.inf
        worst = max(worst, gap)
        bad += gap > tol
    return int(bad), float(worst)

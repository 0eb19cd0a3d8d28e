"""Reference computations written independently of the package kernels.

Each helper recomputes a quantity from its definition (loops, polynomial
fits, dense linear algebra) so the tests do not compare the package with
itself.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np


def rk3_linear_decay(h: float) -> float:
    """One Shu-Osher SSP-RK3 step of ``u' = -u`` from ``u = 1``: ``1 - h + h^2/2 - h^3/6``."""
    return 1 - h + h * h / 2 - h**3 / 6


def _lagrange_parabola(xs, ys):
    """Coefficients ``(c0, c1, c2)`` of ``c0 + c1 x + c2 x^2`` through three points, exactly."""
    c = [Fraction(0)] * 3
    for k in range(3):
        others = [xs[m] for m in range(3) if m != k]
        denom = (xs[k] - others[0]) * (xs[k] - others[1])
        # (x - a)(x - b) = ab - (a + b) x + x^2
        a, b = others
        w = ys[k] / denom
        c[0] += w * a * b
        c[1] -= w * (a + b)
        c[2] += w
    return c


def wenoz_left_reference(v, eps=1e-12, p=2, d=(1 / 16, 5 / 8, 5 / 16)):
    """Left value at ``x = 1/2`` from point values at ``x = -2 .. 2`` (unit spacing).

    Parabolas come from Lagrange interpolation and smoothness indicators
    from ``int_{-1/2}^{1/2} (P')^2 + (P'')^2 dx``, all in exact rational
    arithmetic; only the final weighted average is rounded.
    """
    xs = [Fraction(k) for k in range(-2, 3)]
    ys = [Fraction(float(a)) for a in v]
    half = Fraction(1, 2)
    vals, betas = [], []
    for k in range(3):
        c0, c1, c2 = _lagrange_parabola(xs[k : k + 3], ys[k : k + 3])
        vals.append(c0 + c1 * half + c2 * half * half)
        # P' = c1 + 2 c2 x, P'' = 2 c2 on [-1/2, 1/2]
        betas.append(c1 * c1 + Fraction(1, 3) * c2 * c2 + 4 * c2 * c2)
    tau = abs(betas[2] - betas[0])
    e = Fraction(eps)
    alpha = [Fraction(dk) * (1 + (tau / (b + e)) ** p) for dk, b in zip(d, betas)]
    return float(sum(a * q for a, q in zip(alpha, vals)) / sum(alpha))


def lax_friedrichs_reference(u, F, lam):
    """Loop form of ``u_j <- (u_{j+1} + u_{j-1})/2 - lam/2 (F_{j+1} - F_{j-1})``
    with edge-copied ghosts; ``u``, ``F`` are 1-d."""
    n = len(u)
    ue = [u[0]] + list(u) + [u[-1]]
    Fe = [F[0]] + list(F) + [F[-1]]
    return np.array([
        0.5 * (ue[j + 2] + ue[j]) - 0.5 * lam * (Fe[j + 2] - Fe[j]) for j in range(n)
    ])


def mean_speed_reference(measure, problem, x, dxi, p0):
    """``max_j dxi p0 sum_i sum_l du sigma(u_l) mu_{ijl}``, by loops over stored entries."""
    n_xi, n_x = measure.shape
    total = np.zeros(n_x)
    for i in range(n_xi):
        for j in range(n_x):
            idx, w = measure.cell(i, j)
            for l, wl in zip(idx, w):
                u = measure.phase.centers[l]
                sig = float(problem.max_wave_speed(u[None, :], np.array([x[j]]))[0])
                total[j] += dxi * p0 * measure.phase.du * wl * sig
    return float(total.max())


def euler_jacobian(rho, q, kappa=1.0, gamma=1.5):
    v = q / rho
    c2 = kappa * gamma * rho ** (gamma - 1)
    return np.array([[0.0, 1.0], [c2 - v * v, 2 * v]])


def rise_width(profile, window=8):
    """Cells strictly between the 10% and 90% levels of the largest local jump.

    The jump is located at the largest neighbour difference; levels are
    taken from the profile's min and max inside ``+-window`` cells of it.
    """
    r = np.asarray(profile, dtype=float)
    j = int(np.argmax(np.abs(np.diff(r))))
    seg = r[max(0, j - window + 1) : j + window + 1]
    lo, hi = float(seg.min()), float(seg.max())
    jump = hi - lo
    if jump <= 0:
        return 0
    inside = (seg > lo + 0.1 * jump) & (seg < hi - 0.1 * jump)
    return int(inside.sum())


def threshold_count(profile):
    """Cells whose neighbour difference exceeds 10% of the profile range."""
    r = np.asarray(profile, dtype=float)
    jump = r.max() - r.min()
    return int(np.sum(np.abs(np.diff(r)) > 0.1 * jump))

"""One-sided interface values: generalized minmod and fifth-order WENO-Z.

Every kernel is vectorized: stencil entries are arrays of identical shape
(states on the last axis for the system versions). Characteristic
variables are used when ``(R, R_inv)`` matrices are supplied.
"""

from __future__ import annotations

import numpy as np

WENO_EPS = 1e-12
WENO_P = 2
_D = (1 / 16, 5 / 8, 5 / 16)


def minmod(*z):
    """Smallest-magnitude argument when all share a sign, else zero.

    >>> float(minmod(1, 2, 3)), float(minmod(-1, 2, 3)), float(minmod(-1, -2, -3))
    (1.0, 0.0, -1.0)
    """
    z = np.stack(np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in z]))
    pos = np.all(z > 0, axis=0)
    neg = np.all(z < 0, axis=0)
    return np.where(pos, z.min(axis=0), np.where(neg, z.max(axis=0), 0.0))


def _to_char(Rinv, u):
    return np.einsum("...ab,...b->...a", Rinv, u)


def _from_char(R, g):
    return np.einsum("...ab,...b->...a", R, g)


def minmod_interface(um1, u0, up1, up2, theta=1.5, lcd=None):
    """States on both sides of the interface between ``u0`` and ``up1``.

    Slopes are limited by ``minmod(theta*back, central, theta*forward)``
    (in units of the cell width, which cancels). Returns ``(minus, plus)``.
    """
    if lcd is not None:
        R, Rinv = lcd
        um1, u0, up1, up2 = (_to_char(Rinv, v) for v in (um1, u0, up1, up2))
    s0 = minmod(theta * (u0 - um1), 0.5 * (up1 - um1), theta * (up1 - u0))
    s1 = minmod(theta * (up1 - u0), 0.5 * (up2 - u0), theta * (up2 - up1))
    minus = u0 + 0.5 * s0
    plus = up1 - 0.5 * s1
    if lcd is not None:
        minus, plus = _from_char(R, minus), _from_char(R, plus)
    return minus, plus


def linear_reconstruct(stencil, theta=1.5, lcd=None):
    """Piecewise-linear interface values from the four cells ``j-1 .. j+2``.

    ``stencil`` has shape ``(4,)`` for scalars or ``(4, n)`` for systems;
    ``lcd`` is an optional ``(R, R_inv)`` pair of ``n x n`` matrices.
    """
    s = np.asarray(stencil, dtype=float)
    if not 1 <= theta <= 2:
        raise ValueError(f"theta must lie in [1, 2], got {theta}")
    return minmod_interface(s[0], s[1], s[2], s[3], theta, lcd)


def wenoz_interpolate_left(v0, v1, v2, v3, v4):
    """Value at ``x_{j+1/2}`` from the left, given point values ``u_{j-2} .. u_{j+2}``."""
    p0 = 3 / 8 * v0 - 5 / 4 * v1 + 15 / 8 * v2
    p1 = -1 / 8 * v1 + 3 / 4 * v2 + 3 / 8 * v3
    p2 = 3 / 8 * v2 + 3 / 4 * v3 - 1 / 8 * v4
    b0 = 13 / 12 * (v0 - 2 * v1 + v2) ** 2 + 1 / 4 * (v0 - 4 * v1 + 3 * v2) ** 2
    b1 = 13 / 12 * (v1 - 2 * v2 + v3) ** 2 + 1 / 4 * (v1 - v3) ** 2
    b2 = 13 / 12 * (v2 - 2 * v3 + v4) ** 2 + 1 / 4 * (3 * v2 - 4 * v3 + v4) ** 2
    tau = np.abs(b2 - b0)
    a0 = _D[0] * (1 + (tau / (b0 + WENO_EPS)) ** WENO_P)
    a1 = _D[1] * (1 + (tau / (b1 + WENO_EPS)) ** WENO_P)
    a2 = _D[2] * (1 + (tau / (b2 + WENO_EPS)) ** WENO_P)
    return (a0 * p0 + a1 * p1 + a2 * p2) / (a0 + a1 + a2)


def wenoz_interpolate_right(w0, w1, w2, w3, w4):
    """Value at ``x_{j+1/2}`` from the right, given ``u_{j-1} .. u_{j+3}`` (mirror of the left)."""
    return wenoz_interpolate_left(w4, w3, w2, w1, w0)


def wenoz_interface(s, lcd=None):
    """Both one-sided values from six stencil states ``s[0..5] = u_{j-2} .. u_{j+3}``."""
    if lcd is not None:
        R, Rinv = lcd
        s = [_to_char(Rinv, v) for v in s]
    minus = wenoz_interpolate_left(*s[0:5])
    plus = wenoz_interpolate_right(*s[1:6])
    if lcd is not None:
        minus, plus = _from_char(R, minus), _from_char(R, plus)
    return minus, plus


def wenoz_reconstruct_system(stencil, lcd=None):
    """WENO-Z interface values from a ``(6, n)`` stencil, optionally characteristic-wise."""
    s = np.asarray(stencil, dtype=float)
    if s.shape[0] != 6:
        raise ValueError("WENO-Z system reconstruction needs six stencil states")
    return wenoz_interface(list(s), lcd)


def interface_states(u, order, theta=1.5, lcd=None):
    """One-sided values at every interior interface of a padded array.

    Parameters
    ----------
    u : ndarray, shape ``(..., P, n)``
        Padded cell values along the second-to-last axis.
    order : {2, 5}
    lcd : callable, optional
        ``lcd(u_left, u_right) -> (R, R_inv, ok)``, evaluated per interface.

    Returns
    -------
    minus, plus : ndarray
        Shape ``(..., P - 3, n)`` for order 2 (interfaces ``p + 1/2`` for
        ``p = 1 .. P-3``) and ``(..., P - 5, n)`` for order 5
        (``p = 2 .. P-4``).
    """
    P = u.shape[-2]
    if order == 2:
        lo, w = 1, 4
    elif order == 5:
        lo, w = 2, 6
    else:
        raise ValueError(f"no interface reconstruction for order {order}")
    m = P - w + 1
    st = [u[..., k : k + m, :] for k in range(w)]
    mats = None
    if lcd is not None:
        R, Rinv, _ = lcd(st[lo], st[lo + 1])
        mats = (R, Rinv)
    if order == 2:
        return minmod_interface(*st, theta=theta, lcd=mats)
    return wenoz_interface(st, lcd=mats)

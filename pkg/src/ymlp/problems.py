"""Conservation laws: fluxes, spectra, entropies, LCD matrices, initial data.

All callables are vectorized over leading axes; states carry the conserved
components on the last axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigError, PositivityError

RHO_FLOOR = 1e-10
# |v -/+ c| below this makes the Euler eigenvector matrix singular
SONIC_TOL = 1e-10


@dataclass(frozen=True)
class EntropySpec:
    tag: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    param: float | None = None

    def __call__(self, u):
        return self.evaluate(np.asarray(u, dtype=float))


def quadratic_entropy() -> EntropySpec:
    return EntropySpec("quadratic", lambda u: 0.5 * np.sum(u * u, axis=-1))


def kruzhkov_entropy(c: float = 0.5) -> EntropySpec:
    return EntropySpec("kruzhkov", lambda u: np.sum(np.abs(u - c), axis=-1), param=c)


@dataclass(frozen=True, eq=False)
class ProblemDef:
    """One conservation law.

    ``lcd`` maps a pair of state arrays to ``(R, R_inv, ok)`` where ``ok``
    flags interfaces whose eigenbasis is usable; it is ``None`` when the
    problem has no characteristic decomposition (scalar or weakly
    hyperbolic), in which case reconstruction is component-wise.
    """

    name: str
    n: int
    flux: Callable
    eigenvalues: Callable
    entropies: dict = field(default_factory=dict)
    default_entropy: str = "quadratic"
    lcd: Callable | None = None
    jacobian: Callable | None = None
    components: tuple[str, ...] = ("u",)
    params: dict = field(default_factory=dict)
    x_dependent: bool = False

    def max_wave_speed(self, u, x=None):
        return np.max(np.abs(self.eigenvalues(u, x)), axis=-1)

    def entropy(self, tag: str | None = None, c: float | None = None) -> EntropySpec:
        tag = tag or self.default_entropy
        if tag == "kruzhkov" and c is not None:
            return kruzhkov_entropy(c)
        try:
            return self.entropies[tag]
        except KeyError:
            raise ConfigError(
                f"entropy {tag!r} not registered for {self.name}; choose from {sorted(self.entropies)}"
            ) from None


def burgers() -> ProblemDef:
    def flux(u, x=None):
        u = np.asarray(u, dtype=float)
        return 0.5 * u * u

    def eigenvalues(u, x=None):
        return np.asarray(u, dtype=float).copy()

    return ProblemDef(
        name="burgers",
        n=1,
        flux=flux,
        eigenvalues=eigenvalues,
        entropies={"quadratic": quadratic_entropy(), "kruzhkov": kruzhkov_entropy(0.5)},
        jacobian=lambda u, x=None: np.asarray(u, dtype=float)[..., None],
    )


def _density(u):
    rho = u[..., 0]
    if np.any(rho <= RHO_FLOOR):
        raise PositivityError(f"density below floor {RHO_FLOOR}: min {np.min(rho):.3e}")
    return rho


def isentropic_euler(kappa: float = 1.0, gamma: float = 1.5) -> ProblemDef:
    """Isentropic gas dynamics in (rho, q) with p = kappa * rho**gamma."""
    if not kappa > 0 or not gamma > 1:
        raise ConfigError(f"need kappa > 0 and gamma > 1, got {kappa}, {gamma}")
    sk = np.sqrt(kappa * gamma)

    def flux(u, x=None):
        u = np.asarray(u, dtype=float)
        rho = _density(u)
        q = u[..., 1]
        return np.stack([q, q * q / rho + kappa * rho**gamma], axis=-1)

    def eigenvalues(u, x=None):
        u = np.asarray(u, dtype=float)
        rho = _density(u)
        v = u[..., 1] / rho
        c = sk * rho ** (0.5 * (gamma - 1))
        return np.stack([v - c, v + c], axis=-1)

    def jacobian(u, x=None):
        u = np.asarray(u, dtype=float)
        rho = _density(u)
        v = u[..., 1] / rho
        out = np.zeros(u.shape[:-1] + (2, 2))
        out[..., 0, 1] = 1
        out[..., 1, 0] = kappa * gamma * rho ** (gamma - 1) - v * v
        out[..., 1, 1] = 2 * v
        return out

    def entropy(u):
        rho = _density(u)
        q = u[..., 1]
        return 0.5 * q * q / rho + kappa * rho**gamma / (gamma - 1)

    def lcd(u_left, u_right):
        return euler_lcd_matrices(u_left, u_right, kappa, gamma)

    return ProblemDef(
        name="isentropic_euler",
        n=2,
        flux=flux,
        eigenvalues=eigenvalues,
        entropies={"euler": EntropySpec("euler", entropy)},
        default_entropy="euler",
        lcd=lcd,
        jacobian=jacobian,
        components=("rho", "q"),
        params={"kappa": kappa, "gamma": gamma},
    )


def euler_lcd_matrices(u_left, u_right, kappa=1.0, gamma=1.5):
    """Eigenvector matrices of the Euler Jacobian at the mean interface state.

    Density and velocity are averaged arithmetically (velocity from q/rho of
    each side). Returns ``(R, R_inv, ok)``; where ``ok`` is false the
    eigenvalue ``v - c`` or ``v + c`` is within ``SONIC_TOL`` of zero and
    identity matrices are substituted.
    """
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    rho_l, rho_r = _density(u_left), _density(u_right)
    rho = 0.5 * (rho_l + rho_r)
    v = 0.5 * (u_left[..., 1] / rho_l + u_right[..., 1] / rho_r)
    c = np.sqrt(kappa * gamma) * rho ** (0.5 * (gamma - 1))
    lm, lp = v - c, v + c
    ok = (np.abs(lm) >= SONIC_TOL) & (np.abs(lp) >= SONIC_TOL)
    lm = np.where(ok, lm, 1.0)
    lp = np.where(ok, lp, 1.0)

    shape = rho.shape + (2, 2)
    R = np.empty(shape)
    R[..., 0, 0] = 1 / lm
    R[..., 0, 1] = 1 / lp
    R[..., 1, 0] = 1
    R[..., 1, 1] = 1
    Rinv = np.empty(shape)
    Rinv[..., 0, 0] = (v * v - c * c) / (2 * c)
    Rinv[..., 0, 1] = 0.5 - v / (2 * c)
    Rinv[..., 1, 0] = (c * c - v * v) / (2 * c)
    Rinv[..., 1, 1] = 0.5 + v / (2 * c)
    if not np.all(ok):
        eye = np.eye(2)
        R[~ok] = eye
        Rinv[~ok] = eye
    return R, Rinv, ok


def heaviside(x):
    """Step function with H(0) = 1."""
    return (np.asarray(x, dtype=float) >= 0).astype(float)


_DISCONTINUOUS = {
    "A": (
        lambda u: u * (1 - u),
        lambda u: 1.1 * u * (1 - u),
        lambda u: 1 - 2 * u,
        lambda u: 1.1 * (1 - 2 * u),
    ),
    "B": (
        lambda u: 2 * u * (1 - u) / (1 + u),
        lambda u: 2 * u * (1 - u) / (2 - u),
        lambda u: (2 - 4 * u - 2 * u * u) / (1 + u) ** 2,
        lambda u: -(2 - 4 * (1 - u) - 2 * (1 - u) ** 2) / (2 - u) ** 2,
    ),
}


def discontinuous_flux(variant: str = "A") -> ProblemDef:
    """Scalar law with flux ``(1 - H(x)) g(u) + H(x) f(u)``."""
    try:
        g, f, dg, df = _DISCONTINUOUS[variant.upper()]
    except KeyError:
        raise ConfigError(f"unknown discontinuous-flux variant {variant!r}") from None

    def _x(u, x):
        if x is None:
            raise ValueError("discontinuous flux needs the spatial coordinate")
        return np.broadcast_to(heaviside(x), u.shape[:-1])[..., None]

    def flux(u, x=None):
        u = np.asarray(u, dtype=float)
        h = _x(u, x)
        return (1 - h) * g(u) + h * f(u)

    def eigenvalues(u, x=None):
        u = np.asarray(u, dtype=float)
        h = _x(u, x)
        return (1 - h) * dg(u) + h * df(u)

    return ProblemDef(
        name=f"discontinuous_{variant.lower()}",
        n=1,
        flux=flux,
        eigenvalues=eigenvalues,
        entropies={"quadratic": quadratic_entropy(), "kruzhkov": kruzhkov_entropy(0.5)},
        jacobian=lambda u, x=None: eigenvalues(u, x)[..., None],
        params={"variant": variant.upper()},
        x_dependent=True,
    )


def pressureless_gas() -> ProblemDef:
    # Jacobian is defective (double eigenvalue v): no LCD, component-wise only
    def flux(u, x=None):
        u = np.asarray(u, dtype=float)
        rho = _density(u)
        q = u[..., 1]
        return np.stack([q, q * q / rho], axis=-1)

    def eigenvalues(u, x=None):
        u = np.asarray(u, dtype=float)
        v = u[..., 1] / _density(u)
        return np.stack([v, v], axis=-1)

    def entropy(u):
        return 0.5 * u[..., 1] ** 2 / _density(u)

    return ProblemDef(
        name="pressureless",
        n=2,
        flux=flux,
        eigenvalues=eigenvalues,
        entropies={"kinetic": EntropySpec("kinetic", entropy)},
        default_entropy="kinetic",
        components=("rho", "q"),
    )


PROBLEMS = {
    "burgers": lambda **kw: burgers(),
    "isentropic_euler": lambda kappa=1.0, gamma=1.5, **kw: isentropic_euler(kappa, gamma),
    "discontinuous_a": lambda **kw: discontinuous_flux("A"),
    "discontinuous_b": lambda **kw: discontinuous_flux("B"),
    "pressureless": lambda **kw: pressureless_gas(),
}


def make_problem(name: str, **params) -> ProblemDef:
    try:
        factory = PROBLEMS[name]
    except KeyError:
        raise ConfigError(f"unknown problem {name!r}; choose from {sorted(PROBLEMS)}") from None
    return factory(**params)


# ---------------------------------------------------------------------------
# initial data


def example2_right_state(xi, kappa=1.0, gamma=1.5, u_left=(1.0, 1.0), sign=-1.0):
    """State joined to ``u_left`` by a 1-wave, density shifted by ``sign * xi / 2``.

    With ``sign = -1`` the wave is a 1-shock for ``xi < 0`` and a
    1-rarefaction for ``xi >= 0``.
    """
    xi = np.asarray(xi, dtype=float)
    rho_l, q_l = u_left
    v_l = q_l / rho_l
    rho = rho_l + sign * 0.5 * xi
    sk = np.sqrt(kappa * gamma)
    c_l = sk * rho_l ** (0.5 * (gamma - 1))
    c_r = sk * rho ** (0.5 * (gamma - 1))
    v_rare = v_l + 2 / (gamma - 1) * (c_l - c_r)
    p_l, p_r = kappa * rho_l**gamma, kappa * rho**gamma
    jump = np.sqrt(np.maximum((p_r - p_l) * (rho - rho_l), 0) / (rho_l * rho))
    v = np.where(rho <= rho_l, v_rare, v_l - jump)
    return np.stack([rho, rho * v], axis=-1)


@dataclass(frozen=True)
class InitialCondition:
    """A catalogued test case with its default run setup."""

    name: str
    problem: str
    func: Callable
    domain: tuple[float, float]
    t_final: float
    phase_bounds: tuple
    phase_n: int
    n_x: int = 100
    n_xi: int = 1
    xi_range: tuple[float, float] = (-1.0, 1.0)
    lambda_f: float = 1.0
    bc: str = "free"
    exact: Callable | None = None

    def __call__(self, x, xi):
        """Evaluate on the grid; returns shape ``(len(xi), len(x), n)``."""
        X, XI = np.meshgrid(np.asarray(x, float), np.asarray(xi, float))
        return np.asarray(self.func(X, XI), dtype=float)


def _scalar(values):
    return np.asarray(values, dtype=float)[..., None]


def _example2(x, xi):
    right = example2_right_state(xi)
    left = np.broadcast_to(np.array([1.0, 1.0]), right.shape)
    return np.where((x < 0)[..., None], left, right)


def _example3(x, xi):
    left = np.stack([0.4 + 0.1 * xi, np.full_like(xi, 1.2)], axis=-1)
    right = np.broadcast_to(np.array([0.4, 1.0]), left.shape)
    return np.where((x < -0.3)[..., None], left, right)


def _example6(x, xi):
    left = np.broadcast_to(np.array([1.0, 2.0]), x.shape + (2,))
    right = np.broadcast_to(np.array([1.0, 0.0]), x.shape + (2,))
    return np.where((x < -0.5)[..., None], left, right)


def _smooth_sine(x, xi):
    return _scalar(0.5 + 0.3 * np.sin(2 * np.pi * x) + 0 * xi)


def smooth_sine_exact(x, t):
    """Pre-shock Burgers solution for 0.5 + 0.3 sin(2 pi x) by characteristics."""
    x = np.asarray(x, dtype=float)
    u0 = lambda s: 0.5 + 0.3 * np.sin(2 * np.pi * s)
    du0 = lambda s: 0.6 * np.pi * np.cos(2 * np.pi * s)
    u = u0(x)
    for _ in range(100):
        # solve g(u) = u - u0(x - u t) = 0
        g = u - u0(x - u * t)
        step = g / (1 + t * du0(x - u * t))
        u = u - step
        if np.max(np.abs(step)) < 1e-15:
            break
    return u


INITIAL_CONDITIONS = {
    ic.name: ic
    for ic in [
        InitialCondition(
            "example1", "burgers", lambda x, xi: _scalar(xi * np.sin(2 * np.pi * x)),
            domain=(0.0, 1.0), t_final=0.25, phase_bounds=((-1.5, 1.5),), phase_n=100, n_xi=10,
        ),
        InitialCondition(
            "example2", "isentropic_euler", _example2,
            domain=(-1.0, 1.0), t_final=0.25, phase_bounds=((0.3, 1.8), (0.3, 1.3)), phase_n=25,
            n_xi=10,
        ),
        InitialCondition(
            "example3", "isentropic_euler", _example3,
            domain=(-1.0, 1.0), t_final=0.2, phase_bounds=((0.05, 1.0), (0.3, 2.5)), phase_n=20,
            n_xi=10,
        ),
        InitialCondition(
            "example4", "discontinuous_a", lambda x, xi: _scalar(np.where(x < 0, 0.65, 0.35)),
            domain=(-4.0, 4.0), t_final=2.0, phase_bounds=((-1.0, 1.0),), phase_n=50,
        ),
        InitialCondition(
            "example5", "discontinuous_b", lambda x, xi: _scalar(0.5 + 0 * x),
            domain=(-4.0, 4.0), t_final=3.0, phase_bounds=((-1.0, 1.0),), phase_n=50,
        ),
        InitialCondition(
            "example6", "pressureless", _example6,
            domain=(-1.0, 1.0), t_final=1.0, phase_bounds=((0.2, 20.0), (-0.3, 20.0)),
            phase_n=300, n_x=50,
        ),
        InitialCondition(
            "example7", "burgers", lambda x, xi: _scalar(np.where(x < 0.5, 1.5, 0.5)),
            domain=(-1.0, 1.0), t_final=0.25, phase_bounds=((-2.0, 2.0),), phase_n=100,
            lambda_f=0.05,
        ),
        InitialCondition(
            "smooth_sine", "burgers", _smooth_sine,
            domain=(0.0, 1.0), t_final=0.1, phase_bounds=((0.0, 1.0),), phase_n=100,
            bc="periodic", exact=lambda x, xi, t: smooth_sine_exact(x, t)[..., None],
        ),
    ]
}

DEFAULT_INITIAL = {
    "burgers": "example1",
    "isentropic_euler": "example2",
    "discontinuous_a": "example4",
    "discontinuous_b": "example5",
    "pressureless": "example6",
}


def initial_data(name: str) -> InitialCondition:
    try:
        return INITIAL_CONDITIONS[name]
    except KeyError:
        raise ConfigError(
            f"unknown initial data {name!r}; choose from {sorted(INITIAL_CONDITIONS)}"
        ) from None

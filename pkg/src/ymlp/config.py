"""Experiment configuration: a flat ``section.key = value`` text format.

Only ``problem.name`` is required. Grid sizes, phase box, final time and
initial data default to the preset catalogued for the problem
(``problem.initial`` picks another preset).
"""

from __future__ import annotations

import difflib
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ConfigError
from .grids import Grids, SpatialGrid, StochasticGrid, build_phase_grid
from .problems import DEFAULT_INITIAL, INITIAL_CONDITIONS, PROBLEMS, initial_data, make_problem
from .schemes import BOUNDARIES, CORRECTIONS, FLUX_VARIANTS, MODES, SchemeConfig


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def _ints(text):
    return [int(v) for v in text.replace(",", " ").split()]


def _bool(text):
    t = text.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _optional_str(text):
    return None if text.strip().lower() in ("none", "auto", "") else text.strip()


def _optional_float(text):
    return None if text.strip().lower() in ("none", "") else float(text)


# key -> (parser, attribute); attribute defaults live on ExperimentConfig
_SCHEMA = {
    "problem.name": (str, "problem"),
    "problem.initial": (str, "initial"),
    "problem.kappa": (float, "kappa"),
    "problem.gamma": (float, "gamma"),
    "problem.entropy": (str, "entropy"),
    "problem.kruzhkov_c": (float, "kruzhkov_c"),
    "grid.n_x": (int, "n_x"),
    "grid.n_xi": (int, "n_xi"),
    "grid.x_min": (float, "x_min"),
    "grid.x_max": (float, "x_max"),
    "grid.xi_min": (float, "xi_min"),
    "grid.xi_max": (float, "xi_max"),
    "phase.n_u": (_ints, "n_u"),
    "phase.lower": (_floats, "phase_lower"),
    "phase.upper": (_floats, "phase_upper"),
    "phase.layout": (str, "phase_layout"),
    "phase.lambda_f": (float, "lambda_f"),
    "scheme.order": (int, "order"),
    "scheme.mode": (str, "mode"),
    "scheme.flux_variant": (str, "flux_variant"),
    "scheme.correction": (str, "correction"),
    "scheme.theta": (float, "theta"),
    "scheme.cfl": (float, "cfl"),
    "scheme.bc": (str, "bc"),
    "scheme.fixed_dt": (_optional_float, "fixed_dt"),
    "scheme.cfl_rule": (_optional_str, "cfl_rule"),
    "run.t_final": (float, "t_final"),
    "run.workers": (int, "workers"),
    "output.dir": (str, "output_dir"),
    "output.times": (_floats, "output_times"),
    "output.plots": (_bool, "plots"),
}
REQUIRED = ("problem.name",)


@dataclass
class ExperimentConfig:
    """A fully resolved experiment; build one with :func:`parse_config`."""

    problem: str
    initial: str
    kappa: float = 1.0
    gamma: float = 1.5
    entropy: str = ""
    kruzhkov_c: float = 0.5
    n_x: int = 100
    n_xi: int = 1
    x_min: float = 0.0
    x_max: float = 1.0
    xi_min: float = -1.0
    xi_max: float = 1.0
    n_u: list = field(default_factory=list)
    phase_lower: list = field(default_factory=list)
    phase_upper: list = field(default_factory=list)
    phase_layout: str = "cell"
    lambda_f: float = 1.0
    order: int = 1
    mode: str = "young-measure"
    flux_variant: str = "mean-field"
    correction: str = "flux"
    theta: float = 1.5
    cfl: float = 0.45
    bc: str = "free"
    fixed_dt: float | None = None
    cfl_rule: str | None = None
    t_final: float = 0.0
    workers: int = 1
    output_dir: str = "output"
    output_times: list = field(default_factory=list)
    plots: bool = False

    # -- runtime objects -------------------------------------------------
    def make_problem(self):
        return make_problem(self.problem, kappa=self.kappa, gamma=self.gamma)

    def make_entropy(self, problem=None):
        problem = problem or self.make_problem()
        return problem.entropy(self.entropy, self.kruzhkov_c)

    def scheme(self) -> SchemeConfig:
        return SchemeConfig(
            order=self.order, flux_variant=self.flux_variant, correction=self.correction,
            theta=self.theta, cfl=self.cfl, mode=self.mode, bc=self.bc, fixed_dt=self.fixed_dt,
            cfl_rule=self.cfl_rule,
        )

    def grids(self) -> Grids:
        phase = None
        if self.mode == "young-measure":
            bounds = list(zip(self.phase_lower, self.phase_upper))
            phase = build_phase_grid(bounds, self.n_u, self.phase_layout)
        return Grids(
            SpatialGrid(self.x_min, self.x_max, self.n_x),
            StochasticGrid(self.xi_min, self.xi_max, self.n_xi),
            phase,
        )

    def initial_moments(self, grids: Grids | None = None) -> np.ndarray:
        grids = grids or self.grids()
        return initial_data(self.initial)(grids.x.centers, grids.xi.nodes)

    def to_text(self) -> str:
        """Config text that parses back to this exact configuration."""
        lines = []
        for key, (_, attr) in _SCHEMA.items():
            v = getattr(self, attr)
            if isinstance(v, bool):
                s = "true" if v else "false"
            elif isinstance(v, float):
                s = repr(v)
            elif isinstance(v, list):
                s = ", ".join(repr(float(x)) if isinstance(x, float) else str(x) for x in v)
            elif v is None:
                s = "none"
            else:
                s = str(v)
            lines.append(f"{key} = {s}")
        return "\n".join(lines) + "\n"

    def with_updates(self, **changes) -> "ExperimentConfig":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(changes)
        cfg = ExperimentConfig(**data)
        _validate(cfg, {})
        return cfg


def _suggest(word, options):
    close = difflib.get_close_matches(word, list(options), n=3)
    listing = ", ".join(sorted(options))
    hint = f"; did you mean {', '.join(close)}?" if close else ""
    return f"{hint} (known: {listing})"


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate configuration text.

    Raises :class:`ConfigError` naming the line and key on unknown keys,
    unparsable values, duplicates, missing required keys or out-of-range
    settings.

    Examples
    --------
    >>> cfg = parse_config("problem.name = burgers\\ngrid.n_xi = 10\\n")
    >>> cfg.initial, cfg.n_x, cfg.n_xi, cfg.cfl
    ('example1', 100, 10, 0.45)
    """
    raw: dict[str, tuple[int, object]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'section.key = value', got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _SCHEMA:
            raise ConfigError(f"line {lineno}: unknown key {key!r}" + _suggest(key, _SCHEMA))
        if key in raw:
            raise ConfigError(f"line {lineno}: key {key!r} repeated (first on line {raw[key][0]})")
        parser = _SCHEMA[key][0]
        try:
            parsed = parser(value)
        except ValueError as err:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {err}") from None
        raw[key] = (lineno, parsed)

    for key in REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    lineno, name = raw["problem.name"]
    if name not in PROBLEMS:
        raise ConfigError(f"line {lineno}: unknown problem {name!r}" + _suggest(name, PROBLEMS))
    initial = raw.get("problem.initial", (None, DEFAULT_INITIAL[name]))[1]
    if initial not in INITIAL_CONDITIONS:
        raise ConfigError(
            f"line {raw['problem.initial'][0]}: unknown initial data {initial!r}"
            + _suggest(initial, INITIAL_CONDITIONS)
        )
    ic = INITIAL_CONDITIONS[initial]
    if ic.problem != name:
        raise ConfigError(f"initial data {initial!r} belongs to problem {ic.problem!r}, not {name!r}")

    ndim = len(ic.phase_bounds)
    cfg = ExperimentConfig(
        problem=name, initial=initial, n_x=ic.n_x, n_xi=ic.n_xi,
        x_min=ic.domain[0], x_max=ic.domain[1], xi_min=ic.xi_range[0], xi_max=ic.xi_range[1],
        n_u=[ic.phase_n] * ndim, phase_lower=[b[0] for b in ic.phase_bounds],
        phase_upper=[b[1] for b in ic.phase_bounds], lambda_f=ic.lambda_f, bc=ic.bc,
        t_final=ic.t_final,
    )
    for key, (_, value) in raw.items():
        setattr(cfg, _SCHEMA[key][1], value)
    if cfg.entropy == "":
        cfg.entropy = cfg.make_problem().default_entropy
    if len(cfg.n_u) == 1:
        cfg.n_u = cfg.n_u * ndim
    _validate(cfg, {k: v[0] for k, v in raw.items()})
    return cfg


def _validate(cfg: ExperimentConfig, lines: dict):
    def where(*keys):
        for k in keys:
            if k in lines:
                return f"line {lines[k]}: {k}: "
        return f"{keys[0]}: "

    def need(ok, msg, *keys):
        if not ok:
            raise ConfigError(where(*keys) + msg)

    ndim = len(INITIAL_CONDITIONS[cfg.initial].phase_bounds)
    need(cfg.order in (1, 2, 5), f"order must be 1, 2 or 5, got {cfg.order}", "scheme.order")
    need(cfg.mode in MODES, f"mode must be one of {MODES}" + _suggest(cfg.mode, MODES), "scheme.mode")
    need(cfg.flux_variant in FLUX_VARIANTS, f"must be one of {FLUX_VARIANTS}", "scheme.flux_variant")
    need(cfg.correction in CORRECTIONS, f"must be one of {CORRECTIONS}", "scheme.correction")
    need(cfg.bc in BOUNDARIES, f"must be one of {BOUNDARIES}", "scheme.bc")
    need(0 < cfg.cfl < 1, f"CFL must lie in (0, 1), got {cfg.cfl}", "scheme.cfl")
    need(1 <= cfg.theta <= 2, f"theta must lie in [1, 2], got {cfg.theta}", "scheme.theta")
    need(cfg.fixed_dt is None or cfg.fixed_dt > 0, "fixed_dt must be positive", "scheme.fixed_dt")
    need(cfg.cfl_rule in (None, "mean", "max"), "cfl_rule must be mean, max or auto",
         "scheme.cfl_rule")
    need(0 < cfg.lambda_f <= 1, f"lambda_f must lie in (0, 1], got {cfg.lambda_f}", "phase.lambda_f")
    need(cfg.t_final >= 0, f"t_final must be nonnegative, got {cfg.t_final}", "run.t_final")
    need(cfg.workers >= 1, "workers must be at least 1", "run.workers")
    need(cfg.n_x >= 1, "n_x must be positive", "grid.n_x")
    need(cfg.n_xi >= 1, "n_xi must be positive", "grid.n_xi")
    need(cfg.x_max > cfg.x_min, "x_max must exceed x_min", "grid.x_max", "grid.x_min")
    need(cfg.xi_max > cfg.xi_min, "xi_max must exceed xi_min", "grid.xi_max", "grid.xi_min")
    need(cfg.phase_layout in ("cell", "node"), "layout must be 'cell' or 'node'", "phase.layout")
    for key, vals in (("phase.n_u", cfg.n_u), ("phase.lower", cfg.phase_lower),
                      ("phase.upper", cfg.phase_upper)):
        need(len(vals) == ndim, f"needs {ndim} value(s), got {len(vals)}", key)
    need(all(c >= 2 for c in cfg.n_u), "every phase count must be >= 2", "phase.n_u")
    need(all(hi > lo for lo, hi in zip(cfg.phase_lower, cfg.phase_upper)),
         "phase.upper must exceed phase.lower componentwise", "phase.upper", "phase.lower")
    need(all(0 <= t <= cfg.t_final for t in cfg.output_times),
         "output times must lie in [0, t_final]", "output.times")
    problem = cfg.make_problem()
    need(cfg.entropy in problem.entropies,
         f"entropy {cfg.entropy!r} not available" + _suggest(cfg.entropy, problem.entropies),
         "problem.entropy")


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())

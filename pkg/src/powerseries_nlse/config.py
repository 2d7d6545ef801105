"""INI-style experiment files.

Example::

    [experiment]
    name = bright_p5
    method = power_series
    t_final = 1.0

    [equation]
    g1 = -1
    g2 = -2

    [grid]
    L = 40
    n_x = 400

    [time]
    dt = 1e-4
    s = 3
    p = 5

    [boundary]
    mode = exact

    [oracle]
    family = Bright
    A0 = 1
    k = 4
    x0 = -10

    [sweep]
    n_x = 100, 200, 300

Unknown sections and keys are errors, so a misspelt sweep axis cannot
silently do nothing.  The ``[oracle]`` section takes the parameters of the
named solution family; its equation coefficients default to those of
``[equation]``.
"""

from __future__ import annotations

import configparser
import dataclasses
import math
from pathlib import Path

from .analytic import FAMILIES, SpecError, make_spec
from .engine import ConfigError, Grid, PotentialSpec, SolverConfig
from .experiments import SWEEP_AXES, ExperimentPlan

__all__ = ["load_plan", "parse_plan", "SCHEMA"]

SCHEMA = {
    "experiment": {"name", "method", "t_final", "out_dir", "split_step_n_x", "threshold"},
    "equation": {"g1", "g2", "g10", "g11", "g12", "g20", "g21", "g22"},
    "grid": {"L", "n_x"},
    "time": {"dt", "dt_dx2", "n_t", "s", "p"},
    "boundary": {"mode", "update"},
    "potential": {"kind", "V0", "alpha"},
    "observer": {"stride"},
    "oracle": None,  # keys depend on the family
    "sweep": set(SWEEP_AXES),
}

_INT_AXES = {"p", "s", "n_t", "n_x"}
_SCALAR_G = ("g1", "g2")
_COUPLED_G = ("g10", "g11", "g12", "g20", "g21", "g22")


def _parser() -> configparser.ConfigParser:
    cp = configparser.ConfigParser(interpolation=None)
    cp.optionxform = str  # keep key case: L, V0, A0
    return cp


def load_plan(path) -> ExperimentPlan:
    """Read an experiment file; raises :class:`ConfigError` on any problem."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    return parse_plan(path.read_text())


def _float(section, key, raw) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key} = {raw!r} is not a number") from None


def _int(section, key, raw) -> int:
    val = _float(section, key, raw)
    if val != int(val):
        raise ConfigError(f"[{section}] {key} = {raw!r} is not an integer")
    return int(val)


def _list(section, key, raw, conv) -> list:
    items = [r.strip() for r in raw.split(",") if r.strip()]
    return [conv(section, key, r) for r in items]


def parse_plan(text: str) -> ExperimentPlan:
    cp = _parser()
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]; known: {sorted(SCHEMA)}")
        allowed = SCHEMA[section]
        if allowed is None:
            continue
        extra = set(cp[section]) - allowed
        if extra:
            raise ConfigError(f"unknown key(s) {sorted(extra)} in [{section}]; allowed: {sorted(allowed)}")

    def get(section, key, default=None):
        if cp.has_option(section, key):
            return cp.get(section, key)
        return default

    eq = {k: _float("equation", k, v) for k, v in (cp["equation"].items() if cp.has_section("equation") else [])}
    if not eq:
        raise ConfigError("missing [equation] section")

    for key in ("L", "n_x"):
        if get("grid", key) is None:
            raise ConfigError(f"missing [grid] {key}")
    for key in ("s", "p"):
        if get("time", key) is None:
            raise ConfigError(f"missing [time] {key}")
    dt_dx2 = get("time", "dt_dx2")
    dt_dx2 = None if dt_dx2 is None else _float("time", "dt_dx2", dt_dx2)
    if get("time", "dt") is None and dt_dx2 is None:
        raise ConfigError("missing [time] dt (or dt_dx2)")
    if get("time", "dt") is not None and dt_dx2 is not None:
        raise ConfigError("set [time] dt or dt_dx2, not both")

    grid = Grid(_float("grid", "L", get("grid", "L")), _int("grid", "n_x", get("grid", "n_x")))
    t_final = get("experiment", "t_final")
    t_final = None if t_final is None else _float("experiment", "t_final", t_final)
    n_t = get("time", "n_t")
    if n_t is None and t_final is None:
        raise ConfigError("set [time] n_t or [experiment] t_final")
    if dt_dx2 is not None:
        if t_final is None:
            raise ConfigError("[time] dt_dx2 needs [experiment] t_final")
        n_t = max(1, math.ceil(t_final / (dt_dx2 * grid.dx**2) - 1e-9))
        dt = t_final / n_t
    else:
        dt = _float("time", "dt", get("time", "dt"))
        n_t = _int("time", "n_t", n_t) if n_t is not None else max(1, int(round(t_final / dt)))

    kind = get("potential", "kind", "none")
    if kind == "none" and cp.has_section("potential") and (get("potential", "V0") or get("potential", "alpha")):
        kind = "sech_well"
    potential = PotentialSpec(
        kind=kind,
        V0=_float("potential", "V0", get("potential", "V0", "1.0")),
        alpha=_float("potential", "alpha", get("potential", "alpha", "1.0")),
    )

    oracle = _oracle(cp, eq)
    mode = get("boundary", "mode", "exact")
    cfg = SolverConfig(
        grid=grid,
        s=_int("time", "s", get("time", "s")),
        p=_int("time", "p", get("time", "p")),
        dt=dt,
        n_t=n_t,
        boundary_mode=mode,
        boundary_spec=oracle if mode in ("exact", "cw") else None,
        boundary_update=get("boundary", "update", "direct"),
        potential=potential,
        **eq,
    )

    sweep = {}
    if cp.has_section("sweep"):
        for key, raw in cp["sweep"].items():
            sweep[key] = _list("sweep", key, raw, _int if key in _INT_AXES else _float)

    ss_n_x = get("experiment", "split_step_n_x")
    plan = ExperimentPlan(
        name=get("experiment", "name", "experiment"),
        base=cfg,
        oracle=oracle,
        sweep=sweep,
        t_final=t_final,
        method=get("experiment", "method", "power_series"),
        stride=_int("observer", "stride", get("observer", "stride", "1")),
        out_dir=get("experiment", "out_dir"),
        split_step_n_x=None if ss_n_x is None else _int("experiment", "split_step_n_x", ss_n_x),
        scatter_threshold=_float("experiment", "threshold", get("experiment", "threshold", "0.5")),
        dt_dx2=dt_dx2,
    )
    # validate every sweep point before anything runs
    plan.points()
    return plan


def _oracle(cp, eq: dict):
    if not cp.has_section("oracle"):
        raise ConfigError("missing [oracle] section (initial profile)")
    params = dict(cp["oracle"])
    family = params.pop("family", None)
    if family is None:
        raise ConfigError("[oracle] needs a family")
    lookup = {name.lower(): cls for name, cls in FAMILIES.items()}
    cls = lookup.get(family.lower())
    if cls is None:
        raise ConfigError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    fields = {f.name for f in dataclasses.fields(cls)}
    extra = set(params) - fields
    if extra:
        raise ConfigError(f"unknown key(s) {sorted(extra)} in [oracle] for {cls.family}; allowed: {sorted(fields)}")
    values = {k: _float("oracle", k, v) for k, v in params.items()}
    for g in _SCALAR_G + _COUPLED_G:
        if g in fields and g not in values and g in eq:
            values[g] = eq[g]
    try:
        return make_spec(cls.family, **values)
    except SpecError as exc:
        raise ConfigError(str(exc)) from None

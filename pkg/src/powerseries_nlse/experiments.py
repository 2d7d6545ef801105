"""Parameter sweeps, method comparisons and scattering runs.

An :class:`ExperimentPlan` bundles a base solver configuration, the
analytic solution used as initial profile (and as error oracle when it
solves the equation being integrated) and a set of sweep axes.  The
runners return plain row objects and write CSV files whose content is
stable across repeated runs apart from the ``wall_seconds`` column.
"""

from __future__ import annotations

import csv
import dataclasses
import itertools
import logging
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .analytic import SolutionSpec
from .baseline import split_step_evolve
from .engine import (
    ConfigError,
    DivergenceError,
    Grid,
    SolverConfig,
    evolve,
    evolve_coupled,
    initial_state,
)
from .metrics import convergence_rate, error_profile

logger = logging.getLogger(__name__)

__all__ = [
    "ExperimentPlan",
    "TableRow",
    "ScatterOutcome",
    "CompareRow",
    "run_point",
    "run_table",
    "run_scatter",
    "compare_methods",
    "wall_time_exponent",
    "write_csv",
    "TABLE_COLUMNS",
    "COMPARE_COLUMNS",
    "SCATTER_COLUMNS",
]

METHODS = ("power_series", "split_step")
SWEEP_AXES = ("p", "s", "dt", "n_t", "n_x")

TABLE_COLUMNS = ("n_x", "dt", "p", "s", "error_max", "error_rms", "R", "wall_seconds", "status")
COMPARE_COLUMNS = ("method", "n_x", "n_t", "dt", "error_max", "error_rms", "wall_seconds", "status")
SCATTER_COLUMNS = (
    "n_x",
    "dt",
    "n_t",
    "transmitted_fraction",
    "outcome",
    "peak_position",
    "transmitted_peak",
    "reflected_peak",
    "wall_seconds",
    "status",
)


@dataclass(frozen=True)
class ExperimentPlan:
    """A base configuration plus the axes to sweep.

    Attributes
    ----------
    name : str
    base : SolverConfig
        Supplies everything a sweep point does not override.
    oracle : SolutionSpec
        Initial profile, and reference solution for error columns.
    sweep : dict
        Lists of values keyed by ``p``, ``s``, ``dt``, ``n_t`` or ``n_x``.
    t_final : float, optional
        When set, every point ends at ``t_final``: ``n_t = t_final / dt``,
        or ``dt = t_final / n_t`` when ``n_t`` is swept.
    method : str
        ``power_series`` or ``split_step``.
    stride : int
        Observer stride for time-series output.
    out_dir : str, optional
    split_step_n_x : int, optional
        Grid size for the split-step side of a comparison (power of two);
        defaults to the base grid.
    dt_dx2 : float, optional
        Tie the step to the grid: ``dt = dt_dx2 * dx**2`` at every point,
        shortened so that a whole number of steps reaches ``t_final``.
        Explicit schemes with a second-derivative stencil are stable only
        below a fixed multiple of ``dx**2``.
    """

    name: str
    base: SolverConfig
    oracle: SolutionSpec
    sweep: dict = field(default_factory=dict)
    t_final: Optional[float] = None
    method: str = "power_series"
    stride: int = 1
    out_dir: Optional[str] = None
    split_step_n_x: Optional[int] = None
    scatter_threshold: float = 0.5
    dt_dx2: Optional[float] = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        unknown = set(self.sweep) - set(SWEEP_AXES)
        if unknown:
            raise ConfigError(f"unknown sweep axes {sorted(unknown)}; allowed: {SWEEP_AXES}")
        if self.t_final is not None and "n_t" in self.sweep and "dt" in self.sweep:
            raise ConfigError("with a fixed t_final, sweep either n_t or dt, not both")
        if self.t_final is not None and not self.t_final > 0:
            raise ConfigError(f"t_final must be positive, got {self.t_final}")
        if self.oracle.components != self.base.components:
            raise ConfigError("oracle and equation disagree on the number of components")
        if self.method == "split_step" and self.base.components != 1:
            raise ConfigError("split-step is implemented for the scalar equation only")
        if self.dt_dx2 is not None:
            if not self.dt_dx2 > 0:
                raise ConfigError(f"dt_dx2 must be positive, got {self.dt_dx2}")
            if self.t_final is None or {"dt", "n_t"} & set(self.sweep):
                raise ConfigError("dt_dx2 needs t_final and excludes dt/n_t sweeps")

    def points(self) -> list[SolverConfig]:
        """Every sweep point, validated; ``n_x`` varies fastest."""
        axes = [a for a in SWEEP_AXES if a in self.sweep]
        if not axes:
            return [self._config({})] if not self.sweep else []
        values = [list(self.sweep[a]) for a in axes]
        return [self._config(dict(zip(axes, combo))) for combo in itertools.product(*values)]

    def _config(self, over: dict) -> SolverConfig:
        base = self.base
        n_x = int(over.get("n_x", base.grid.n_x))
        dt = float(over.get("dt", base.dt))
        if self.dt_dx2 is not None:
            n_t = max(1, math.ceil(self.t_final / (self.dt_dx2 * Grid(base.grid.L, n_x).dx ** 2) - 1e-9))
            dt = self.t_final / n_t
        elif self.t_final is None:
            n_t = int(over.get("n_t", base.n_t))
        elif "n_t" in over:
            n_t = int(over["n_t"])
            dt = self.t_final / n_t
        else:
            n_t = _steps(self.t_final, dt)
        return dataclasses.replace(
            base,
            grid=Grid(base.grid.L, n_x),
            dt=dt,
            n_t=n_t,
            p=int(over.get("p", base.p)),
            s=int(over.get("s", base.s)),
        )


def _steps(t_final: float, dt: float) -> int:
    n = int(round(t_final / dt))
    if n < 1 or abs(n * dt - t_final) > 1e-9 * max(1.0, t_final):
        raise ConfigError(f"t_final={t_final} is not a whole number of steps of dt={dt}")
    return n


@dataclass(frozen=True)
class TableRow:
    n_x: int
    dt: float
    p: int
    s: int
    error_max: float
    error_rms: float
    R: Optional[float]
    wall_seconds: float
    status: str


@dataclass(frozen=True)
class CompareRow:
    method: str
    n_x: int
    n_t: int
    dt: float
    error_max: float
    error_rms: float
    wall_seconds: float
    status: str


@dataclass(frozen=True)
class ScatterOutcome:
    n_x: int
    dt: float
    n_t: int
    transmitted_fraction: float
    outcome: str
    peak_position: float
    transmitted_peak: float
    reflected_peak: float
    wall_seconds: float
    status: str
    x: np.ndarray = field(repr=False, compare=False, default=None)
    magnitude: np.ndarray = field(repr=False, compare=False, default=None)


def run_point(cfg: SolverConfig, oracle: SolutionSpec, method: str = "power_series"):
    """One simulation from ``oracle`` at ``t = 0``.

    Returns ``(final_states, wall_seconds)`` where ``final_states`` is a
    tuple with one :class:`FieldState` per component.
    """
    start = initial_state(oracle, cfg.grid)
    t0 = time.perf_counter()
    if method == "split_step":
        final = (split_step_evolve(start, cfg.g1, cfg.g2, cfg.potential, cfg.dt, cfg.n_t, cfg.grid.L),)
    elif cfg.components == 1:
        final = (evolve(start, cfg),)
    else:
        final = evolve_coupled(start, cfg)
    return final, time.perf_counter() - t0


def _errors(final, oracle: SolutionSpec, grid: Grid):
    exact = oracle.evaluate(grid.x, final[0].t)
    if not isinstance(exact, tuple):
        exact = (exact,)
    e_max = e_rms = 0.0
    for st, ex in zip(final, exact):
        prof = error_profile(st.psi, ex)
        e_max = max(e_max, float(prof.max()))
        e_rms = max(e_rms, float(math.sqrt(np.mean(prof**2))))
    return e_max, e_rms


def _table_worker(args):
    cfg, oracle, method = args
    try:
        final, wall = run_point(cfg, oracle, method)
    except DivergenceError as exc:
        logger.warning("n_x=%d dt=%g p=%d s=%d diverged: %s", cfg.grid.n_x, cfg.dt, cfg.p, cfg.s, exc)
        return math.nan, math.nan, 0.0, "diverged"
    e_max, e_rms = _errors(final, oracle, cfg.grid)
    return e_max, e_rms, wall, "ok"


def _map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order whatever the completion order
        return list(pool.map(fn, items))


def run_table(plan: ExperimentPlan, jobs: int = 1) -> list[TableRow]:
    """Error table over the sweep.

    ``R`` is the convergence rate against the previous row when the two
    rows differ only in ``n_x``; diverged points get ``status=diverged``
    and do not stop the sweep.
    """
    configs = plan.points()
    results = _map(_table_worker, [(c, plan.oracle, plan.method) for c in configs], jobs)
    rows = []
    prev = None
    for cfg, (e_max, e_rms, wall, status) in zip(configs, results):
        R = None
        key = (cfg.dt, cfg.p, cfg.s, cfg.n_t)
        if prev is not None and prev[0] == key and status == "ok" and prev[1] == "ok":
            if prev[3] > 0 and e_rms > 0 and prev[2] != cfg.grid.n_x:
                R = convergence_rate(prev[3], e_rms, prev[2], cfg.grid.n_x)
        rows.append(TableRow(cfg.grid.n_x, cfg.dt, cfg.p, cfg.s, e_max, e_rms, R, wall, status))
        prev = (key, status, cfg.grid.n_x, e_rms)
    return rows


def _compare_worker(args):
    method, cfg, oracle = args
    e_max, e_rms, wall, status = _table_worker((cfg, oracle, method))
    return CompareRow(method, cfg.grid.n_x, cfg.n_t, cfg.dt, e_max, e_rms, wall, status)


def compare_methods(plan: ExperimentPlan, jobs: int = 1) -> list[CompareRow]:
    """Power-series and split-step errors and timings over the sweep.

    Rows come in pairs per sweep point, power series first.  The split-step
    side runs on ``plan.split_step_n_x`` points when that is set.
    """
    if plan.base.components != 1:
        raise ConfigError("method comparison needs the scalar equation")
    items = []
    for cfg in plan.points():
        items.append(("power_series", cfg, plan.oracle))
        ss_cfg = cfg
        if plan.split_step_n_x is not None:
            ss_cfg = dataclasses.replace(cfg, grid=Grid(cfg.grid.L, plan.split_step_n_x))
        items.append(("split_step", ss_cfg, plan.oracle))
    return _map(_compare_worker, items, jobs)


def wall_time_exponent(rows, method: str = "power_series") -> float:
    """Slope of ``log(wall_seconds)`` against ``log(n_t)`` for ``method`` rows."""
    pts = [(r.n_t, r.wall_seconds) for r in rows if r.method == method and r.status == "ok" and r.wall_seconds > 0]
    if len(pts) < 2:
        raise ValueError("need at least two timed rows")
    n_t, wall = np.array(pts, dtype=float).T
    slope, _ = np.polyfit(np.log(n_t), np.log(wall), 1)
    return float(slope)


def _scatter_worker(args):
    cfg, oracle, method, threshold = args
    try:
        final, wall = run_point(cfg, oracle, method)
    except DivergenceError as exc:
        logger.warning("scatter n_x=%d diverged: %s", cfg.grid.n_x, exc)
        nan = math.nan
        return ScatterOutcome(cfg.grid.n_x, cfg.dt, cfg.n_t, nan, "diverged", nan, nan, nan, 0.0, "diverged")
    x = cfg.grid.x
    mag = np.abs(final[0].psi)
    dens = mag**2
    total = float(dens.sum())
    right = float(dens[x > 0].sum())
    frac = right / total if total > 0 else math.nan
    outcome = "transmission" if frac > threshold else "reflection"
    # side peaks ignore the well core, where a trapped mode may sit
    core = 3.0 / abs(cfg.potential.alpha) if cfg.potential.kind == "sech_well" else 0.0
    pos = x > core
    neg = x < -core
    return ScatterOutcome(
        n_x=cfg.grid.n_x,
        dt=cfg.dt,
        n_t=cfg.n_t,
        transmitted_fraction=frac,
        outcome=outcome,
        peak_position=float(x[np.argmax(mag)]),
        transmitted_peak=float(x[pos][np.argmax(mag[pos])]),
        reflected_peak=float(x[neg][np.argmax(mag[neg])]),
        wall_seconds=wall,
        status="ok",
        x=x,
        magnitude=mag,
    )


def run_scatter(plan: ExperimentPlan, jobs: int = 1) -> list[ScatterOutcome]:
    """Scatter the initial soliton off the plan's potential at every sweep point.

    The outcome is ``transmission`` when more than ``plan.scatter_threshold``
    of ``sum |psi|^2`` ends up on ``x > 0``.  ``transmitted_peak`` and
    ``reflected_peak`` locate the largest ``|psi|`` on either side outside
    the well core ``|x| <= 3 / alpha``.
    """
    if plan.base.potential.is_zero:
        raise ConfigError("scattering needs a potential")
    if plan.base.components != 1:
        raise ConfigError("scattering runs are scalar")
    items = [(cfg, plan.oracle, plan.method, plan.scatter_threshold) for cfg in plan.points()]
    return _map(_scatter_worker, items, jobs)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, path, columns) -> Path:
    """Write dataclass rows, one column per name in ``columns``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(getattr(row, c)) for c in columns])
    return path


def write_columns(path, **columns) -> Path:
    """Write equal-length arrays as named CSV columns."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    data = [np.asarray(columns[n]) for n in names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for vals in zip(*data):
            w.writerow([repr(float(v)) for v in vals])
    return path


def default_jobs() -> int:
    return max(1, (os.cpu_count() or 1))

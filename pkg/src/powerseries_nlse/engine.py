"""Power-series time integrator for the scalar, potential-bearing and coupled NLSE.

Each time step expands the field in a Taylor series in the step length,

    psi(x, t + dt) = sum_{l=0}^{s} c_l(x) dt**l,

with ``c_0`` the current field and the higher coefficients obtained from

    (l + 1) c_{l+1} = i [g1 c_l'' + g2 sum_{m+n+q=l} c_m c_n conj(c_q) - V c_l]

where ``''`` is the ``p``-point stencil.  The first and last ``(p - 1) / 2``
grid points cannot be reached by the stencil and take their coefficients
from a boundary condition instead.  For two coupled components the
nonlinear factor becomes ``g_k1 |psi_1|^2 + g_k2 |psi_2|^2``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .analytic import SolutionSpec, background_cw, boundary_taylor_coefficients
from .stencil import StencilTable, stencil_weights

logger = logging.getLogger(__name__)

__all__ = [
    "Grid",
    "FieldState",
    "SeriesCoefficients",
    "PotentialSpec",
    "SolverConfig",
    "ConfigError",
    "DivergenceError",
    "derive_series",
    "apply_boundary",
    "step",
    "evolve",
    "evolve_coupled",
    "initial_state",
    "ErrorObserver",
    "NormObserver",
    "SnapshotObserver",
]

BOUNDARY_MODES = ("exact", "cw", "zero")
BOUNDARY_UPDATES = ("direct", "analytic")
ZERO_EDGE_TOLERANCE = 1e-8


class ConfigError(ValueError):
    """Inconsistent solver configuration."""


class DivergenceError(RuntimeError):
    """A non-finite value appeared during time stepping."""

    def __init__(self, step_index: int, last_good_time: float):
        super().__init__(f"non-finite field at step {step_index} (last good time {last_good_time:g})")
        self.step_index = step_index
        self.last_good_time = last_good_time


@dataclass(frozen=True)
class Grid:
    """Uniform grid on ``[-L/2, L/2]`` with ``n_x`` points including both ends."""

    L: float
    n_x: int

    def __post_init__(self):
        if self.L <= 0:
            raise ConfigError(f"domain length must be positive, got {self.L}")
        if self.n_x < 3:
            raise ConfigError(f"need at least 3 grid points, got {self.n_x}")

    @property
    def dx(self) -> float:
        return self.L / (self.n_x - 1)

    @property
    def x(self) -> np.ndarray:
        return -self.L / 2.0 + np.arange(self.n_x) * self.dx


@dataclass
class FieldState:
    """Field ``psi = u + i v`` on the grid at time ``t``."""

    u: np.ndarray
    v: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        if self.u.shape != self.v.shape or self.u.ndim != 1:
            raise ValueError("u and v must be 1-d arrays of equal length")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise DivergenceError(-1, self.t)

    @classmethod
    def from_complex(cls, psi, t: float = 0.0) -> "FieldState":
        psi = np.asarray(psi, dtype=complex)
        return cls(psi.real.copy(), psi.imag.copy(), t)

    @property
    def psi(self) -> np.ndarray:
        return self.u + 1j * self.v

    @property
    def t_current(self) -> float:
        return self.t

    def copy(self) -> "FieldState":
        return FieldState(self.u.copy(), self.v.copy(), self.t)


@dataclass(frozen=True)
class PotentialSpec:
    """Time-independent external potential.

    ``sech_well`` is ``V(x) = -V0**2 / cosh(alpha x)**2``; ``tabulated``
    takes the values on the grid directly.
    """

    kind: str = "none"
    V0: float = 0.0
    alpha: float = 1.0
    values: Optional[tuple] = None

    def __post_init__(self):
        if self.kind not in ("none", "sech_well", "tabulated"):
            raise ConfigError(f"unknown potential kind {self.kind!r}")
        if self.kind == "tabulated" and self.values is None:
            raise ConfigError("tabulated potential needs values")

    @property
    def is_zero(self) -> bool:
        return self.kind == "none"

    def evaluate(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kind == "none":
            return np.zeros_like(x)
        if self.kind == "sech_well":
            with np.errstate(over="ignore"):
                return -(self.V0**2) / np.cosh(self.alpha * x) ** 2
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != x.shape:
            raise ConfigError(f"tabulated potential has {vals.size} values for {x.size} grid points")
        return vals


@dataclass(frozen=True)
class SolverConfig:
    """Everything a run needs apart from the initial field.

    Scalar runs set ``g1`` and ``g2``; coupled runs set the six ``g1x``/``g2x``
    coefficients instead.
    """

    grid: Grid
    s: int
    p: int
    dt: float
    n_t: int
    g1: Optional[float] = None
    g2: Optional[float] = None
    g10: Optional[float] = None
    g11: Optional[float] = None
    g12: Optional[float] = None
    g20: Optional[float] = None
    g21: Optional[float] = None
    g22: Optional[float] = None
    boundary_mode: str = "exact"
    boundary_spec: Optional[SolutionSpec] = None
    boundary_update: str = "direct"
    potential: PotentialSpec = field(default_factory=PotentialSpec)

    def __post_init__(self):
        if self.s < 1:
            raise ConfigError(f"series order must be >= 1, got {self.s}")
        if self.p < 3 or self.p % 2 == 0:
            raise ConfigError(f"stencil size must be odd and >= 3, got {self.p}")
        if self.grid.n_x <= self.p:
            raise ConfigError(f"n_x={self.grid.n_x} leaves no interior for p={self.p}")
        if not self.dt > 0:
            raise ConfigError(f"time step must be positive, got {self.dt}")
        if self.n_t < 0:
            raise ConfigError(f"n_t must be >= 0, got {self.n_t}")
        if self.boundary_mode not in BOUNDARY_MODES:
            raise ConfigError(f"boundary_mode must be one of {BOUNDARY_MODES}")
        if self.boundary_update not in BOUNDARY_UPDATES:
            raise ConfigError(f"boundary_update must be one of {BOUNDARY_UPDATES}")
        scalar = self.g1 is not None and self.g2 is not None
        coupled_g = (self.g10, self.g11, self.g12, self.g20, self.g21, self.g22)
        coupled = all(g is not None for g in coupled_g)
        if scalar == coupled:
            raise ConfigError("set either (g1, g2) or all six coupled coefficients")
        if any(g is not None for g in coupled_g) and any(g is not None for g in (self.g1, self.g2)):
            raise ConfigError("set either (g1, g2) or all six coupled coefficients")
        if self.boundary_mode == "exact" and self.boundary_spec is None:
            raise ConfigError("exact boundary mode needs a boundary_spec")
        if self.boundary_mode == "cw" and self.boundary_spec is None:
            raise ConfigError("cw boundary mode needs a boundary_spec to infer the background from")
        if self.boundary_spec is not None and self.boundary_spec.components != self.components:
            raise ConfigError("boundary_spec has the wrong number of components")
        if self.boundary_mode == "cw":
            background_cw(self.boundary_spec)

    @property
    def components(self) -> int:
        return 1 if self.g1 is not None else 2

    @property
    def half_width(self) -> int:
        return (self.p - 1) // 2

    @property
    def dispersion(self) -> np.ndarray:
        if self.components == 1:
            return np.array([self.g1], dtype=float)
        return np.array([self.g10, self.g20], dtype=float)

    @property
    def nonlinearity(self) -> np.ndarray:
        if self.components == 1:
            return np.array([[self.g2]], dtype=float)
        return np.array([[self.g11, self.g12], [self.g21, self.g22]], dtype=float)

    @property
    def t_final(self) -> float:
        return self.n_t * self.dt


@dataclass
class SeriesCoefficients:
    """Taylor coefficients of every component at every grid point.

    ``re[k, l, i]`` and ``im[k, l, i]`` are the real and imaginary parts of
    the order-``l`` coefficient of component ``k`` at point ``i``.  ``a``
    and ``b`` (and ``c``/``d`` for coupled runs) are the per-component
    ``(s + 1, n_x)`` views.  ``boundary_next`` holds edge values at
    ``t + dt`` when those are taken from the boundary condition directly.
    """

    re: np.ndarray
    im: np.ndarray
    half_width: int
    t_base: float = 0.0
    boundary_next: Optional[np.ndarray] = None

    @classmethod
    def empty(cls, components: int, s: int, n: int, half_width: int, t_base: float = 0.0):
        shape = (components, s + 1, n)
        return cls(np.zeros(shape), np.zeros(shape), half_width, t_base)

    @property
    def s(self) -> int:
        return self.re.shape[1] - 1

    @property
    def coeffs(self) -> np.ndarray:
        """Complex copy, shape ``(K, s + 1, n_x)``."""
        return self.re + 1j * self.im

    @property
    def a(self) -> np.ndarray:
        return self.re[0]

    @property
    def b(self) -> np.ndarray:
        return self.im[0]

    @property
    def c(self) -> np.ndarray:
        return self.re[1]

    @property
    def d(self) -> np.ndarray:
        return self.im[1]

    def boundary_index(self) -> np.ndarray:
        n = self.re.shape[2]
        h = self.half_width
        return np.r_[0:h, n - h : n]


def _edge_points(grid: Grid, h: int) -> np.ndarray:
    x = grid.x
    return np.concatenate([x[:h], x[-h:]])


def apply_boundary(coeffs: SeriesCoefficients, cfg: SolverConfig, t_base: float) -> None:
    """Write orders ``1..s`` at the ``2 h`` edge points, and ``boundary_next``.

    ``exact`` uses the Taylor coefficients of ``cfg.boundary_spec``; ``cw``
    advances the present edge values as plane waves with the background
    frequency of ``cfg.boundary_spec``; ``zero`` sets them to zero and
    keeps the edge values frozen.
    """
    coeffs.t_base = t_base
    feed = _BoundaryFeed(cfg, t_base, block=1)
    coeffs.boundary_next = feed.fill(coeffs.re, coeffs.im, 1)


class _BoundaryFeed:
    """Edge coefficients for step ``n`` (taken at ``t0 + (n - 1) dt``).

    In exact mode the analytic Taylor coefficients are computed for
    ``block`` consecutive steps at a time, which keeps the per-step cost
    down to a copy.
    """

    def __init__(self, cfg: SolverConfig, t0: float, block: int = 512):
        self.cfg = cfg
        self.t0 = t0
        self.block = max(1, int(block))
        n = cfg.grid.n_x
        h = cfg.half_width
        self.idx = np.r_[0:h, n - h : n]
        self.xb = _edge_points(cfg.grid, h)
        self.direct = cfg.boundary_update == "direct"
        if cfg.boundary_mode == "cw":
            self.omegas = np.array([0.0 if cw is None else cw.omega for cw in background_cw(cfg.boundary_spec)])
        self._first = None

    def _load(self, n: int) -> None:
        cfg = self.cfg
        steps = np.arange(n, n + self.block)
        times = self.t0 + (steps - 1) * cfg.dt
        xb = self.xb[None, :]
        taylor = boundary_taylor_coefficients(cfg.boundary_spec, xb, times[:, None], cfg.s)
        if cfg.components == 1:
            taylor = (taylor,)
        # (block, K, s + 1, 2h)
        stacked = np.stack(taylor, axis=0).transpose(2, 0, 1, 3)
        self._taylor_re = np.ascontiguousarray(stacked.real)
        self._taylor_im = np.ascontiguousarray(stacked.imag)
        if self.direct:
            nxt = cfg.boundary_spec.evaluate(xb, times[:, None] + cfg.dt)
            if cfg.components == 1:
                nxt = (nxt,)
            shape = (self.block, self.xb.size)
            self._next = np.stack([np.broadcast_to(v, shape) for v in nxt], axis=1).astype(complex)
        self._first = n

    def fill(self, re: np.ndarray, im: np.ndarray, n: int) -> Optional[np.ndarray]:
        cfg = self.cfg
        idx = self.idx
        mode = cfg.boundary_mode
        if mode == "zero":
            re[:, 1:, idx] = 0.0
            im[:, 1:, idx] = 0.0
            return re[:, 0, idx] + 1j * im[:, 0, idx] if self.direct else None

        if mode == "cw":
            edge = re[:, 0, idx] + 1j * im[:, 0, idx]
            factor = np.ones(re.shape[0], dtype=complex)
            for l in range(1, cfg.s + 1):
                factor = factor * (1j * self.omegas) / l
                term = factor[:, None] * edge
                re[:, l, idx] = term.real
                im[:, l, idx] = term.imag
            return edge * np.exp(1j * self.omegas * cfg.dt)[:, None] if self.direct else None

        if self._first is None or not self._first <= n < self._first + self.block:
            self._load(n)
        j = n - self._first
        re[:, 1:, idx] = self._taylor_re[j, :, 1:]
        im[:, 1:, idx] = self._taylor_im[j, :, 1:]
        return self._next[j] if self.direct else None


class _Workspace:
    # per-run buffers and constants reused across steps
    def __init__(self, cfg: SolverConfig, table: StencilTable):
        n = cfg.grid.n_x
        K = cfg.components
        self.q = np.zeros((K, cfg.s, n))
        self.lap_re = np.zeros(n)
        self.lap_im = np.zeros(n)
        self.weights = np.ascontiguousarray(table.weights, dtype=float)
        self.inv_dx2 = 1.0 / cfg.grid.dx**2
        self.disp = cfg.dispersion
        self.nonlin = cfg.nonlinearity
        self.use_pot = not cfg.potential.is_zero
        self.pot = cfg.potential.evaluate(cfg.grid.x)

    def recursion(self, coeffs: SeriesCoefficients) -> None:
        _kernels.series_recursion(
            coeffs.re, coeffs.im, self.q, self.lap_re, self.lap_im, self.weights, self.inv_dx2,
            self.disp, self.nonlin, self.pot, self.use_pot, coeffs.half_width,
        )


def _check_table(cfg: SolverConfig, table: Optional[StencilTable]) -> StencilTable:
    if table is None:
        return stencil_weights(cfg.p)
    if table.p != cfg.p:
        raise ConfigError(f"stencil table is for p={table.p} but config has p={cfg.p}")
    return table


def _derive(psis, t, cfg, ws: _Workspace) -> SeriesCoefficients:
    coeffs = SeriesCoefficients.empty(len(psis), cfg.s, cfg.grid.n_x, cfg.half_width, t)
    for k, psi in enumerate(psis):
        coeffs.re[k, 0] = psi.real
        coeffs.im[k, 0] = psi.imag
    apply_boundary(coeffs, cfg, t)
    ws.recursion(coeffs)
    if not (np.all(np.isfinite(coeffs.re)) and np.all(np.isfinite(coeffs.im))):
        raise DivergenceError(-1, t)
    return coeffs


def derive_series(state, cfg: SolverConfig, table: Optional[StencilTable] = None) -> SeriesCoefficients:
    """Taylor coefficients at the present time for every grid point.

    ``state`` is a :class:`FieldState`, or a pair of them for coupled runs.
    Edge coefficients come from :func:`apply_boundary`; they do not depend
    on interior values, so they are filled before the interior recursion.
    """
    table = _check_table(cfg, table)
    states = _as_states(state, cfg)
    ws = _Workspace(cfg, table)
    return _derive([st.psi for st in states], states[0].t, cfg, ws)


def step(coeffs: SeriesCoefficients, dt: float):
    """Sum the series at ``dt``; returns a :class:`FieldState` (or a pair)."""
    K, _, n = coeffs.re.shape
    u = np.empty((K, n))
    v = np.empty((K, n))
    ok = _kernels.horner_sum(coeffs.re, coeffs.im, dt, u, v)
    if coeffs.boundary_next is not None:
        idx = coeffs.boundary_index()
        u[:, idx] = coeffs.boundary_next.real
        v[:, idx] = coeffs.boundary_next.imag
        ok = ok and bool(np.isfinite(coeffs.boundary_next).all())
    if not ok:
        raise DivergenceError(-1, coeffs.t_base)
    states = [FieldState(u[k], v[k], coeffs.t_base + dt) for k in range(K)]
    return states[0] if K == 1 else tuple(states)


def _as_states(state, cfg: SolverConfig) -> list:
    states = [state] if isinstance(state, FieldState) else list(state)
    if len(states) != cfg.components:
        raise ConfigError(f"expected {cfg.components} field component(s), got {len(states)}")
    for st in states:
        if st.u.shape[0] != cfg.grid.n_x:
            raise ConfigError(f"field has {st.u.shape[0]} points but the grid has {cfg.grid.n_x}")
    return states


def _check_zero_edges(psis, cfg: SolverConfig) -> None:
    h = cfg.half_width
    for psi in psis:
        edge = np.abs(np.concatenate([psi[:h], psi[-h:]]))
        if edge.max(initial=0.0) >= ZERO_EDGE_TOLERANCE:
            raise ConfigError(
                f"zero boundary mode needs |psi| < {ZERO_EDGE_TOLERANCE:g} on the edge blocks, "
                f"found {edge.max():.3g}"
            )


def _run(states, cfg: SolverConfig, table, observers):
    table = _check_table(cfg, table)
    states = _as_states(states, cfg)
    psis = [st.psi for st in states]
    if cfg.boundary_mode == "zero":
        _check_zero_edges(psis, cfg)
    ws = _Workspace(cfg, table)
    observers = list(observers or ())
    t0 = states[0].t
    K, n_x = len(states), cfg.grid.n_x
    feed = _BoundaryFeed(cfg, t0, block=min(512, max(1, cfg.n_t)))
    idx = feed.idx
    coeffs = SeriesCoefficients.empty(K, cfg.s, n_x, cfg.half_width, t0)
    u = np.array([st.u for st in states])
    v = np.array([st.v for st in states])

    def notify(n):
        psi = None
        for obs in observers:
            if n % obs.stride == 0 or n == cfg.n_t:
                if psi is None:
                    psi = u + 1j * v
                obs(n, t0 + n * cfg.dt, psi)

    notify(0)
    for n in range(1, cfg.n_t + 1):
        coeffs.re[:, 0] = u
        coeffs.im[:, 0] = v
        nxt = feed.fill(coeffs.re, coeffs.im, n)
        ws.recursion(coeffs)
        ok = _kernels.horner_sum(coeffs.re, coeffs.im, cfg.dt, u, v)
        if nxt is not None:
            u[:, idx] = nxt.real
            v[:, idx] = nxt.imag
            ok = ok and bool(np.isfinite(nxt).all())
        if not ok:
            raise DivergenceError(n, t0 + (n - 1) * cfg.dt)
        notify(n)
    t_end = t0 + cfg.n_t * cfg.dt
    return [FieldState(u[k].copy(), v[k].copy(), t_end) for k in range(K)]


def evolve(initial: FieldState, cfg: SolverConfig, table: Optional[StencilTable] = None, observers=()) -> FieldState:
    """Advance a scalar field by ``cfg.n_t`` steps of ``cfg.dt``.

    Observers are called as ``obs(step_index, t, psi)`` with ``psi`` of
    shape ``(1, n_x)``, every ``obs.stride`` steps and at the last step.
    """
    if cfg.components != 1:
        raise ConfigError("evolve is for scalar runs; use evolve_coupled")
    return _run(initial, cfg, table, observers)[0]


def evolve_coupled(initial, cfg: SolverConfig, table: Optional[StencilTable] = None, observers=()):
    """Coupled counterpart of :func:`evolve`; ``initial`` is a pair of states."""
    if cfg.components != 2:
        raise ConfigError("evolve_coupled needs the six coupled coefficients")
    return tuple(_run(initial, cfg, table, observers))


def initial_state(spec: SolutionSpec, grid: Grid, t: float = 0.0):
    """Sample an analytic solution on the grid (a pair for two components)."""
    psi = spec.evaluate(grid.x, t)
    if isinstance(psi, tuple):
        return tuple(FieldState.from_complex(p, t) for p in psi)
    return FieldState.from_complex(psi, t)


class ErrorObserver:
    """Records max-abs and RMS magnitude error plus the norm against an oracle."""

    def __init__(self, oracle: SolutionSpec, grid: Grid, stride: int = 1):
        self.oracle = oracle
        self.grid = grid
        self.stride = max(1, int(stride))
        self.rows: list[tuple] = []

    def __call__(self, n, t, psi):
        exact = self.oracle.evaluate(self.grid.x, t)
        if not isinstance(exact, tuple):
            exact = (exact,)
        row = [t]
        for k, ex in enumerate(exact):
            prof = np.abs(np.abs(psi[k]) - np.abs(ex))
            row += [float(prof.max()), float(math.sqrt(np.mean(prof**2))), _norm(psi[k], self.grid.dx)]
        self.rows.append(tuple(row))


class NormObserver:
    """Records the trapezoidal norm of every component."""

    def __init__(self, grid: Grid, stride: int = 1):
        self.grid = grid
        self.stride = max(1, int(stride))
        self.rows: list[tuple] = []

    def __call__(self, n, t, psi):
        self.rows.append((t,) + tuple(_norm(p, self.grid.dx) for p in psi))


class SnapshotObserver:
    """Keeps copies of the field at the requested times (nearest step)."""

    stride = 1

    def __init__(self, times: Iterable[float], dt: float, t0: float = 0.0):
        self._wanted = {int(round((t - t0) / dt)) for t in times}
        self.snapshots: dict[float, np.ndarray] = {}

    def __call__(self, n, t, psi):
        if n in self._wanted:
            self.snapshots[t] = np.array(psi, copy=True)


def _norm(psi, dx: float) -> float:
    w = np.abs(psi) ** 2
    return float(dx * (w.sum() - 0.5 * (w[0] + w[-1])))

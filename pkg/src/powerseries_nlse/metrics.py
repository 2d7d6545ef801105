"""Error norms, convergence rates and a-priori error estimates.

Errors compare magnitudes, ``| |psi_num| - |psi_exact| |``, so a constant
phase offset between numerical and exact solutions is not counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jets
from .analytic import SolutionSpec, boundary_taylor_coefficients
from .jets import Jet

__all__ = [
    "ErrorReport",
    "error_report",
    "error_profile",
    "convergence_rate",
    "predict_error_s",
    "predict_error_p",
    "PowerLawFit",
    "fit_power_law",
]

BOUNDARY_FRACTION = 0.05
CENTER_FRACTION = 0.10


@dataclass(frozen=True)
class ErrorReport:
    """Magnitude error of one field component at time ``t_eval``.

    Attributes
    ----------
    error_max, error_rms : float
        Max-abs and root-mean-square of ``profile``.
    profile : numpy.ndarray
        Point-wise magnitude error.
    boundary_error : float
        Max of ``profile`` over the two edge windows.
    center_error : float
        Max of ``profile`` over the central window.
    t_eval : float
    """

    error_max: float
    error_rms: float
    profile: np.ndarray
    boundary_error: float
    center_error: float
    t_eval: float


def error_profile(psi_num, psi_exact) -> np.ndarray:
    return np.abs(np.abs(np.asarray(psi_num)) - np.abs(np.asarray(psi_exact)))


def _windows(n: int, boundary_fraction: float, center_fraction: float):
    nb = max(1, int(round(boundary_fraction * n)))
    nc = max(1, int(round(center_fraction * n)))
    lo = (n - nc) // 2
    edge = np.r_[0:nb, n - nb : n]
    center = np.arange(lo, lo + nc)
    return edge, center


def error_report(numeric, oracle: SolutionSpec, grid, windows=(BOUNDARY_FRACTION, CENTER_FRACTION), component: int = 0):
    """Compare a :class:`~.engine.FieldState` with ``oracle`` at its time.

    Parameters
    ----------
    numeric : FieldState
    oracle : SolutionSpec
    grid : Grid
    windows : (float, float)
        Fractions of points in each edge window and in the central window.
    component : int
        Which component of a two-component oracle to compare against.
    """
    t = numeric.t_current
    exact = oracle.evaluate(grid.x, t)
    if isinstance(exact, tuple):
        exact = exact[component]
    prof = error_profile(numeric.psi, exact)
    edge, center = _windows(prof.size, *windows)
    return ErrorReport(
        error_max=float(prof.max()),
        error_rms=float(math.sqrt(np.mean(prof**2))),
        profile=prof,
        boundary_error=float(prof[edge].max()),
        center_error=float(prof[center].max()),
        t_eval=t,
    )


def convergence_rate(error_coarse: float, error_fine: float, n_coarse: int, n_fine: int) -> float:
    """Power-law exponent of error decay under grid refinement.

    Positive when the error falls as ``n`` grows.

    >>> round(convergence_rate(1e-2, 1e-2 / 16, 100, 200), 12)
    4.0
    """
    if not (error_coarse > 0 and error_fine > 0):
        raise ValueError("convergence rate is undefined for non-positive errors")
    if n_coarse <= 0 or n_fine <= 0 or n_coarse == n_fine:
        raise ValueError("need two distinct positive resolutions")
    return math.log(error_coarse / error_fine) / math.log(n_fine / n_coarse)


def predict_error_s(oracle: SolutionSpec, s: int, dt: float, grid, t: float = 0.0) -> float:
    """Estimated truncation error of one step of a degree-``s`` series.

    ``max_x dt**(s+1) |(s+1)-th Taylor coefficient of psi in t|``; the
    coefficient is computed exactly by jet arithmetic.
    """
    taylor = boundary_taylor_coefficients(oracle, grid.x, t, s + 1)
    if isinstance(taylor, tuple):
        return max(float(np.max(np.abs(c[s + 1]))) for c in taylor) * dt ** (s + 1)
    return float(np.max(np.abs(taylor[s + 1]))) * dt ** (s + 1)


def _magnitude_x_derivative(oracle: SolutionSpec, x, t: float, order: int, component: int) -> np.ndarray:
    # d^order |psi| / dx^order via a space jet of sqrt(psi conj(psi))
    psi = oracle.evaluate(Jet.variable(np.asarray(x, dtype=float), order), t)
    if isinstance(psi, tuple):
        psi = psi[component]
    with np.errstate(divide="ignore", invalid="ignore"):
        mag = jets.sqrt((psi * jets.conj(psi)).real)
        d = mag.derivatives()[order]
    return np.where(np.isfinite(d), d, np.nan)


def predict_error_p(
    oracle: SolutionSpec,
    p: int,
    dx: float,
    dt: float,
    grid,
    saturated: bool = False,
    t: float = 0.0,
    component: int = 0,
    dt_probe: float = 1e-3,
    stencil_constant: bool = False,
) -> float:
    """Estimated error contributed by the ``p``-point stencil.

    The saturated form is ``max_x dx**(p-1)/(p+1)! |d^{p+1}|psi|/dx^{p+1}|``;
    the unsaturated form applies ``dt d/dt`` to the same quantity, with the
    time derivative taken by a fourth-order central difference of step
    ``dt_probe``.  Points where ``|psi|`` vanishes (not differentiable
    there) are skipped.

    ``stencil_constant=True`` multiplies by ``2 (m!)**2`` with
    ``m = (p - 1) / 2``, which turns ``1/(p+1)!`` into the actual leading
    truncation coefficient of the stencil (1/12 for p=3, 1/90 for p=5).
    """
    order = p + 1
    scale = dx ** (p - 1) / math.factorial(order)
    if stencil_constant:
        m = (p - 1) // 2
        scale *= 2 * math.factorial(m) ** 2
    x = grid.x
    if saturated:
        d = _magnitude_x_derivative(oracle, x, t, order, component)
    else:
        h = dt_probe
        f = [_magnitude_x_derivative(oracle, x, t + m * h, order, component) for m in (-2, -1, 1, 2)]
        d = dt * (f[0] - 8.0 * f[1] + 8.0 * f[2] - f[3]) / (12.0 * h)
    d = np.abs(d)
    if np.all(np.isnan(d)):
        return float("nan")
    return float(scale * np.nanmax(d))


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit ``error = prefactor * p**exponent``.

    ``log10_intercept`` and ``ln_intercept`` give the same line in the two
    common log bases: ``log10(error) = log10_intercept + exponent log10(p)``.
    """

    prefactor: float
    exponent: float
    ln_intercept: float
    log10_intercept: float


def fit_power_law(p_values, errors) -> PowerLawFit:
    p_values = np.asarray(p_values, dtype=float)
    errors = np.asarray(errors, dtype=float)
    if p_values.size < 2 or np.any(errors <= 0) or np.any(p_values <= 0):
        raise ValueError("need at least two positive (p, error) pairs")
    slope, intercept = np.polyfit(np.log(p_values), np.log(errors), 1)
    return PowerLawFit(
        prefactor=float(math.exp(intercept)),
        exponent=float(slope),
        ln_intercept=float(intercept),
        log10_intercept=float(intercept / math.log(10.0)),
    )

"""Central-difference stencils for the second derivative.

A ``p``-point stencil uses ``(p - 1) / 2`` neighbours on each side of the
central point.  The weights ``C_j`` are obtained from the moment conditions

    sum_j C_j j**(2 i) = 0,    i = 2, ..., (p - 1) / 2

solved exactly over the rationals, with ``C_1`` as pivot and the result
rescaled to the smallest integer vector with a positive leading weight.
The derivative is then

    f''(x) ~ sum_j Cbar_j [f(x + j dx) + f(x - j dx) - 2 f(x)] / dx**2

with ``Cbar_j = C_j / sum_j C_j j**2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

__all__ = [
    "StencilTable",
    "stencil_weights",
    "apply_second_derivative",
    "second_derivative",
    "truncation_order_check",
]


@dataclass(frozen=True)
class StencilTable:
    """Normalised weights of the ``p``-point second-derivative stencil.

    Attributes
    ----------
    p : int
        Number of stencil points (odd, >= 3).
    raw_weights : tuple of Fraction
        Integer-valued weights ``C_j``, ``j = 1 .. half_width``.
    normalizer : Fraction
        ``sum_j C_j j**2``; the denominator of the tabulated formula.
    normalized_weights : tuple of Fraction
        ``Cbar_j = C_j / normalizer``.
    weights : numpy.ndarray
        ``Cbar_j`` rounded once to binary64.
    center_weight : float
        ``-2 sum_j Cbar_j``.
    """

    p: int
    raw_weights: tuple[Fraction, ...]
    normalizer: Fraction
    normalized_weights: tuple[Fraction, ...]
    weights: np.ndarray = field(repr=False, compare=False)
    center_weight: float = field(compare=False)

    @property
    def half_width(self) -> int:
        return (self.p - 1) // 2

    @property
    def integer_weights(self) -> list[int]:
        return [int(c) for c in self.raw_weights]

    @property
    def integer_center(self) -> int:
        """Central coefficient of the tabulated integer formula."""
        return int(-2 * sum(self.raw_weights))

    @property
    def denominator(self) -> int:
        return int(self.normalizer)

    def full_integer_stencil(self) -> list[int]:
        """Integer coefficients from ``f(x + h dx)`` down to ``f(x - h dx)``."""
        w = self.integer_weights
        return w[::-1] + [self.integer_center] + w

    def exact_apply(self, values) -> Fraction:
        """Apply to ``2 h + 1`` exact samples with unit spacing."""
        h = self.half_width
        if len(values) != 2 * h + 1:
            raise ValueError(f"expected {2 * h + 1} samples, got {len(values)}")
        f0 = Fraction(values[h])
        return sum(
            (
                c * (Fraction(values[h + j]) + Fraction(values[h - j]) - 2 * f0)
                for j, c in enumerate(self.normalized_weights, start=1)
            ),
            Fraction(0),
        )


def _solve_exact(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    # Gauss-Jordan elimination over the rationals.
    n = len(rhs)
    aug = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next(r for r in range(col, n) if aug[r][col] != 0)
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = 1 / aug[col][col]
        aug[col] = [v * inv for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col]
                aug[r] = [a - factor * b for a, b in zip(aug[r], aug[col])]
    return [aug[r][n] for r in range(n)]


@lru_cache(maxsize=None)
def stencil_weights(p: int) -> StencilTable:
    """Build the ``p``-point central second-derivative stencil.

    Parameters
    ----------
    p : int
        Odd number of points, at least 3.

    Returns
    -------
    StencilTable

    Examples
    --------
    >>> t = stencil_weights(5)
    >>> t.integer_weights, t.denominator
    ([16, -1], 12)
    """
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise TypeError(f"stencil size must be an integer, got {p!r}")
    p = int(p)
    if p < 3 or p % 2 == 0:
        raise ValueError(f"stencil size must be odd and >= 3, got {p}")

    m = (p - 1) // 2
    if m == 1:
        coeffs = [Fraction(1)]
    else:
        # C_1 = 1; unknowns C_2..C_m
        matrix = [[Fraction(j ** (2 * i)) for j in range(2, m + 1)] for i in range(2, m + 1)]
        rhs = [Fraction(-1)] * (m - 1)
        coeffs = [Fraction(1)] + _solve_exact(matrix, rhs)

    lcm = reduce(math.lcm, (c.denominator for c in coeffs), 1)
    ints = [int(c * lcm) for c in coeffs]
    g = reduce(math.gcd, (abs(c) for c in ints))
    sign = 1 if ints[0] > 0 else -1
    raw = tuple(Fraction(sign * c // g) for c in ints)

    normalizer = sum((c * j * j for j, c in enumerate(raw, start=1)), Fraction(0))
    normalized = tuple(c / normalizer for c in raw)
    # int / int true division is correctly rounded: one rounding per weight
    weights = np.array([c.numerator / c.denominator for c in normalized], dtype=np.float64)
    weights.setflags(write=False)
    center = -2.0 * float(math.fsum(weights))

    return StencilTable(
        p=p,
        raw_weights=raw,
        normalizer=normalizer,
        normalized_weights=normalized,
        weights=weights,
        center_weight=center,
    )


def apply_second_derivative(field, table: StencilTable, dx: float, i: int) -> float:
    """Second derivative of ``field`` at index ``i`` (0-based).

    The full stencil must fit: ``h <= i < len(field) - h`` with
    ``h = (p - 1) // 2``.
    """
    f = np.asarray(field)
    h = table.half_width
    if not h <= i < f.shape[0] - h:
        raise IndexError(f"index {i} is outside the interior [{h}, {f.shape[0] - h})")
    fi = f[i]
    acc = 0.0
    for j in range(1, h + 1):
        acc += table.weights[j - 1] * (f[i + j] + f[i - j] - 2.0 * fi)
    return acc / (dx * dx)


def second_derivative(field, table: StencilTable, dx: float) -> np.ndarray:
    """Vectorised stencil over every interior point.

    Returns an array of length ``len(field) - 2 h`` aligned with
    ``field[h:-h]``.
    """
    f = np.asarray(field)
    h = table.half_width
    n = f.shape[-1]
    if n <= 2 * h:
        raise ValueError(f"need more than {2 * h} points for a {table.p}-point stencil")
    center = f[..., h : n - h]
    out = np.zeros_like(center)
    for j in range(1, h + 1):
        out += table.weights[j - 1] * (f[..., h + j : n - h + j] + f[..., h - j : n - h - j] - 2.0 * center)
    return out / (dx * dx)


def truncation_order_check(p: int, x0: float = 0.3, dx_ladder=None) -> float:
    """Measured convergence order of the ``p``-point stencil.

    Applies the stencil to ``exp(-x**2)`` at ``x0`` over a ladder of
    spacings, drops points swamped by round-off and returns the log-log
    slope over the finest remaining spacings.  Should be close to ``p - 1``.
    """
    table = stencil_weights(p)
    h = table.half_width
    if dx_ladder is None:
        dx_ladder = 0.5 * 2.0 ** (-0.5 * np.arange(14))
    exact = (4.0 * x0 * x0 - 2.0) * math.exp(-x0 * x0)
    errs = []
    for dx in dx_ladder:
        x = x0 + dx * np.arange(-h, h + 1)
        approx = apply_second_derivative(np.exp(-x * x), table, dx, h)
        errs.append(abs(approx - exact))
    dx_ladder = np.asarray(dx_ladder, dtype=float)
    errs = np.asarray(errs)

    # round-off of the stencil sum grows like eps * sum|w| / dx**2
    noise = 4.0 * np.finfo(float).eps * (4.0 * np.abs(table.weights).sum()) / dx_ladder**2
    keep = errs > 100.0 * noise
    if keep.sum() < 2:
        raise ValueError(f"too few points above the round-off floor for p={p}")
    xs = np.log(dx_ladder[keep])[-4:]
    ys = np.log(errs[keep])[-4:]
    slope, _ = np.polyfit(xs, ys, 1)
    return float(slope)

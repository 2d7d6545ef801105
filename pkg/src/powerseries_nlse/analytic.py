"""Closed-form solutions of the scalar and two-component NLSE.

The scalar equation is ``i psi_t + g1 psi_xx + g2 |psi|^2 psi = 0``; the
coupled one is

    i psi1_t + g10 psi1_xx + (g11 |psi1|^2 + g12 |psi2|^2) psi1 = 0
    i psi2_t + g20 psi2_xx + (g21 |psi1|^2 + g22 |psi2|^2) psi2 = 0

Every family is written with the element-wise helpers of :mod:`.jets`, so
``x`` or ``t`` may be a :class:`~.jets.Jet`.  Passing a time jet yields the
Taylor coefficients used for boundary conditions; passing a space jet yields
the high spatial derivatives used by the error predictors.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from . import jets
from .jets import Jet

logger = logging.getLogger(__name__)

__all__ = [
    "SolutionSpec",
    "CW",
    "Bright",
    "Dark",
    "Peregrine",
    "TwoBright",
    "DarkBright",
    "FAMILIES",
    "evaluate",
    "boundary_taylor_coefficients",
    "background_cw",
    "make_spec",
]


class SpecError(ValueError):
    """Invalid parameters for an analytic solution family."""


@dataclass(frozen=True, kw_only=True)
class SolutionSpec:
    family: ClassVar[str] = ""
    components: ClassVar[int] = 1

    def evaluate(self, x, t):
        raise NotImplementedError

    def __call__(self, x, t):
        return self.evaluate(x, t)


@dataclass(frozen=True, kw_only=True)
class CW(SolutionSpec):
    """Uniform plane wave of amplitude ``A0``; ``k`` sets the wavenumber ``k / (2 g1)``."""

    family: ClassVar[str] = "CW"

    A0: float
    k: float = 0.0
    x0: float = 0.0
    t0: float = 0.0
    phi0: float = 0.0
    g1: float
    g2: float

    def __post_init__(self):
        if self.g1 == 0:
            raise SpecError("CW needs g1 != 0")

    @property
    def omega(self) -> float:
        return self.g2 * self.A0**2 - self.k**2 / (4.0 * self.g1)

    def evaluate(self, x, t):
        phase = self.omega * (t - self.t0) + self.k / (2.0 * self.g1) * (x - self.x0) + self.phi0
        return self.A0 * jets.exp(1j * phase)


@dataclass(frozen=True, kw_only=True)
class Bright(SolutionSpec):
    """Moving bright soliton; needs ``g1 g2 > 0``."""

    family: ClassVar[str] = "Bright"

    A0: float
    k: float = 0.0
    x0: float = 0.0
    t0: float = 0.0
    phi0: float = 0.0
    g1: float
    g2: float

    def __post_init__(self):
        if not self.g1 * self.g2 > 0:
            raise SpecError(f"bright soliton needs g1*g2 > 0, got g1={self.g1}, g2={self.g2}")

    def evaluate(self, x, t):
        g1, A0, k = self.g1, self.A0, self.k
        amp = A0 * math.sqrt(2.0 * g1 / self.g2)
        env = jets.sech(A0 * (x - (self.x0 + k * t)))
        phase = (
            k / (2.0 * g1) * (x - self.x0)
            + (4.0 * A0**2 * g1**2 - k**2) / (4.0 * g1) * (t - self.t0)
            + self.phi0
        )
        return amp * env * jets.exp(1j * phase)


@dataclass(frozen=True, kw_only=True)
class Dark(SolutionSpec):
    """Moving dark soliton on a finite background; needs ``g1 g2 < 0``."""

    family: ClassVar[str] = "Dark"

    A0: float
    k: float = 0.0
    x0: float = 0.0
    t0: float = 0.0
    phi0: float = 0.0
    g1: float
    g2: float

    def __post_init__(self):
        if not self.g1 * self.g2 < 0:
            raise SpecError(f"dark soliton needs g1*g2 < 0, got g1={self.g1}, g2={self.g2}")

    @property
    def background_amplitude(self) -> float:
        return self.A0 * math.sqrt(-2.0 * self.g1 / self.g2)

    def evaluate(self, x, t):
        g1, A0, k = self.g1, self.A0, self.k
        env = jets.tanh(A0 * (x - (self.x0 + k * t)))
        phase = (
            -k / (2.0 * g1) * (x - self.x0)
            + (8.0 * g1**2 * A0**2 + k**2) / (4.0 * g1) * (t - self.t0)
            + self.phi0
        )
        return self.background_amplitude * env * jets.exp(-1j * phase)


@dataclass(frozen=True, kw_only=True)
class Peregrine(SolutionSpec):
    """Rational breather peaking at three times the background ``1 / sqrt(g2)``.

    Needs ``g2 > 0``; ``g1 > 0`` is also required, otherwise the rational
    denominator vanishes on a curve in the ``(x, t)`` plane.
    """

    family: ClassVar[str] = "Peregrine"

    x0: float = 0.0
    t0: float = 0.0
    phi0: float = 0.0
    g1: float
    g2: float

    def __post_init__(self):
        if not self.g2 > 0:
            raise SpecError(f"Peregrine soliton needs g2 > 0, got {self.g2}")
        if not self.g1 > 0:
            raise SpecError(f"Peregrine soliton needs g1 > 0, got {self.g1}")

    def evaluate(self, x, t):
        tau = t - self.t0
        xi = x - self.x0
        ratio = (4.0 + 8j * tau) / (1.0 + 4.0 * tau * tau + (2.0 / self.g1) * xi * xi)
        return (ratio - 1.0) * jets.exp(1j * (tau + self.phi0)) / math.sqrt(self.g2)


@dataclass(frozen=True, kw_only=True)
class TwoBright(SolutionSpec):
    """Two-soliton solution built from eigenvalues ``alpha_j + i nu_j``."""

    family: ClassVar[str] = "TwoBright"

    alpha1: float
    alpha2: float
    nu1: float = 0.0
    nu2: float = 0.0
    x01: float = 0.0
    x02: float = 0.0
    phi01: float = 0.0
    phi02: float = 0.0
    t0: float = 0.0
    g1: float
    g2: float

    def __post_init__(self):
        if not (self.g1 > 0 and self.g2 > 0):
            raise SpecError("two-bright solution needs g1 > 0 and g2 > 0")
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise SpecError("two-bright solution needs alpha1 > 0 and alpha2 > 0")
        if abs(self.lambdas[0] - self.lambdas[1]) < 1e-9:
            raise SpecError("two-bright eigenvalues coincide; the formula degenerates")

    @property
    def lambdas(self) -> tuple[complex, complex]:
        return complex(self.alpha1, self.nu1), complex(self.alpha2, self.nu2)

    def evaluate(self, x, t):
        lam = self.lambdas
        x0 = (self.x01, self.x02)
        phi = (self.phi01, self.phi02)
        scale = math.sqrt(2.0 * self.g1)
        M = [[1.0 / (lam[j] + lam[k].conjugate()) for k in range(2)] for j in range(2)]
        gam = [
            jets.exp(lam[j] / scale * (x - x0[j]) + 1j * (lam[j] ** 2 * (t - self.t0) / 2.0 + phi[j]))
            for j in range(2)
        ]
        inv = [1.0 / g for g in gam]
        cj = [jets.conj(g) for g in gam]

        den = M[0][1] * M[1][0] * (cj[0] + inv[1]) * (inv[0] + cj[1]) - M[0][0] * M[1][1] * (
            inv[0] + cj[0]
        ) * (inv[1] + cj[1])
        psi1 = (M[0][1] * (inv[0] + cj[1]) - M[1][1] * (inv[1] + cj[1])) / den
        psi2 = (-M[0][0] * (inv[0] + cj[0]) + M[1][0] * (cj[0] + inv[1])) / den
        return (psi1 + psi2) / math.sqrt(self.g2)


@dataclass(frozen=True, kw_only=True)
class DarkBright(SolutionSpec):
    """Dark (component 1) and bright (component 2) soliton of the coupled system."""

    family: ClassVar[str] = "DarkBright"
    components: ClassVar[int] = 2

    A0: float
    k: float = 0.0
    x0: float = 0.0
    t0: float = 0.0
    g10: float
    g11: float
    g12: float
    g20: float
    g21: float
    g22: float

    def __post_init__(self):
        try:
            amp2 = self._dark_amp_sq()
            width2 = self._width_sq()
        except ZeroDivisionError:
            raise SpecError("dark-bright coefficients make a denominator vanish") from None
        if not (amp2 > 0 and width2 > 0):
            raise SpecError(
                f"dark-bright radicands must be positive, got {amp2:g} and {width2:g}"
            )

    @property
    def coefficients(self) -> tuple[float, float, float, float, float, float]:
        return (self.g10, self.g11, self.g12, self.g20, self.g21, self.g22)

    def _dark_amp_sq(self) -> float:
        g10, g11, g12, g20, g21, g22 = self.coefficients
        return (g12 * g20 - g10 * g22) / (g11 * g20 - g10 * g21)

    def _width_sq(self) -> float:
        g10, g11, g12, g20, g21, g22 = self.coefficients
        return (g12 * g21 - g11 * g22) / (2.0 * (g10 * g21 - g11 * g20))

    @property
    def omegas(self) -> tuple[float, float]:
        """Temporal frequencies of the two components."""
        A0, k = self.A0, self.k
        w1 = self.g11 * A0**2 * self._dark_amp_sq() - k**2 / (4.0 * self.g10)
        # component 2 satisfies  omega2 = g20 (A0 w)^2 + g21 (A0 b)^2 - k^2 / (4 g20)
        w2 = A0**2 * (self.g20 * self._width_sq() + self.g21 * self._dark_amp_sq()) - k**2 / (4.0 * self.g20)
        return w1, w2

    def evaluate(self, x, t):
        A0, k = self.A0, self.k
        xi = x - self.x0
        tau = t - self.t0
        arg = A0 * math.sqrt(self._width_sq()) * (xi - k * tau)
        w1, w2 = self.omegas
        psi1 = (
            A0
            * math.sqrt(self._dark_amp_sq())
            * jets.tanh(arg)
            * jets.exp(1j * (w1 * tau + k * xi / (2.0 * self.g10)))
        )
        psi2 = A0 * jets.sech(arg) * jets.exp(1j * (w2 * tau + k * xi / (2.0 * self.g20)))
        return psi1, psi2


FAMILIES: dict[str, type[SolutionSpec]] = {
    cls.family: cls for cls in (CW, Bright, Dark, Peregrine, TwoBright, DarkBright)
}


def make_spec(family: str, **params) -> SolutionSpec:
    """Build a spec by family name (case-insensitive)."""
    lookup = {name.lower(): cls for name, cls in FAMILIES.items()}
    try:
        cls = lookup[family.replace("_", "").replace("-", "").lower()]
    except KeyError:
        raise SpecError(f"unknown solution family {family!r}; known: {sorted(FAMILIES)}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise SpecError(f"{cls.family}: {exc}") from None


def evaluate(spec: SolutionSpec, x, t):
    """``psi(x, t)``; a pair of arrays for two-component families."""
    return spec.evaluate(x, t)


def boundary_taylor_coefficients(spec: SolutionSpec, x, t_base, s: int):
    """Taylor coefficients ``(1/l!) d^l psi / dt^l`` at ``t_base`` for ``l = 0..s``.

    ``x`` and ``t_base`` broadcast against each other, so a column of times
    against a row of points gives the coefficients for many steps at once.
    Returns a complex array of shape ``(s + 1,) + broadcast shape``, or a
    pair of them for two-component families.
    """
    if s < 1:
        raise ValueError("series order must be >= 1")
    x = np.asarray(x, dtype=float)
    t_base = np.asarray(t_base, dtype=float)
    shape = np.broadcast_shapes(x.shape, t_base.shape)
    out = spec.evaluate(x, Jet.variable(np.broadcast_to(t_base, shape), s))
    if isinstance(out, tuple):
        return tuple(_as_coeffs(o, s, shape) for o in out)
    return _as_coeffs(out, s, shape)


def _as_coeffs(jet, s, shape):
    if not isinstance(jet, Jet):
        # time-independent expression
        c = np.zeros((s + 1,) + shape, dtype=complex)
        c[0] = jet
        return c
    return np.broadcast_to(jet.coeffs, (s + 1,) + shape).astype(complex)


def background_cw(spec: SolutionSpec):
    """Plane waves matching the far-field background of ``spec``.

    Returns a tuple with one :class:`CW` (or ``None`` for a vanishing
    background) per component.  Signs and phases differ between the two
    edges for dark-type profiles; only the frequency is meant to be used.
    """
    if isinstance(spec, CW):
        return (spec,)
    if isinstance(spec, (Bright, TwoBright)):
        return (None,)
    if isinstance(spec, Dark):
        return (CW(A0=spec.background_amplitude, k=spec.k, x0=spec.x0, t0=spec.t0, phi0=-spec.phi0, g1=spec.g1, g2=spec.g2),)
    if isinstance(spec, Peregrine):
        return (CW(A0=1.0 / math.sqrt(spec.g2), x0=spec.x0, t0=spec.t0, phi0=spec.phi0 + math.pi, g1=spec.g1, g2=spec.g2),)
    if isinstance(spec, DarkBright):
        # CW of component 1 alone: omega = g11 A^2 - k^2 / (4 g10)
        amp = spec.A0 * math.sqrt(spec._dark_amp_sq())
        return (CW(A0=amp, k=spec.k, x0=spec.x0, t0=spec.t0, g1=spec.g10, g2=spec.g11), None)
    raise SpecError(f"no background plane wave known for {spec.family}")


def background_frequencies(spec: SolutionSpec) -> tuple[float, ...]:
    """Temporal frequency of each component's background (0 where it vanishes)."""
    return tuple(0.0 if cw is None else cw.omega for cw in background_cw(spec))

"""Split-step Fourier reference solver with a self-contained radix-2 FFT.

The scheme is Strang splitting of ``i psi_t + g1 psi_xx + g2 |psi|^2 psi - V psi = 0``:
half a step of the point-wise phase rotation
``psi <- psi exp(i dt/2 (g2 |psi|^2 - V))``, a full linear step
``psi_hat <- psi_hat exp(-i g1 kappa^2 dt)`` in Fourier space, and the
second nonlinear half step.  Boundaries are periodic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit

from .engine import DivergenceError, FieldState, PotentialSpec

__all__ = ["SpectralWorkspace", "workspace", "fft", "ifft", "split_step_evolve"]


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def _bit_reversal(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(n):
        rev[i] = int(format(i, f"0{bits}b")[::-1], 2) if bits else 0
    return rev


@dataclass(frozen=True)
class SpectralWorkspace:
    """Precomputed tables for transforms of length ``n``.

    ``wavenumbers`` follow the usual FFT ordering for a periodic domain of
    length ``period``: ``2 pi m / period`` for ``m = 0..n/2-1, -n/2..-1``.
    """

    n: int
    period: float = 2.0 * math.pi
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)
    twiddles: np.ndarray = field(init=False, repr=False, compare=False)
    bit_reversal: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or not _is_power_of_two(int(self.n)):
            raise ValueError(f"transform length must be a power of two, got {self.n!r}")
        n = int(self.n)
        m = np.arange(n)
        m = np.where(m < n // 2, m, m - n)
        object.__setattr__(self, "wavenumbers", 2.0 * math.pi * m / self.period)
        stages = []
        half = 1
        while half < n:
            stages.append(np.exp(-1j * math.pi * np.arange(half) / half))
            half *= 2
        tw = np.concatenate(stages) if stages else np.zeros(0, dtype=complex)
        object.__setattr__(self, "twiddles", tw)
        object.__setattr__(self, "bit_reversal", _bit_reversal(n))

    def forward(self, x) -> np.ndarray:
        a = self._checked(x)
        _fft_inplace(a, self.bit_reversal, self.twiddles, False)
        return a

    def inverse(self, X) -> np.ndarray:
        a = self._checked(X)
        _fft_inplace(a, self.bit_reversal, self.twiddles, True)
        return a

    def _checked(self, x) -> np.ndarray:
        a = np.array(x, dtype=np.complex128, copy=True)
        if a.ndim != 1 or a.shape[0] != self.n:
            raise ValueError(f"expected a 1-d array of length {self.n}, got shape {a.shape}")
        return a


@lru_cache(maxsize=16)
def workspace(n: int, period: float = 2.0 * math.pi) -> SpectralWorkspace:
    return SpectralWorkspace(n, period)


@njit(cache=True)
def _fft_forward(a, rev, tw):
    # iterative radix-2 decimation in time; tw holds the twiddles of every
    # stage back to back, stage of size 2*half starting at offset half - 1
    n = a.shape[0]
    for i in range(n):
        j = rev[i]
        if j > i:
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp
    half = 1
    while half < n:
        w = tw[half - 1 : 2 * half - 1]
        for start in range(0, n, 2 * half):
            lo = a[start : start + half]
            hi = a[start + half : start + 2 * half]
            for k in range(half):
                u = lo[k]
                v = hi[k] * w[k]
                lo[k] = u + v
                hi[k] = u - v
        half *= 2


@njit(cache=True)
def _fft_inplace(a, rev, tw, inverse):
    if inverse:
        # ifft(X) = conj(fft(conj(X))) / n
        n = a.shape[0]
        for i in range(n):
            a[i] = a[i].conjugate()
        _fft_forward(a, rev, tw)
        for i in range(n):
            a[i] = a[i].conjugate() / n
    else:
        _fft_forward(a, rev, tw)


def fft(x) -> np.ndarray:
    """Discrete Fourier transform ``X_m = sum_j x_j exp(-2 pi i j m / n)``."""
    x = np.asarray(x)
    return workspace(_length(x)).forward(x)


def ifft(X) -> np.ndarray:
    """Inverse of :func:`fft`, including the ``1/n`` factor."""
    X = np.asarray(X)
    return workspace(_length(X)).inverse(X)


def _length(x) -> int:
    if x.ndim != 1:
        raise ValueError("fft expects a 1-d array")
    n = x.shape[0]
    if not _is_power_of_two(n):
        raise ValueError(f"transform length must be a power of two, got {n}")
    return n


@njit(cache=True)
def _split_step_chunk(psi, n_steps, dt, g2, pot, linear_phase, rev, tw):
    # returns the number of steps completed before a non-finite value
    n = psi.shape[0]
    half = 0.5 * dt
    for step in range(n_steps):
        for i in range(n):
            z = psi[i]
            psi[i] = z * np.exp(1j * half * (g2 * (z.real * z.real + z.imag * z.imag) - pot[i]))
        _fft_inplace(psi, rev, tw, False)
        for i in range(n):
            psi[i] = psi[i] * linear_phase[i]
        _fft_inplace(psi, rev, tw, True)
        ok = True
        for i in range(n):
            z = psi[i]
            z = z * np.exp(1j * half * (g2 * (z.real * z.real + z.imag * z.imag) - pot[i]))
            psi[i] = z
            if not (np.isfinite(z.real) and np.isfinite(z.imag)):
                ok = False
        if not ok:
            return step
    return n_steps


def split_step_evolve(
    initial: FieldState,
    g1: float,
    g2: float,
    potential: PotentialSpec | None,
    dt: float,
    n_t: int,
    L: float,
    observers=(),
) -> FieldState:
    """Advance ``initial`` by ``n_t`` Strang split steps.

    The field lives on the same points as :class:`~.engine.Grid`
    (``x_i = -L/2 + i L/(n_x - 1)``) and is treated as periodic with period
    ``n_x dx``.  ``n_x`` must be a power of two.  Observers follow the
    engine convention ``obs(step_index, t, psi)`` with ``psi`` of shape
    ``(1, n_x)``.
    """
    psi = np.array(initial.psi, dtype=np.complex128)
    n = psi.shape[0]
    if not _is_power_of_two(n):
        raise ValueError(f"split-step needs a power-of-two grid, got n_x={n}")
    if not dt > 0 or n_t < 0:
        raise ValueError("need dt > 0 and n_t >= 0")
    dx = L / (n - 1)
    ws = workspace(n, n * dx)
    x = -L / 2.0 + np.arange(n) * dx
    pot = (potential or PotentialSpec()).evaluate(x)
    linear_phase = np.exp(-1j * g1 * ws.wavenumbers**2 * dt)
    observers = list(observers or ())
    t0 = initial.t

    stops = {n_t}
    for obs in observers:
        stops.update(range(obs.stride, n_t + 1, obs.stride))
    stops = sorted(s for s in stops if s > 0)

    for obs in observers:
        obs(0, t0, psi[None, :])
    done = 0
    for stop in stops:
        todo = stop - done
        completed = _split_step_chunk(psi, todo, dt, g2, pot, linear_phase, ws.bit_reversal, ws.twiddles)
        if completed < todo:
            bad = done + completed + 1
            raise DivergenceError(bad, t0 + (bad - 1) * dt)
        done = stop
        for obs in observers:
            if done % obs.stride == 0 or done == n_t:
                obs(done, t0 + done * dt, psi[None, :])
    return FieldState.from_complex(psi, t0 + n_t * dt)

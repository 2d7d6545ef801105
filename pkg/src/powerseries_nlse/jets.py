"""Truncated Taylor series arithmetic ("jets").

A :class:`Jet` holds the Taylor coefficients ``f_0, f_1, ..., f_N`` of a
function of one real variable ``tau`` around ``tau = 0``, element-wise over
an array of points.  Closed-form solutions written with the helpers in this
module (:func:`exp`, :func:`tanh`, :func:`sech`, :func:`sqrt`) work on plain
numbers and on jets alike, which is how time derivatives of analytic
solutions are obtained without hand derivation.
"""

from __future__ import annotations

import numpy as np

__all__ = ["Jet", "exp", "tanh", "sech", "sqrt", "conj"]


class Jet:
    """Taylor coefficients ``coeffs[k]`` of ``tau**k``, shape ``(order + 1, ...)``."""

    __array_ufunc__ = None

    def __init__(self, coeffs):
        self.coeffs = np.asarray(coeffs)

    @classmethod
    def variable(cls, value, order: int, shape=()):
        """The jet of ``value + tau``."""
        c = np.zeros((order + 1,) + tuple(np.shape(value) or shape), dtype=complex)
        c[0] = value
        if order >= 1:
            c[1] = 1.0
        return cls(c)

    @classmethod
    def constant(cls, value, order: int):
        value = np.asarray(value, dtype=complex)
        c = np.zeros((order + 1,) + value.shape, dtype=complex)
        c[0] = value
        return cls(c)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def derivatives(self) -> np.ndarray:
        """``d^k f / d tau^k`` at ``tau = 0``, i.e. ``k! * coeffs[k]``."""
        k = np.arange(self.order + 1)
        fact = np.cumprod(np.where(k == 0, 1.0, k))
        return self.coeffs * fact.reshape((-1,) + (1,) * (self.coeffs.ndim - 1))

    def _with_points(self, shape) -> np.ndarray:
        # coeffs broadcast over a point shape; the order axis stays leading
        c = self.coeffs
        c = c.reshape(c.shape[:1] + (1,) * (len(shape) - (c.ndim - 1)) + c.shape[1:])
        return np.broadcast_to(c, c.shape[:1] + np.broadcast_shapes(c.shape[1:], shape))

    def _lift(self, other) -> "Jet":
        if isinstance(other, Jet):
            return other
        return Jet.constant(other, self.order)

    def __repr__(self) -> str:
        return f"Jet(order={self.order}, shape={self.coeffs.shape[1:]})"

    def __neg__(self):
        return Jet(-self.coeffs)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.coeffs + other.coeffs)
        other = np.asarray(other)
        c = self._with_points(other.shape).astype(np.result_type(self.coeffs, other), copy=True)
        c[0] += other
        return Jet(c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            return Jet(self._with_points(other.shape) * other[None, ...])
        a, b = self.coeffs, other.coeffs
        out = np.zeros(a.shape[:1] + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=np.result_type(a, b))
        for n in range(self.order + 1):
            for k in range(n + 1):
                out[n] += a[k] * b[n - k]
        return Jet(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, Jet):
            other = np.asarray(other)
            return Jet(self._with_points(other.shape) / other[None, ...])
        a, b = self.coeffs, other.coeffs
        q = np.zeros(a.shape[:1] + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=np.result_type(a, b, float))
        for n in range(self.order + 1):
            acc = a[n] - sum((b[k] * q[n - k] for k in range(1, n + 1)), 0.0)
            q[n] = acc / b[0]
        return Jet(q)

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Jet.constant(np.ones(self.coeffs.shape[1:]), self.order)
        for _ in range(n):
            out = out * self
        return out

    def conjugate(self):
        # valid because the expansion variable is real
        return Jet(np.conj(self.coeffs))

    @property
    def real(self):
        return Jet(self.coeffs.real)

    @property
    def imag(self):
        return Jet(self.coeffs.imag)


def conj(z):
    return z.conjugate() if isinstance(z, Jet) else np.conj(z)


def exp(z):
    if not isinstance(z, Jet):
        return np.exp(z)
    a = z.coeffs
    e = np.zeros_like(a, dtype=np.result_type(a, float))
    e[0] = np.exp(a[0])
    for n in range(1, z.order + 1):
        e[n] = sum(k * a[k] * e[n - k] for k in range(1, n + 1)) / n
    return Jet(e)


def sqrt(z):
    if not isinstance(z, Jet):
        return np.sqrt(z)
    a = z.coeffs
    r = np.zeros_like(a, dtype=np.result_type(a, float))
    r[0] = np.sqrt(a[0])
    for n in range(1, z.order + 1):
        acc = a[n] - sum((r[k] * r[n - k] for k in range(1, n)), 0.0)
        r[n] = acc / (2.0 * r[0])
    return Jet(r)


def _tanh_coeffs(a):
    # T' = (1 - T^2) A'
    t = np.zeros_like(a, dtype=np.result_type(a, float))
    t[0] = np.tanh(a[0])
    one_minus_sq = np.zeros_like(t)
    one_minus_sq[0] = 1.0 - t[0] * t[0]
    order = a.shape[0] - 1
    for n in range(1, order + 1):
        t[n] = sum(k * a[k] * one_minus_sq[n - k] for k in range(1, n + 1)) / n
        one_minus_sq[n] = -sum(t[j] * t[n - j] for j in range(n + 1))
    return t


def tanh(z):
    if not isinstance(z, Jet):
        return np.tanh(z)
    return Jet(_tanh_coeffs(z.coeffs))


def sech(z):
    if not isinstance(z, Jet):
        with np.errstate(over="ignore"):
            return 1.0 / np.cosh(z)
    # S' = -S T A'
    a = z.coeffs
    t = _tanh_coeffs(a)
    s = np.zeros_like(t)
    with np.errstate(over="ignore"):
        s[0] = 1.0 / np.cosh(a[0])
    st = np.zeros_like(t)
    st[0] = s[0] * t[0]
    for n in range(1, z.order + 1):
        s[n] = -sum(k * a[k] * st[n - k] for k in range(1, n + 1)) / n
        st[n] = sum(s[j] * t[n - j] for j in range(n + 1))
    return Jet(s)

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerseries_nlse.analytic import (
    CW,
    Bright,
    Dark,
    DarkBright,
    Peregrine,
    SpecError,
    TwoBright,
    background_cw,
    background_frequencies,
    boundary_taylor_coefficients,
    make_spec,
)

COUPLED_G = dict(g10=0.5, g11=-1.0, g12=0.5, g20=0.5, g21=-0.5, g22=1.0)

SCALAR = [
    CW(A0=1.3, k=0.7, g1=-1.0, g2=-2.0),
    Bright(A0=1.0, k=4.0, x0=-10.0, g1=-1.0, g2=-2.0),
    Bright(A0=0.8, k=1.0, g1=0.5, g2=1.0, phi0=0.3, t0=0.2),
    Dark(A0=1.0, k=1.0, g1=0.5, g2=-1.0),
    Dark(A0=1.2, k=-0.4, g1=0.5, g2=-4.0, t0=0.3, phi0=1.0),
    Peregrine(g1=0.5, g2=1.0),
    Peregrine(g1=1.5, g2=2.0, x0=0.3, t0=0.1),
    TwoBright(alpha1=1.0, alpha2=2.0, g1=0.5, g2=1.0),
    TwoBright(alpha1=1.0, alpha2=1.5, nu1=0.3, nu2=-0.2, x01=1.0, g1=1.0, g2=2.0),
]


def d2x(f, x, t, h=1e-2):
    w = [-9, 128, -1008, 8064, -14350, 8064, -1008, 128, -9]
    return sum(wi * f(x + (j - 4) * h, t) for j, wi in enumerate(w)) / (5040 * h * h)


def d_t(f, x, t, h=1e-3):
    return (f(x, t - 2 * h) - 8 * f(x, t - h) + 8 * f(x, t + h) - f(x, t + 2 * h)) / (12 * h)


@pytest.mark.parametrize("spec", SCALAR, ids=lambda s: s.family)
def test_scalar_families_solve_the_equation(spec):
    rng = np.random.default_rng(0)
    x = rng.uniform(-3, 3, 25)
    t = rng.uniform(-1, 1, 25)
    f = spec.evaluate
    psi = f(x, t)
    residual = 1j * d_t(f, x, t) + spec.g1 * d2x(f, x, t) + spec.g2 * np.abs(psi) ** 2 * psi
    assert np.abs(residual).max() < 1e-8


@pytest.mark.parametrize(
    "spec",
    [DarkBright(A0=1.0, **COUPLED_G), DarkBright(A0=1.1, k=0.6, x0=0.2, t0=0.1, **{**COUPLED_G, "g20": 0.7})],
    ids=["standing", "moving"],
)
def test_dark_bright_solves_the_coupled_system(spec):
    rng = np.random.default_rng(1)
    x = rng.uniform(-3, 3, 25)
    t = rng.uniform(-1, 1, 25)
    f1 = lambda x, t: spec.evaluate(x, t)[0]
    f2 = lambda x, t: spec.evaluate(x, t)[1]
    p1, p2 = spec.evaluate(x, t)
    n1, n2 = np.abs(p1) ** 2, np.abs(p2) ** 2
    r1 = 1j * d_t(f1, x, t) + spec.g10 * d2x(f1, x, t) + (spec.g11 * n1 + spec.g12 * n2) * p1
    r2 = 1j * d_t(f2, x, t) + spec.g20 * d2x(f2, x, t) + (spec.g21 * n1 + spec.g22 * n2) * p2
    assert np.abs(r1).max() < 1e-8
    assert np.abs(r2).max() < 1e-8


@given(st.floats(0.2, 3.0), st.floats(-3.0, 3.0), st.floats(-1.0, 1.0))
@settings(max_examples=30)
def test_cw_has_constant_magnitude(A0, k, t):
    cw = CW(A0=A0, k=k, g1=0.5, g2=1.0)
    x = np.linspace(-5, 5, 11)
    np.testing.assert_allclose(np.abs(cw.evaluate(x, t)), A0, rtol=1e-14)


@given(st.floats(-5, 5), st.floats(-2, 2))
@settings(max_examples=30)
def test_bright_magnitude_is_translation_covariant(shift, t):
    a = Bright(A0=1.0, k=2.0, g1=0.5, g2=1.0)
    b = Bright(A0=1.0, k=2.0, x0=shift, g1=0.5, g2=1.0)
    x = np.linspace(-4, 4, 9)
    np.testing.assert_allclose(np.abs(b.evaluate(x + shift, t)), np.abs(a.evaluate(x, t)), atol=1e-14)


def test_peregrine_peak_is_three_times_background():
    p = Peregrine(g1=0.5, g2=2.0)
    assert abs(p.evaluate(0.0, 0.0)) == pytest.approx(3 / math.sqrt(2.0))
    assert abs(p.evaluate(1e4, 0.0)) == pytest.approx(1 / math.sqrt(2.0), rel=1e-6)


def test_dark_soliton_background_and_dip():
    d = Dark(A0=1.0, k=0.0, g1=0.5, g2=-1.0)
    assert abs(d.evaluate(0.0, 0.0)) == 0.0
    assert abs(d.evaluate(50.0, 0.0)) == pytest.approx(d.background_amplitude)


@pytest.mark.parametrize("spec", SCALAR[:6], ids=lambda s: s.family)
def test_boundary_first_coefficient_matches_finite_difference(spec):
    x = np.array([-2.0, -1.9, 1.9, 2.0])
    t0, h = 0.3, 1e-6
    c = boundary_taylor_coefficients(spec, x, t0, 3)
    fd = (spec.evaluate(x, t0 + h) - spec.evaluate(x, t0 - h)) / (2 * h)
    np.testing.assert_allclose(c[0], spec.evaluate(x, t0), atol=1e-15)
    np.testing.assert_allclose(c[1], fd, rtol=1e-6, atol=1e-8)


def test_cw_taylor_coefficients_are_phasor_powers():
    cw = CW(A0=0.7, k=0.3, g1=0.5, g2=1.0)
    x = np.array([0.0, 1.0])
    c = boundary_taylor_coefficients(cw, x, 0.2, 5)
    psi = cw.evaluate(x, 0.2)
    for l in range(6):
        np.testing.assert_allclose(c[l], psi * (1j * cw.omega) ** l / math.factorial(l), rtol=1e-13)


def test_taylor_coefficients_broadcast_over_times():
    spec = SCALAR[1]
    x = np.array([-20.0, 20.0])
    times = np.array([0.0, 0.1, 0.2])
    block = boundary_taylor_coefficients(spec, x[None, :], times[:, None], 4)
    assert block.shape == (5, 3, 2)
    for i, t in enumerate(times):
        np.testing.assert_allclose(block[:, i], boundary_taylor_coefficients(spec, x, t, 4), rtol=1e-15)


def test_coupled_coefficients_come_as_a_pair():
    db = DarkBright(A0=1.0, **COUPLED_G)
    out = boundary_taylor_coefficients(db, np.array([-1.0, 1.0]), 0.0, 2)
    assert isinstance(out, tuple) and len(out) == 2
    assert out[0].shape == (3, 2)


def test_background_plane_waves():
    assert background_cw(SCALAR[1]) == (None,)
    (cw,) = background_cw(SCALAR[3])
    assert cw.A0 == pytest.approx(SCALAR[3].background_amplitude)
    # far-field dark profile rotates at the plane-wave frequency
    x = np.array([60.0])
    c = boundary_taylor_coefficients(SCALAR[3], x, 0.0, 1)
    assert (c[1] / c[0])[0] == pytest.approx(1j * cw.omega, rel=1e-10)
    w1, w2 = background_frequencies(DarkBright(A0=1.0, **COUPLED_G))
    assert w2 == 0.0 and w1 == pytest.approx(DarkBright(A0=1.0, **COUPLED_G).omegas[0])


def test_make_spec_is_case_insensitive():
    assert isinstance(make_spec("bright", A0=1.0, g1=0.5, g2=1.0), Bright)
    assert isinstance(make_spec("dark_bright", A0=1.0, **COUPLED_G), DarkBright)


@pytest.mark.parametrize(
    "family,params",
    [
        ("Bright", dict(A0=1.0, g1=0.5, g2=-1.0)),
        ("Dark", dict(A0=1.0, g1=0.5, g2=1.0)),
        ("Peregrine", dict(g1=0.5, g2=-1.0)),
        ("Peregrine", dict(g1=-0.5, g2=1.0)),
        ("TwoBright", dict(alpha1=1.0, alpha2=1.0, g1=0.5, g2=1.0)),
        ("DarkBright", dict(A0=1.0, g10=0.5, g11=1.0, g12=0.5, g20=0.5, g21=-0.5, g22=1.0)),
        ("Bright", dict(A0=1.0, g1=0.5)),
        ("Nope", dict()),
    ],
)
def test_invalid_parameters_raise(family, params):
    with pytest.raises(SpecError):
        make_spec(family, **params)

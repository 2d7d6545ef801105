import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from powerseries_nlse.analytic import CW, Bright, Dark, DarkBright
from powerseries_nlse.engine import (
    ConfigError,
    DivergenceError,
    ErrorObserver,
    FieldState,
    Grid,
    NormObserver,
    PotentialSpec,
    SnapshotObserver,
    SolverConfig,
    derive_series,
    evolve,
    evolve_coupled,
    initial_state,
    step,
)
from powerseries_nlse.stencil import second_derivative, stencil_weights

import recursion_transcription as rt

COUPLED_G = dict(g10=0.5, g11=-1.0, g12=0.5, g20=0.5, g21=-0.5, g22=1.0)


def random_field(rng, n, h):
    psi = rng.normal(size=n) + 1j * rng.normal(size=n)
    psi[:h] = 0.0
    psi[-h:] = 0.0
    return FieldState.from_complex(psi)


def make_d2(grid, p):
    table = stencil_weights(p)
    h = table.half_width

    def D2(f):
        out = np.zeros_like(f)
        out[h:-h] = second_derivative(f, table, grid.dx)
        return out

    return D2, h


def as_dict(coeffs, K):
    names = "abcd"[: 2 * K]
    arrays = [coeffs.re[0], coeffs.im[0]] + ([coeffs.re[1], coeffs.im[1]] if K == 2 else [])
    return {nm: [arr[l] for l in range(arr.shape[0])] for nm, arr in zip(names, arrays)}


def rel_diff(x, y):
    return np.abs(x - y).max() / max(np.abs(y).max(), 1e-300)


def chain(order_fn, k0, h, names):
    # builds orders 1..4 from order 0 using the transcription alone
    k = {nm: [k0[nm][0]] for nm in names}
    for l in range(1, 5):
        new = order_fn(l, k)
        for nm, arr in zip(names, new):
            arr = np.array(arr, dtype=float)
            arr[:h] = 0.0
            arr[-h:] = 0.0
            k[nm].append(arr)
    return k


SCALAR_CASES = [
    dict(g1=-1.0, g2=-2.0, potential=False, p=5),
    dict(g1=0.5, g2=1.0, potential=False, p=9),
    dict(g1=0.5, g2=-1.0, potential=True, p=7),
]


def scalar_recursion_worst(case):
    """Largest relative gap between the kernel and the scalar transcription."""
    rng = np.random.default_rng(11)
    grid = Grid(16.0, 64)
    D2, h = make_d2(grid, case["p"])
    worst = 0.0
    for _ in range(50):
        V = rng.normal(size=64) if case["potential"] else np.zeros(64)
        pot = PotentialSpec("tabulated", values=tuple(V)) if case["potential"] else PotentialSpec()
        cfg = SolverConfig(grid=grid, s=4, p=case["p"], dt=1e-3, n_t=1, g1=case["g1"], g2=case["g2"],
                           boundary_mode="zero", potential=pot)
        gen = as_dict(derive_series(random_field(rng, 64, h), cfg), 1)
        fn = lambda l, k: rt.scalar_order(l, k, D2, case["g1"], case["g2"], V)
        # one level at a time, lower orders from the generic kernel
        for l in range(1, 5):
            a, b = fn(l, gen)
            worst = max(worst, rel_diff(a[h:-h], gen["a"][l][h:-h]), rel_diff(b[h:-h], gen["b"][l][h:-h]))
        # and the transcription feeding itself
        own = chain(fn, gen, h, "ab")
        for nm in "ab":
            worst = max(worst, rel_diff(own[nm][4], gen[nm][4]))
    return worst


def coupled_recursion_worst(p):
    rng = np.random.default_rng(12)
    grid = Grid(16.0, 64)
    D2, h = make_d2(grid, p)
    cfg = SolverConfig(grid=grid, s=4, p=p, dt=1e-3, n_t=1, boundary_mode="zero", **COUPLED_G)
    worst = 0.0
    for _ in range(50):
        pair = (random_field(rng, 64, h), random_field(rng, 64, h))
        gen = as_dict(derive_series(pair, cfg), 2)
        fn = lambda l, k: rt.coupled_order(l, k, D2, COUPLED_G)
        for l in range(1, 5):
            for nm, arr in zip("abcd", fn(l, gen)):
                worst = max(worst, rel_diff(arr[h:-h], gen[nm][l][h:-h]))
        own = chain(fn, gen, h, "abcd")
        for nm in "abcd":
            worst = max(worst, rel_diff(own[nm][4], gen[nm][4]))
    return worst


@pytest.mark.parametrize("case", SCALAR_CASES)
def test_generic_recursion_matches_scalar_transcription(case):
    assert scalar_recursion_worst(case) <= 1e-13


@pytest.mark.parametrize("p", [5, 9])
def test_generic_recursion_matches_coupled_transcription(p):
    assert coupled_recursion_worst(p) <= 1e-13


def test_printed_scalar_discrepancy_is_exactly_the_flagged_term():
    rng = np.random.default_rng(13)
    grid = Grid(16.0, 64)
    D2, h = make_d2(grid, 5)
    g = dict(g1=-1.0, g2=-2.0)
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-3, n_t=1, boundary_mode="zero", **g)
    gen = as_dict(derive_series(random_field(rng, 64, h), cfg), 1)
    for l in range(1, 5):
        printed = rt.scalar_order(l, gen, D2, g["g1"], g["g2"], verbatim=True)
        predicted = rt.typo_residuals(l, gen, g)
        for nm, arr, extra in zip("ab", printed, predicted):
            scale = np.abs(gen[nm][l]).max()
            np.testing.assert_allclose(arr[h:-h] - gen[nm][l][h:-h], extra[h:-h], atol=1e-13 * scale)
    assert np.abs(rt.typo_residuals(4, gen, g)[0]).max() > 1e-2


def test_printed_coupled_discrepancies_are_exactly_the_flagged_terms():
    rng = np.random.default_rng(14)
    grid = Grid(16.0, 64)
    D2, h = make_d2(grid, 5)
    # the c4 slip multiplies by 1 instead of g22, so g22 = 1 would hide it
    g = {**COUPLED_G, "g22": 1.5}
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-3, n_t=1, boundary_mode="zero", **g)
    gen = as_dict(derive_series((random_field(rng, 64, h), random_field(rng, 64, h)), cfg), 2)
    flagged = 0
    for l in range(1, 5):
        printed = rt.coupled_order(l, gen, D2, g, verbatim=True)
        predicted = rt.typo_residuals(l, gen, g)
        for nm, arr, extra in zip("abcd", printed, predicted):
            scale = np.abs(gen[nm][l]).max()
            np.testing.assert_allclose(arr[h:-h] - gen[nm][l][h:-h], extra[h:-h], atol=1e-13 * scale)
            flagged += np.abs(extra).max() > 1e-3
    assert flagged == 3  # b2, b3 and c4
    assert len(rt.COUPLED_TYPOS) == 4


def test_coupled_run_with_no_cross_terms_is_two_scalar_runs():
    grid = Grid(80.0, 400)
    b1 = Bright(A0=1.0, k=1.0, g1=0.5, g2=1.0)
    b2 = Bright(A0=0.7, k=-0.5, x0=3.0, g1=-1.0, g2=-2.0)
    g = dict(g10=0.5, g11=1.0, g12=0.0, g20=-1.0, g21=0.0, g22=-2.0)
    cfg = SolverConfig(grid=grid, s=4, p=9, dt=1e-3, n_t=50, boundary_mode="zero", **g)
    pair = evolve_coupled((initial_state(b1, grid), initial_state(b2, grid)), cfg)
    for spec, got in zip((b1, b2), pair):
        single = SolverConfig(grid=grid, s=4, p=9, dt=1e-3, n_t=50, boundary_mode="zero", g1=spec.g1, g2=spec.g2)
        ref = evolve(initial_state(spec, grid), single)
        np.testing.assert_array_equal(got.u, ref.u)
        np.testing.assert_array_equal(got.v, ref.v)


def test_zero_field_stays_zero():
    grid = Grid(10.0, 50)
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-2, n_t=20, g1=0.5, g2=1.0, boundary_mode="zero")
    out = evolve(FieldState(np.zeros(50), np.zeros(50)), cfg)
    assert not out.u.any() and not out.v.any()
    assert out.t == pytest.approx(0.2)


def test_cw_first_order_coefficient():
    grid = Grid(10.0, 60)
    A0, g2 = 1.3, 0.8
    cw = CW(A0=A0, k=0.0, g1=0.5, g2=g2)
    cfg = SolverConfig(grid=grid, s=4, p=7, dt=1e-3, n_t=1, g1=0.5, g2=g2, boundary_spec=cw)
    c = derive_series(initial_state(cw, grid), cfg)
    np.testing.assert_allclose(c.a[1], 0.0, atol=1e-15)
    np.testing.assert_allclose(c.b[1], g2 * A0**3, rtol=1e-14)
    # edge coefficients from the analytic boundary agree with the interior recursion
    for l in range(1, 5):
        np.testing.assert_allclose(c.coeffs[0, l, :3], c.coeffs[0, l, 3], atol=1e-12)


@given(st.sampled_from([3, 5, 9, 23]), st.floats(0.3, 2.0), st.floats(-2.0, 2.0))
@settings(max_examples=20, deadline=None)
def test_cw_keeps_its_magnitude_over_one_step(p, A0, k):
    grid = Grid(2 * math.pi * 10 / max(abs(k), 0.5), 301)
    cw = CW(A0=A0, k=k, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=p, dt=1e-3, n_t=1, g1=0.5, g2=1.0, boundary_spec=cw)
    out = step(derive_series(initial_state(cw, grid), cfg), cfg.dt)
    # order l at a point sees l * h neighbours each side; beyond s * h from the
    # edges the exact edge coefficients have no influence
    reach = (cfg.s + 1) * cfg.half_width
    assert np.abs(np.abs(out.psi[reach:-reach]) - A0).max() <= 1e-13


def test_single_step_error_scales_as_dt_to_s_plus_one():
    grid = Grid(40.0, 500)
    spec = Bright(A0=1.0, k=4.0, g1=-1.0, g2=-2.0)
    psi0 = initial_state(spec, grid)
    for s in (2, 3, 4):
        errs = []
        for dt in (4e-3, 2e-3):
            cfg = SolverConfig(grid=grid, s=s, p=23, dt=dt, n_t=1, g1=-1.0, g2=-2.0, boundary_spec=spec)
            out = step(derive_series(psi0, cfg), dt)
            errs.append(np.abs(out.psi - spec.evaluate(grid.x, dt)).max())
        assert math.log2(errs[0] / errs[1]) == pytest.approx(s + 1, abs=0.3)


def test_bright_soliton_short_run_tracks_oracle():
    grid = Grid(40.0, 500)
    spec = Bright(A0=1.0, k=4.0, x0=-10.0, g1=-1.0, g2=-2.0)
    cfg = SolverConfig(grid=grid, s=4, p=23, dt=1e-3, n_t=200, g1=-1.0, g2=-2.0, boundary_spec=spec)
    obs = ErrorObserver(spec, grid, stride=50)
    out = evolve(initial_state(spec, grid), cfg, observers=[obs])
    assert np.abs(out.psi - spec.evaluate(grid.x, out.t)).max() < 1e-10
    assert [round(r[0], 9) for r in obs.rows] == [0.0, 0.05, 0.1, 0.15, 0.2]


def test_runs_are_deterministic():
    grid = Grid(40.0, 300)
    spec = Bright(A0=1.0, k=1.0, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=9, dt=1e-3, n_t=100, g1=0.5, g2=1.0, boundary_spec=spec)
    a = evolve(initial_state(spec, grid), cfg)
    b = evolve(initial_state(spec, grid), cfg)
    assert a.u.tobytes() == b.u.tobytes() and a.v.tobytes() == b.v.tobytes()


def test_zero_steps_return_the_input():
    grid = Grid(40.0, 100)
    spec = Bright(A0=1.0, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-3, n_t=0, g1=0.5, g2=1.0, boundary_spec=spec)
    start = initial_state(spec, grid, t=0.4)
    out = evolve(start, cfg)
    np.testing.assert_array_equal(out.psi, start.psi)
    assert out.t == 0.4 and out.u is not start.u


def test_explicit_euler_blows_up_with_step_index():
    grid = Grid(40.0, 500)
    spec = Bright(A0=1.0, k=4.0, g1=-1.0, g2=-2.0)
    cfg = SolverConfig(grid=grid, s=1, p=23, dt=1e-3, n_t=5000, g1=-1.0, g2=-2.0, boundary_spec=spec)
    with pytest.raises(DivergenceError) as info:
        evolve(initial_state(spec, grid), cfg)
    assert 1 <= info.value.step_index <= 5000
    assert info.value.last_good_time == pytest.approx((info.value.step_index - 1) * 1e-3)


def test_zero_mode_refuses_nonzero_edges():
    grid = Grid(10.0, 100)
    spec = Bright(A0=1.0, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-3, n_t=1, g1=0.5, g2=1.0, boundary_mode="zero")
    with pytest.raises(ConfigError, match="edge"):
        evolve(initial_state(spec, grid), cfg)


def test_norm_is_conserved_with_zero_boundaries():
    grid = Grid(40.0, 400)
    spec = Bright(A0=1.0, k=1.0, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=9, dt=1e-3, n_t=1000, g1=0.5, g2=1.0, boundary_mode="zero")
    obs = NormObserver(grid, stride=250)
    evolve(initial_state(spec, grid), cfg, observers=[obs])
    norms = np.array([r[1] for r in obs.rows])
    assert len(norms) == 5
    assert np.abs(norms / norms[0] - 1).max() < 1e-10


def test_exact_edges_are_negligible_far_from_the_soliton():
    # at L = 40 the sech tail alone is ~4e-9 at the edge, so widen to 60
    grid = Grid(60.0, 600)
    spec = Bright(A0=1.0, k=4.0, g1=-1.0, g2=-2.0)
    cfg = SolverConfig(grid=grid, s=4, p=23, dt=1e-4, n_t=1, g1=-1.0, g2=-2.0, boundary_spec=spec)
    c = derive_series(initial_state(spec, grid), cfg)
    assert np.abs(c.coeffs[0][:, c.boundary_index()]).max() <= 1e-10


@pytest.mark.parametrize("update", ["direct", "analytic"])
def test_cw_edges_match_exact_edges_for_dark_soliton(update):
    grid = Grid(50.0, 300)
    spec = Dark(A0=1.0, k=1.0, g1=0.5, g2=-1.0)
    errs = {}
    for mode in ("exact", "cw"):
        cfg = SolverConfig(grid=grid, s=4, p=9, dt=1e-3, n_t=500, g1=0.5, g2=-1.0,
                           boundary_mode=mode, boundary_spec=spec, boundary_update=update)
        out = evolve(initial_state(spec, grid), cfg)
        errs[mode] = np.abs(np.abs(out.psi) - np.abs(spec.evaluate(grid.x, out.t))).max()
    assert errs["cw"] < 1e-4
    assert errs["cw"] == pytest.approx(errs["exact"], rel=0.5)


def test_dark_bright_pair_short_run():
    grid = Grid(60.0, 400)
    spec = DarkBright(A0=1.0, **COUPLED_G)
    cfg = SolverConfig(grid=grid, s=4, p=13, dt=1e-3, n_t=200, boundary_spec=spec, **COUPLED_G)
    out = evolve_coupled(initial_state(spec, grid), cfg)
    exact = spec.evaluate(grid.x, out[0].t)
    for got, ex in zip(out, exact):
        assert np.abs(got.psi - ex).max() < 1e-7


def test_snapshot_observer_picks_nearest_steps():
    grid = Grid(40.0, 200)
    spec = Bright(A0=1.0, g1=0.5, g2=1.0)
    cfg = SolverConfig(grid=grid, s=4, p=5, dt=1e-2, n_t=30, g1=0.5, g2=1.0, boundary_spec=spec)
    snap = SnapshotObserver([0.1, 0.2], cfg.dt)
    evolve(initial_state(spec, grid), cfg, observers=[snap])
    assert sorted(round(t, 9) for t in snap.snapshots) == [0.1, 0.2]


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(s=0),
        dict(p=4),
        dict(p=1),
        dict(dt=0.0),
        dict(n_t=-1),
        dict(boundary_mode="periodic"),
        dict(boundary_update="later"),
        dict(g2=None),
        dict(g11=1.0),
        dict(boundary_spec=None),
        dict(grid=Grid(10.0, 9), p=9),
    ],
)
def test_config_validation(kwargs):
    spec = Bright(A0=1.0, g1=0.5, g2=1.0)
    base = dict(grid=Grid(10.0, 50), s=4, p=5, dt=1e-3, n_t=1, g1=0.5, g2=1.0, boundary_spec=spec)
    base.update(kwargs)
    with pytest.raises(ConfigError):
        SolverConfig(**base)


def test_potential_spec_checks():
    with pytest.raises(ConfigError):
        PotentialSpec("harmonic")
    with pytest.raises(ConfigError):
        PotentialSpec("tabulated")
    x = np.linspace(-1, 1, 5)
    v = PotentialSpec("sech_well", V0=2.0, alpha=1.0).evaluate(x)
    np.testing.assert_allclose(v, -4.0 / np.cosh(x) ** 2)
    with pytest.raises(ConfigError):
        PotentialSpec("tabulated", values=(1.0, 2.0)).evaluate(x)

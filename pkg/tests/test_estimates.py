"""Energy identity, Gronwall weight and envelope, inequality ratios, u-equation, panel."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primeq import (Params, State, energy_identity_residual, gronwall_envelope,
                    inequality_ratio, make_grid, norm_panel, phi, tendency, u_equation_residual)
from primeq.estimates import UnsupportedConfigurationError, Variant, fit_gronwall_constant

from conftest import band_limited, np_antiderivative, np_deriv, seeded_state

PI = np.pi


@pytest.fixture(scope="module")
def g():
    return make_grid(16, 16, 16, 1.0)


class TestEnergyIdentity:
    def test_zero(self, g, params):
        assert energy_identity_residual(State.zeros(g), params) == 0.0

    def test_vertical_temperature(self, g, params):
        s = State.zeros(g).replace(T=g.evaluate(lambda x, y, z: np.sin(PI * z)))
        assert energy_identity_residual(s, params) < 1e-15

    @pytest.mark.parametrize("seed", range(5))
    def test_seeded_states(self, g, seed):
        p = Params(h=1.0, f0=0.9, nu_h=0.7, nu_z=0.3, kappa_h=0.5, eps=0.01 * seed)
        assert energy_identity_residual(seeded_state(g, seed, amplitude=2.0), p) < 1e-8

    def test_budget_against_numpy_oracle(self, g):
        # independent evaluation of each budget term with numpy derivatives
        p = Params(h=1.0, f0=0.4, nu_h=0.7, nu_z=0.3, kappa_h=0.5, eps=0.02)
        s = seeded_state(g, 9, amplitude=1.5)
        t = tendency(s, p)
        v1, v2, T = s.arrays()
        D = lambda a, ax: np_deriv(a, ax, g)  # noqa: E731
        ip = g.inner
        rate = ip(t.dv1.values, v1) + ip(t.dv2.values, v2) + ip(t.dT.values, T)
        diss = (p.nu_h * sum(ip(D(v, a), D(v, a)) for v in (v1, v2) for a in (0, 1))
                + p.nu_z * sum(ip(D(v, 2), D(v, 2)) for v in (v1, v2))
                + p.kappa_h * sum(ip(D(T, a), D(T, a)) for a in (0, 1))
                + p.eps * ip(D(T, 2), D(T, 2)))
        # buoyancy and stratification exchange: <grad_H int T, v> - (1/h) <w, T>
        I = np_antiderivative(T, g)
        w = -np_antiderivative(D(v1, 0) + D(v2, 1), g)
        exchange = ip(D(I, 0), v1) + ip(D(I, 1), v2) - ip(w, T) / g.h
        assert abs(rate + diss - exchange) < 1e-10 * (abs(rate) + diss)


class TestPhi:
    def test_zero_state(self, g):
        assert phi(State.zeros(g)) == 1.0

    def test_uniform_velocity(self, g):
        assert phi(State.from_arrays(g, 1.0, 0.0, 0.0)) == pytest.approx(5.0, rel=1e-14)

    def test_vertical_temperature(self, g):
        s = State.zeros(g).replace(T=g.evaluate(lambda x, y, z: np.sin(PI * z)))
        assert phi(s) == pytest.approx(2 + PI**4, rel=1e-12)
        assert phi(s) == pytest.approx(99.409, abs=1e-3)

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1), amp=st.floats(0, 10))
    def test_at_least_one(self, seed, amp):
        g = make_grid(8, 8, 8, 1.0)
        rng = np.random.default_rng(seed)
        s = State.from_arrays(g, *(amp * rng.standard_normal((3,) + g.shape)))
        assert phi(s) >= 1.0


class TestGronwallEnvelope:
    def test_closed_form(self):
        t = np.linspace(0, 1, 11)
        env = gronwall_envelope(t, np.ones_like(t), 1.0, 1.0)
        assert env[-1] == pytest.approx(math.e, rel=1e-14)

    def test_zero_d0(self):
        t = np.linspace(0, 1, 5)
        assert not gronwall_envelope(t, np.full(5, 3.0), 2.0, 0.0).any()

    def test_piecewise_constant_weight(self):
        t = np.array([0.0, 0.25, 0.5, 0.5, 0.75, 1.0])
        ph = np.array([1.0, 1.0, 1.0, 3.0, 3.0, 3.0])
        assert gronwall_envelope(t, ph, 1.0, 1.0)[-1] == pytest.approx(math.e**2, rel=1e-14)

    def test_validation(self):
        t = np.linspace(0, 1, 3)
        with pytest.raises(ValueError):
            gronwall_envelope(t, np.full(3, 0.5), 1.0, 1.0)
        with pytest.raises(ValueError):
            gronwall_envelope(t, np.ones(3), 0.0, 1.0)
        with pytest.raises(ValueError):
            gronwall_envelope(t[::-1], np.ones(3), 1.0, 1.0)
        with pytest.raises(ValueError):
            gronwall_envelope(t, np.ones(2), 1.0, 1.0)

    @settings(max_examples=30, deadline=None)
    @given(c1=st.floats(0.01, 4), dc=st.floats(0, 4), d0=st.floats(0, 10),
           seed=st.integers(0, 1000))
    def test_monotone(self, c1, dc, d0, seed):
        rng = np.random.default_rng(seed)
        t = np.cumsum(rng.uniform(0, 0.1, 20))
        ph = 1 + rng.uniform(0, 5, 20)
        a = gronwall_envelope(t, ph, c1, d0)
        b = gronwall_envelope(t, ph, c1 + dc, d0)
        c = gronwall_envelope(t, ph, c1, d0 + 1)
        assert np.all(b >= a) and np.all(c >= a) and np.all(np.diff(a) >= 0)

    def test_fit_is_smallest_dominating(self):
        t = np.linspace(0, 1, 21)
        ph = np.ones_like(t)
        d = 3.0 * np.exp(t)
        C = fit_gronwall_constant(t, ph, d, 1.0)
        assert np.all(gronwall_envelope(t, ph, C, 1.0) >= d)
        assert not np.all(gronwall_envelope(t, ph, C / 2, 1.0) >= d)
        assert C == 4.0


class TestInequalityRatio:
    def test_constant_fields(self, g):
        one = g.field(np.ones(g.shape))
        r = inequality_ratio(one, one, one, Variant.TRILINEAR_FIRST)
        assert r.lhs == pytest.approx(4.0, rel=1e-14)
        assert r.rhs_unit == pytest.approx(2 * math.sqrt(2), rel=1e-14)
        assert abs(r.ratio - math.sqrt(2)) < 1e-10
        assert inequality_ratio(one, one, one, "trilinear_second").ratio == pytest.approx(
            math.sqrt(2), abs=1e-10)

    def test_zero_field(self, g):
        zero, one = g.field(np.zeros(g.shape)), g.field(np.ones(g.shape))
        r = inequality_ratio(zero, one, one)
        assert r.lhs == 0 and r.ratio == 0

    @pytest.mark.parametrize("variant", ["trilinear_first", "trilinear_second"])
    def test_converges_under_refinement(self, variant):
        def fields(n):
            gg = make_grid(n, n, n, 1.0)
            f = gg.evaluate(lambda x, y, z: 1 + np.sin(2 * PI * x) * np.cos(PI * z))
            gf = gg.evaluate(lambda x, y, z: np.exp(np.cos(2 * PI * y)) + z)
            w = gg.evaluate(lambda x, y, z: 2 + np.cos(2 * PI * (x + y)))
            return inequality_ratio(f, gf, w, variant).ratio
        r32, r64 = fields(32), fields(64)
        assert abs(r32 - r64) < 0.01 * r64

    def test_interpolation_variant(self, g):
        f = g.evaluate(lambda x, y, z: np.sin(2 * PI * x) * np.cos(2 * PI * y) * np.cos(PI * z))
        r = inequality_ratio(f, variant="l4_interpolation")
        assert 0 < r.ratio < np.inf
        rv = inequality_ratio((f, f), variant="l4_interpolation")
        assert 0 < rv.ratio < np.inf

    def test_random_band_limited_bounded(self, g):
        ratios = []
        for seed in range(10):
            f, gf, w = (g.field(band_limited(g, 3 * seed + i, kmax=3)) for i in range(3))
            ratios.append(inequality_ratio(f, gf, w).ratio)
        assert max(ratios) < 10 and min(ratios) >= 0


class TestUEquation:
    def test_zero(self, g, params):
        assert u_equation_residual(State.zeros(g), params) == 0.0

    def test_column_uniform_velocity(self, g):
        v1 = g.evaluate(lambda x, y, z: np.sin(2 * PI * y)).values
        T = g.evaluate(lambda x, y, z: np.sin(PI * z) * np.cos(2 * PI * x)).values
        s = State.from_arrays(g, v1, 0.0, T)
        assert u_equation_residual(s, Params(h=1.0, f0=0.5)) < 1e-14

    @pytest.mark.parametrize("seed", range(3))
    def test_seeded(self, g, seed):
        p = Params(h=1.0, f0=0.6, nu_h=0.4, nu_z=0.4, kappa_h=0.2)
        assert u_equation_residual(seeded_state(g, seed, amplitude=2.0), p) < 1e-9

    def test_anisotropic_needs_opt_in(self, g):
        p = Params(h=1.0, nu_h=1.0, nu_z=0.1)
        s = seeded_state(g, 1)
        with pytest.raises(UnsupportedConfigurationError):
            u_equation_residual(s, p)
        assert u_equation_residual(s, p, allow_anisotropic=True) < 1e-9


class TestNormPanel:
    def test_zero(self, g, params):
        rec = norm_panel(State.zeros(g), params)
        assert all(v == 0 for v in rec.values())

    def test_uniform_velocity(self, g, params):
        rec = norm_panel(State.from_arrays(g, 1.0, 0.0, 0.0), params)
        assert rec.L2_v == pytest.approx(math.sqrt(2))
        assert rec.L6_v == pytest.approx(2 ** (1 / 6))
        for name in ("L2_grad_v", "L2_gradH_vbar", "L2_laplH_vbar", "L2_grad_u",
                     "L2_lapl2_u", "L2_laplH_v"):
            assert getattr(rec, name) < 1e-14

    def test_viscous_mode(self, g, params):
        s = State.from_arrays(g, 0.0, g.evaluate(lambda x, y, z: np.sin(2 * PI * x)).values, 0.0)
        rec = norm_panel(s, params)
        assert rec.L2_v == pytest.approx(1.0, rel=1e-14)
        assert rec.L2_grad_v == pytest.approx(2 * PI, rel=1e-13)
        assert rec.L2_laplH_v == pytest.approx(4 * PI**2, rel=1e-13)
        # column-uniform: the barotropic panel sees the same field on M (area 1)
        assert rec.L2_gradH_vbar == pytest.approx(2 * PI / math.sqrt(2), rel=1e-13)

    def test_seeded_residuals_small(self, g, params):
        rec = norm_panel(seeded_state(g, 7), params)
        assert rec.energy_residual < 1e-8 and rec.symmetry_residual < 1e-14
        assert rec.u_eq_residual < 1e-9

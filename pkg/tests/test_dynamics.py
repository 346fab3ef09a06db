"""Rotation, surface pressure, projection and the full tendency."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from primeq import (ConstraintError, Params, SolvabilityError, State, barotropic_project,
                    coriolis, make_grid, norm, solve_surface_pressure, tendency)
from primeq.dynamics import advection, check_constraint
from primeq.fields import horizontal_divergence_mean, norm2d

from conftest import np_antiderivative, np_deriv, seeded_state

PI = np.pi


@pytest.fixture(scope="module")
def g():
    return make_grid(16, 16, 16, 1.0)


def const(g, c):
    return g.field(np.full(g.shape, float(c)))


def oracle_tendency(s, p):
    """Pointwise assembly of the tendency with numpy derivatives (no dealiasing)."""
    g = s.grid
    v1, v2, T = s.arrays()
    D = lambda a, ax, o=1: np_deriv(a, ax, g, o)  # noqa: E731
    div = D(v1, 0) + D(v2, 1)
    w = -np_antiderivative(div, g)
    I = np_antiderivative(T, g)
    adv = lambda f: v1 * D(f, 0) + v2 * D(f, 1) + w * D(f, 2)  # noqa: E731
    lap_h = lambda f: D(f, 0, 2) + D(f, 1, 2)  # noqa: E731
    r1 = -adv(v1) + p.f0 * v2 + D(I, 0) + p.nu_h * lap_h(v1) + p.nu_z * D(v1, 2, 2)
    r2 = -adv(v2) - p.f0 * v1 + D(I, 1) + p.nu_h * lap_h(v2) + p.nu_z * D(v2, 2, 2)
    rT = -adv(T) - w / g.h + p.kappa_h * lap_h(T) + p.eps * D(T, 2, 2)
    # surface pressure from the divergence of the column mean
    m1, m2 = r1.mean(axis=2), r2.mean(axis=2)
    kx = 2 * PI * np.fft.fftfreq(g.nx, 1.0 / g.nx)[:, None]
    ky = 2 * PI * np.fft.fftfreq(g.ny, 1.0 / g.ny)[None, :]
    k2 = kx**2 + ky**2
    dh = 1j * kx * np.fft.fft2(m1) + 1j * ky * np.fft.fft2(m2)
    ph = np.where(k2 > 0, -dh / np.where(k2 > 0, k2, 1), 0)
    r1 = r1 - np.real(np.fft.ifft2(1j * kx * ph))[:, :, None]
    r2 = r2 - np.real(np.fft.ifft2(1j * ky * ph))[:, :, None]
    return r1, r2, rT


class TestCoriolis:
    def test_eastward(self, g):
        a, b = coriolis(const(g, 1), const(g, 0), 2.0)
        assert np.all(a.values == 0) and np.all(b.values == 2)

    def test_northward(self, g):
        a, b = coriolis(const(g, 0), const(g, 1), 1.0)
        assert np.all(a.values == -1) and np.all(b.values == 0)

    def test_no_rotation(self, g):
        s = seeded_state(g, 0)
        a, b = coriolis(s.v1, s.v2, 0.0)
        assert not a.values.any() and not b.values.any()

    def test_does_no_work(self, g):
        s = seeded_state(g, 1)
        a, b = coriolis(s.v1, s.v2, 1.3)
        assert abs(g.inner(a.values, s.v1.values) + g.inner(b.values, s.v2.values)) < 1e-16


class TestSurfacePressure:
    def xy(self, g):
        return np.meshgrid(g.x, g.y, indexing="ij")

    def test_eigenfunction(self, g):
        X, _ = self.xy(g)
        ps = solve_surface_pressure(-4 * PI**2 * np.cos(2 * PI * X), g)
        assert np.allclose(ps, np.cos(2 * PI * X), atol=1e-14)

    def test_zero(self, g):
        assert not solve_surface_pressure(np.zeros((g.nx, g.ny)), g).any()

    def test_two_modes(self, g):
        X, Y = self.xy(g)
        rhs = np.cos(2 * PI * X) + np.cos(2 * PI * Y)
        assert np.allclose(solve_surface_pressure(rhs, g), -rhs / (4 * PI**2), atol=1e-15)

    def test_nonzero_mean(self, g):
        with pytest.raises(SolvabilityError):
            solve_surface_pressure(np.ones((g.nx, g.ny)), g)

    def test_zero_mean_gauge(self, g):
        X, Y = self.xy(g)
        ps = solve_surface_pressure(np.sin(2 * PI * X) * np.cos(4 * PI * Y), g)
        assert abs(ps.mean()) < 1e-16


class TestBarotropicProject:
    def test_divergence_free_unchanged(self, g):
        v1 = g.evaluate(lambda x, y, z: np.sin(2 * PI * y))
        a, b = barotropic_project(v1, const(g, 0))
        assert np.allclose(a.values, v1.values, atol=1e-15) and np.abs(b.values).max() < 1e-15

    def test_gradient_removed(self, g):
        # grad_H cos(2 pi x) = (-2 pi sin 2 pi x, 0)
        v1 = g.evaluate(lambda x, y, z: -2 * PI * np.sin(2 * PI * x))
        a, b = barotropic_project(v1, const(g, 0))
        assert np.abs(a.values).max() < 1e-13 and np.abs(b.values).max() < 1e-15

    def test_zero(self, g):
        a, b = barotropic_project(const(g, 0), const(g, 0))
        assert not a.values.any() and not b.values.any()

    def test_baroclinic_part_untouched(self, g):
        v1 = g.evaluate(lambda x, y, z: np.sin(2 * PI * x) * np.cos(PI * z))
        a, _ = barotropic_project(v1, const(g, 0))
        assert np.allclose(a.values, v1.values, atol=1e-15)

    @settings(max_examples=15, deadline=None)
    @given(seed=st.integers(0, 2**32 - 1))
    def test_output_satisfies_constraint(self, seed):
        g = make_grid(8, 8, 8, 1.0)
        rng = np.random.default_rng(seed)
        v1, v2 = (g.field(a) for a in rng.standard_normal((2,) + g.shape))
        a, b = barotropic_project(v1, v2)
        d = norm2d(horizontal_divergence_mean(a, b), g)
        assert d < 1e-12 * (1 + norm((v1, v2)))
        # projection is idempotent
        c, e = barotropic_project(a, b)
        assert np.allclose(c.values, a.values, atol=1e-13)


class TestTendency:
    def test_zero_state(self, g, params):
        t = tendency(State.zeros(g), params)
        assert all(not f.values.any() for f in (t.dv1, t.dv2, t.dT))

    def test_uniform_rotation(self, g):
        s = State.from_arrays(g, 1.0, 0.0, 0.0)
        t = tendency(s, Params(h=1.0, f0=1.0))
        assert np.allclose(t.dv1.values, 0, atol=1e-14)
        assert np.allclose(t.dv2.values, -1, atol=1e-14)
        assert np.abs(t.dT.values).max() < 1e-14
        assert np.abs(t.ps).max() < 1e-14

    def test_viscous_mode(self, g):
        s = State.from_arrays(g, 0.0, g.evaluate(lambda x, y, z: np.sin(2 * PI * x)).values, 0.0)
        t = tendency(s, Params(h=1.0, f0=0.0, nu_h=1.0, nu_z=1.0))
        assert np.abs(t.dv1.values).max() < 1e-12
        assert np.allclose(t.dv2.values, -4 * PI**2 * s.v2.values, atol=1e-11)
        assert np.abs(t.dT.values).max() < 1e-14

    def test_vertical_temperature_profile_is_steady(self, g, params):
        s = State.zeros(g).replace(T=g.evaluate(lambda x, y, z: np.sin(PI * z)))
        t = tendency(s, params)
        assert all(np.abs(f.values).max() < 1e-13 for f in (t.dv1, t.dv2, t.dT))

    def test_constraint_violation(self, g, params):
        s = State.zeros(g).replace(v1=g.evaluate(lambda x, y, z: np.sin(2 * PI * x)))
        with pytest.raises(ConstraintError):
            tendency(s, params)
        with pytest.raises(ConstraintError):
            check_constraint(s)

    def test_mean_tendency_divergence_free(self, g, params):
        s = seeded_state(g, 2, amplitude=2.0)
        t = tendency(s, params)
        d = norm2d(horizontal_divergence_mean(t.dv1, t.dv2), g)
        assert d < 1e-10 * norm((t.dv1, t.dv2))

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_pointwise_oracle(self, g, seed):
        p = Params(h=1.0, f0=0.8, nu_h=0.6, nu_z=0.2, kappa_h=0.4, eps=0.05)
        s = seeded_state(g, seed, amplitude=1.0, kmax=2)
        t = tendency(s, p)
        ref = oracle_tendency(s, p)
        for got, want in zip((t.dv1, t.dv2, t.dT), ref):
            assert np.abs(got.values - want).max() < 1e-10 * (1 + np.abs(want).max())

    def test_pressure_does_no_work(self, g, params):
        s = seeded_state(g, 3)
        t = tendency(s, params)
        ps = t.ps
        ps3 = np.repeat(ps[:, :, None], g.nz, 2)
        gx, gy = np_deriv(ps3, 0, g), np_deriv(ps3, 1, g)
        work = g.inner(gx, s.v1.values) + g.inner(gy, s.v2.values)
        assert abs(work) < 1e-10 * (1 + norm((s.v1, s.v2)) * np.abs(ps).max())


class TestAdvection:
    def test_skew_symmetry(self, g):
        s = seeded_state(g, 4, amplitude=3.0, kmax=5)
        for f in (s.v1, s.v2, s.T):
            a = advection(s.v1, s.v2, f)
            assert abs(g.inner(a.values, f.values)) < 1e-9 * norm(a) * norm(f)

    def test_uniform_flow_translates(self, g):
        s = State.from_arrays(g, 0.5, 0.0, 0.0)
        f = g.evaluate(lambda x, y, z: np.sin(2 * PI * x) * np.cos(PI * z))
        a = advection(s.v1, s.v2, f)
        want = 0.5 * 2 * PI * np.cos(2 * PI * g.mesh[0]) * np.cos(PI * g.mesh[2])
        assert np.allclose(a.values, want, atol=1e-12)

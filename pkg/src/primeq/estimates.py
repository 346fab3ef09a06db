"""Executable forms of the a priori estimates.

Energy-identity residual, the continuous-dependence weight phi(t) and its
Gronwall envelope, measured constants of the anisotropic trilinear
inequalities and of the L4 interpolation bound, the consistency residual of
the equation for u = dv/dz, and the monitored norm panel.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .dynamics import tendency
from .fields import DiagRecord, Params, State, norm, norm2d
from .grid import AXES, Field3, Grid
from .symmetry import symmetry_residual

__all__ = [
    "Variant",
    "InequalityReport",
    "GronwallReport",
    "UnsupportedConfigurationError",
    "energy_identity_residual",
    "phi",
    "gronwall_envelope",
    "fit_gronwall_constant",
    "inequality_ratio",
    "u_equation_residual",
    "norm_panel",
    "h2_panel",
]


class UnsupportedConfigurationError(ValueError):
    pass


class Variant(str, Enum):
    TRILINEAR_FIRST = "trilinear_first"
    TRILINEAR_SECOND = "trilinear_second"
    L4_INTERPOLATION = "l4_interpolation"


@dataclass(frozen=True)
class InequalityReport:
    lhs: float
    rhs_unit: float
    ratio: float
    variant: Variant


@dataclass(frozen=True)
class GronwallReport:
    """Measured squared difference of twin runs against C exp(C int phi) d0."""

    d0: float
    times: np.ndarray
    d: np.ndarray
    phi: np.ndarray
    envelope: np.ndarray
    C: float


# --- derivative helpers -----------------------------------------------------

def _deriv(grid: Grid, ah: np.ndarray, axes: str) -> np.ndarray:
    """Physical values of the derivative named by ``axes`` (e.g. "xz", "zz")."""
    out = ah
    for ax, count in Counter(axes).items():
        i = AXES[ax]
        if count == 2:
            out = grid.deriv_hat(out, i, 2)
        else:
            for _ in range(count):
                out = grid.deriv_hat(out, i, 1)
    return grid.ifft(out)


def _l2sq(grid: Grid, a: np.ndarray) -> float:
    return float(np.sum(a * a) * grid.cell_volume)


def _grad_sq(grid: Grid, coeffs: Sequence[np.ndarray], axes: Sequence[str]) -> float:
    return sum(_l2sq(grid, _deriv(grid, ah, ax)) for ah in coeffs for ax in axes)


def _as_coeffs(f) -> list[np.ndarray]:
    comps = [f] if isinstance(f, Field3) else list(f)
    return [c.coefficients for c in comps]


# --- energy identity --------------------------------------------------------

def energy_identity_residual(s: State, p: Params) -> float:
    """Relative mismatch of the semi-discrete L2 energy budget.

    Left side: <d(v,T)/dt, (v,T)> from the tendency plus the dissipation
    nu_h|grad_H v|^2 + nu_z|v_z|^2 + kappa_h|grad_H T|^2 + eps|T_z|^2.
    Right side: <grad_H int T, v> + (1/h) <int div_H v, T>.
    Returns |lhs - rhs| / (1 + |lhs| + |rhs|).
    """
    g = s.grid
    tend = tendency(s, p)
    v1, v2, T = s.arrays()
    v1h, v2h, Th = s.spectral()

    rate = g.inner(tend.dv1.data, v1) + g.inner(tend.dv2.data, v2) + g.inner(tend.dT.data, T)
    diss = (p.nu_h * _grad_sq(g, (v1h, v2h), "xy") + p.nu_z * _grad_sq(g, (v1h, v2h), "z")
            + p.kappa_h * _grad_sq(g, (Th,), "xy"))
    if p.eps:
        diss += p.eps * _grad_sq(g, (Th,), "z")
    lhs = rate + diss

    B = g.antiderivative(Th)
    Bh = g.fft(B)
    div = _deriv(g, v1h, "x") + _deriv(g, v2h, "y")
    col = g.antiderivative(g.fft(div))
    rhs = (g.inner(_deriv(g, Bh, "x"), v1) + g.inner(_deriv(g, Bh, "y"), v2)
           + g.inner(col, T) / g.h)
    return abs(lhs - rhs) / (1.0 + abs(lhs) + abs(rhs))


# --- continuous dependence --------------------------------------------------

def phi(s2: State) -> float:
    """Weight of the continuous-dependence estimate, evaluated on one state.

    1 + |v|^4 + |v_z|^4 + |v|^2 |grad_H v|^2 + |v_z|^2 |grad_H v_z|^2
      + the same four terms for T  (all L2 norms).
    """
    g = s2.grid
    total = 1.0
    for coeffs in ((s2.v1.coefficients, s2.v2.coefficients), (s2.T.coefficients,)):
        a2 = sum(_l2sq(g, g.ifft(ah)) for ah in coeffs)
        b2 = _grad_sq(g, coeffs, ("z",))
        c2 = _grad_sq(g, coeffs, ("x", "y"))
        d2 = _grad_sq(g, coeffs, ("xz", "yz"))
        total += a2**2 + b2**2 + a2 * c2 + b2 * d2
    return total


def gronwall_envelope(times, phi_values, C: float, d0: float) -> np.ndarray:
    """C exp(C int_0^t phi) d0 with trapezoidal time integration.

    Repeated sample times are allowed, which makes piecewise-constant phi
    integrate exactly.
    """
    times = np.asarray(times, dtype=float)
    phi_values = np.asarray(phi_values, dtype=float)
    if times.size == 0:
        raise ValueError("empty phi series")
    if times.shape != phi_values.shape:
        raise ValueError("times and phi must have the same length")
    if np.any(phi_values < 1.0):
        raise ValueError("phi must be >= 1")
    if not C > 0:
        raise ValueError("C must be > 0")
    if np.any(np.diff(times) < 0):
        raise ValueError("times must be nondecreasing")
    integral = cumulative_trapezoid(phi_values, times, initial=0.0)
    return C * np.exp(C * integral) * d0


def fit_gronwall_constant(times, phi_values, d, d0: float, kmin: int = -20,
                          kmax: int = 40) -> float:
    """Smallest C = 2**k making the envelope dominate the measured d(t)."""
    d = np.asarray(d, dtype=float)
    for k in range(kmin, kmax + 1):
        C = 2.0**k
        with np.errstate(over="ignore"):
            env = gronwall_envelope(times, phi_values, C, d0)
        if np.all(env >= d):
            return C
    raise ValueError("no C on the grid 2**k dominates the measured difference")


# --- inequalities -----------------------------------------------------------

def _norm_h(grid: Grid, coeffs) -> float:
    return float(np.sqrt(_grad_sq(grid, coeffs, ("x", "y"))))


def inequality_ratio(f, g=None, w=None, variant: Variant | str = Variant.TRILINEAR_FIRST
                     ) -> InequalityReport:
    """Measured ratio lhs / rhs (with unit constant) of an inequality.

    For the two trilinear variants ``f, g, w`` are scalar fields and
    lhs = |int_M (int f dz)(int g w dz) dxdy|.  For ``l4_interpolation`` only
    ``f`` is used (a scalar or a sequence of components) and
    lhs = ||grad_H f||_4^2, rhs = ||f||_6 ||grad_H grad f||_2^(1/2)
    ||grad_H lap_H f||_2^(1/2).
    """
    variant = Variant(variant)
    if variant is Variant.L4_INTERPOLATION:
        coeffs = _as_coeffs(f)
        grid = (f if isinstance(f, Field3) else f[0]).grid
        mag2 = sum(_deriv(grid, ah, ax) ** 2 for ah in coeffs for ax in "xy")
        lhs = float(np.sqrt(np.sum(mag2**2) * grid.cell_volume))
        hess = np.sqrt(_grad_sq(grid, coeffs, ("xx", "xy", "xz", "yx", "yy", "yz")))
        lap = [grid.deriv_hat(ah, 0, 2) + grid.deriv_hat(ah, 1, 2) for ah in coeffs]
        third = np.sqrt(_grad_sq(grid, lap, ("x", "y")))
        rhs = norm(f, "L6") * np.sqrt(hess) * np.sqrt(third)
    else:
        grid = f.grid
        fv, gv, wv = f.values, g.values, w.values
        colf = fv.sum(axis=2) * grid.dz
        colgw = (gv * wv).sum(axis=2) * grid.dz
        lhs = abs(float(np.sum(colf * colgw) * grid.dx * grid.dy))
        nf, ng, nw = norm(f), norm(g), norm(w)
        hf = _norm_h(grid, [f.coefficients])
        hg = _norm_h(grid, [g.coefficients])
        hw = _norm_h(grid, [w.coefficients])
        wfac = np.sqrt(nw) * (np.sqrt(nw) + np.sqrt(hw))
        if variant is Variant.TRILINEAR_FIRST:
            rhs = np.sqrt(nf) * (np.sqrt(nf) + np.sqrt(hf)) * ng * wfac
        else:
            rhs = nf * np.sqrt(ng) * (np.sqrt(ng) + np.sqrt(hg)) * wfac
    rhs = float(rhs)
    ratio = 0.0 if lhs == 0 else (lhs / rhs if rhs > 0 else float("inf"))
    return InequalityReport(lhs, rhs, ratio, variant)


# --- u = dv/dz equation -----------------------------------------------------

def u_equation_residual(s: State, p: Params, allow_anisotropic: bool = False) -> float:
    """Mismatch between d/dz of the momentum tendency and the u-equation.

    The right-hand side for du/dt is assembled directly from (v, u, T):
    viscous terms, -(v.grad_H)u + (int div_H v) u_z - (u.grad_H)v
    + (div_H v) u - f0 k x u + grad_H T, each product dealiased.

    The u-equation is stated for equal horizontal and vertical viscosity;
    ``allow_anisotropic`` uses nu_h lap_H u + nu_z u_zz instead of raising.
    """
    if p.nu_h != p.nu_z and not allow_anisotropic:
        raise UnsupportedConfigurationError(
            "u-equation residual needs nu_h == nu_z")
    g = s.grid
    mask = g.dealias_mask
    tend = tendency(s, p)
    vh = [s.v1.coefficients, s.v2.coefficients]
    Th = s.T.coefficients
    uh = [g.deriv_hat(a, 2, 1) for a in vh]
    v = [g.ifft(a) for a in vh]
    u = [g.ifft(a) for a in uh]
    div = _deriv(g, vh[0], "x") + _deriv(g, vh[1], "y")
    col = g.antiderivative(g.fft(div))

    rhs = []
    for i in range(2):
        prod = (-(v[0] * _deriv(g, uh[i], "x") + v[1] * _deriv(g, uh[i], "y"))
                + col * _deriv(g, uh[i], "z")
                - (u[0] * _deriv(g, vh[i], "x") + u[1] * _deriv(g, vh[i], "y"))
                + div * u[i])
        lin = (p.nu_h * (g.deriv_hat(uh[i], 0, 2) + g.deriv_hat(uh[i], 1, 2))
               + p.nu_z * g.deriv_hat(uh[i], 2, 2))
        rot = p.f0 * uh[1] if i == 0 else -p.f0 * uh[0]
        rhs.append(mask * g.fft(prod) + lin + mask * (rot + g.deriv_hat(Th, i, 1)))

    lhs = [g.deriv_hat(tend.dv1.coefficients, 2, 1), g.deriv_hat(tend.dv2.coefficients, 2, 1)]
    diff = np.sqrt(sum(g.inner_hat(a - b, a - b) for a, b in zip(lhs, rhs)))
    scale = np.sqrt(sum(g.inner_hat(a, a) for a in lhs)) + np.sqrt(sum(g.inner_hat(b, b) for b in rhs))
    return 0.0 if scale == 0 else float(diff / scale)


# --- norm panel -------------------------------------------------------------

def h2_panel(s: State) -> float:
    """||v||_{H2}^2 + ||T||_{H2}^2."""
    return norm((s.v1, s.v2), "H2") ** 2 + norm(s.T, "H2") ** 2


def norm_panel(s: State, p: Params) -> DiagRecord:
    """All monitored norms and identity residuals of one state."""
    g = s.grid
    vh = [s.v1.coefficients, s.v2.coefficients]
    Th = s.T.coefficients
    uh = [g.deriv_hat(a, 2, 1) for a in vh]

    kx, ky, _ = g.first_derivative_wavenumbers
    grad_vbar = [g.ifft2(1j * k[:, :, 0] * a[:, :, 0]) for a in vh for k in (kx, ky)]
    kh2 = (g.wavenumbers[0] ** 2 + g.wavenumbers[1] ** 2)[:, :, 0]
    lap_vbar = [g.ifft2(-kh2 * a[:, :, 0]) for a in vh]

    dz_v = [Field3(g, a, True) for a in uh]
    lap_h_v = [g.deriv_hat(a, 0, 2) + g.deriv_hat(a, 1, 2) for a in vh]
    lap_T = g.deriv_hat(Th, 0, 2) + g.deriv_hat(Th, 1, 2) + g.deriv_hat(Th, 2, 2)
    hessian = [a + b for a in "xyz" for b in "xyz"]

    return DiagRecord(
        time=s.time,
        L2_v=norm((s.v1, s.v2)),
        L6_v=norm((s.v1, s.v2), "L6"),
        Linf_T=norm(s.T, "Linf"),
        L2_T=norm(s.T),
        L2_grad_v=float(np.sqrt(_grad_sq(g, vh, ("x", "y", "z")))),
        L2_gradH_T=float(np.sqrt(_grad_sq(g, [Th], ("x", "y")))),
        L2_gradH_vbar=norm2d(grad_vbar, g),
        L2_laplH_vbar=norm2d(lap_vbar, g),
        L6_dz_v=norm(dz_v, "L6"),
        L2_grad_u=float(np.sqrt(_grad_sq(g, uh, ("x", "y", "z")))),
        L2_lapl2_u=float(np.sqrt(_grad_sq(g, uh, hessian))),
        L2_laplH_v=float(np.sqrt(sum(_l2sq(g, g.ifft(a)) for a in lap_h_v))),
        L2_lapl_T=float(np.sqrt(_l2sq(g, g.ifft(lap_T)))),
        energy_residual=energy_identity_residual(s, p),
        symmetry_residual=symmetry_residual(s),
        u_eq_residual=u_equation_residual(s, p, allow_anisotropic=True),
    )

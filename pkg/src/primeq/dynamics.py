"""Tendency of the hydrostatic system with diagnostic w and surface pressure.

Momentum:
    dv/dt = -(v.grad_H)v - w dv/dz - f0 k x v - grad_H(ps - int_{-h}^z T)
            + nu_h lap_H v + nu_z d2v/dz2
Temperature:
    dT/dt = -v.grad_H T - w (dT/dz + 1/h) + kappa_h lap_H T + eps d2T/dz2

with w = -int_{-h}^z div_H v and ps chosen so the vertical mean of dv/dt is
horizontally divergence-free.  Advection is in convective form; every
explicit term is truncated to the 2/3-rule band.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Params, State, horizontal_divergence_mean, norm, norm2d
from .grid import Field3, Grid

__all__ = [
    "Tendency",
    "ConstraintError",
    "SolvabilityError",
    "coriolis",
    "advection",
    "solve_surface_pressure",
    "barotropic_project",
    "tendency",
    "explicit_hat",
    "linear_symbols",
    "project_hat",
    "CONSTRAINT_TOL",
]

CONSTRAINT_TOL = 1e-8


class ConstraintError(ValueError):
    """State violates div_H(vbar) = 0."""


class SolvabilityError(ValueError):
    """Periodic Poisson problem with a right-hand side of nonzero mean."""


@dataclass(frozen=True)
class Tendency:
    dv1: Field3
    dv2: Field3
    dT: Field3
    ps: np.ndarray


def coriolis(v1: Field3, v2: Field3, f0: float) -> tuple[Field3, Field3]:
    """The rotation term f0 k x v = f0 (-v2, v1)."""
    return (Field3(v1.grid, -f0 * v2.values), Field3(v1.grid, f0 * v1.values))


def _poisson_hat2d(grid: Grid, rhs_hat: np.ndarray) -> np.ndarray:
    kx, ky, _ = grid.wavenumbers
    k2 = (kx**2 + ky**2)[:, :, 0]
    out = np.zeros_like(rhs_hat)
    nz = k2 != 0
    out[nz] = -rhs_hat[nz] / k2[nz]
    return out


def solve_surface_pressure(rhs: np.ndarray, grid: Grid) -> np.ndarray:
    """Solve lap_H ps = rhs on the periodic square, zero-mean gauge."""
    rhs = np.asarray(rhs, dtype=float)
    mean = rhs.mean()
    if abs(mean) > 1e-10 * max(1.0, np.abs(rhs).max()):
        raise SolvabilityError(f"right-hand side has nonzero mean {mean:.3e}")
    return grid.ifft2(_poisson_hat2d(grid, grid.fft2(rhs)))


def project_hat(grid: Grid, v1h: np.ndarray, v2h: np.ndarray) -> None:
    """In place: remove the gradient part of the z-mean plane of (v1h, v2h)."""
    kx, ky, _ = grid.first_derivative_wavenumbers
    kx, ky = kx[:, :, 0], ky[:, :, 0]
    k2 = kx**2 + ky**2
    inv = np.divide(1.0, k2, out=np.zeros_like(k2), where=k2 != 0)
    a1, a2 = v1h[:, :, 0], v2h[:, :, 0]
    proj = (kx * a1 + ky * a2) * inv
    a1 -= kx * proj
    a2 -= ky * proj


def barotropic_project(v1: Field3, v2: Field3) -> tuple[Field3, Field3]:
    """Helmholtz-Leray projection of the vertical mean, applied z-uniformly."""
    g = v1.grid
    v1h, v2h = v1.coefficients.copy(), v2.coefficients.copy()
    project_hat(g, v1h, v2h)
    return Field3(g, g.ifft(v1h)), Field3(g, g.ifft(v2h))


def linear_symbols(grid: Grid, p: Params) -> tuple[np.ndarray, np.ndarray]:
    """Fourier symbols of the diffusion operators for v and T."""
    kx, ky, kz = grid.wavenumbers
    kh2 = kx**2 + ky**2
    return -(p.nu_h * kh2 + p.nu_z * kz**2), -(p.kappa_h * kh2 + p.eps * kz**2)


def _transport(g: Grid, v1h, v2h):
    """Physical-space transport operator f -> (v.grad_H) f + w df/dz, and w."""
    kx, ky, kz = g.first_derivative_wavenumbers
    ifft = g.ifft
    v1, v2 = ifft(v1h), ifft(v2h)
    w = -g.antiderivative(1j * kx * v1h + 1j * ky * v2h)

    def advect(ah):
        return v1 * ifft(1j * kx * ah) + v2 * ifft(1j * ky * ah) + w * ifft(1j * kz * ah)

    return advect, w


def advection(v1: Field3, v2: Field3, f: Field3) -> Field3:
    """Dealiased (v.grad_H) f + w df/dz with w diagnosed from v."""
    g = f.grid
    advect, _ = _transport(g, v1.coefficients, v2.coefficients)
    return Field3(g, g.ifft(g.dealias_mask * g.fft(advect(f.coefficients))))


def explicit_hat(grid: Grid, p: Params, v1h, v2h, Th):
    """Advection, rotation, buoyancy and surface-pressure terms.

    Returns the coefficients ``(n1, n2, nT)`` of the explicit tendency and
    the 2D coefficients of ps.
    """
    g = grid
    mask = g.dealias_mask
    kx, ky, _ = g.first_derivative_wavenumbers

    advect, w = _transport(g, v1h, v2h)
    a1 = advect(v1h)
    a2 = advect(v2h)
    aT = advect(Th) + w / g.h
    # grad_H int_{-h}^z T
    bx = g.antiderivative(1j * kx * Th)
    by = g.antiderivative(1j * ky * Th)

    n1 = g.fft(bx - a1) + p.f0 * v2h
    n2 = g.fft(by - a2) - p.f0 * v1h
    nT = -g.fft(aT)
    n1 *= mask
    n2 *= mask
    nT *= mask

    kx2, ky2 = kx[:, :, 0], ky[:, :, 0]
    div = 1j * kx2 * n1[:, :, 0] + 1j * ky2 * n2[:, :, 0]
    ps = _poisson_hat2d(g, div)
    n1[:, :, 0] -= 1j * kx2 * ps
    n2[:, :, 0] -= 1j * ky2 * ps
    return n1, n2, nT, ps


def check_constraint(s: State, tol: float = CONSTRAINT_TOL) -> float:
    """Return ||div_H vbar||_{L2(M)}; raise if above ``tol * (1 + ||v||_2)``."""
    d = norm2d(horizontal_divergence_mean(s.v1, s.v2), s.grid)
    if d > tol * (1.0 + norm((s.v1, s.v2))):
        raise ConstraintError(f"div_H(vbar) = {d:.3e} violates the barotropic constraint")
    return d


def tendency(s: State, p: Params) -> Tendency:
    """Full time derivative of (v1, v2, T), diffusion included."""
    g = s.grid
    p.check_grid(g)
    check_constraint(s)
    v1h, v2h, Th = s.spectral()
    n1, n2, nT, ps = explicit_hat(g, p, v1h, v2h, Th)
    Lv, LT = linear_symbols(g, p)
    return Tendency(
        Field3(g, g.ifft(n1 + Lv * v1h)),
        Field3(g, g.ifft(n2 + Lv * v2h)),
        Field3(g, g.ifft(nT + LT * Th)),
        g.ifft2(ps),
    )

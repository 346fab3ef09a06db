"""State container, vertical averaging, diagnostic w and p, and norms."""

from __future__ import annotations

from dataclasses import dataclass, fields as dc_fields
from typing import Sequence, Union

import numpy as np

from .grid import Field3, Grid

__all__ = [
    "State",
    "Params",
    "DiagRecord",
    "vertical_average",
    "fluctuation",
    "broadcast",
    "diagnose_w",
    "w_boundary",
    "horizontal_divergence_mean",
    "reconstruct_pressure",
    "norm",
    "norm2d",
]

FieldLike = Union[Field3, Sequence[Field3]]


@dataclass(frozen=True)
class Params:
    """Physical and regularisation coefficients.

    The defaults (unit viscosities and diffusivity, ``eps=0``) give the
    original system with full viscosity and horizontal-only diffusivity.
    ``nu_z=delta`` with ``eps=0`` gives the continuous-dependence system.
    ``h=None`` means "take it from the grid".
    """

    h: float | None = None
    f0: float = 0.0
    nu_h: float = 1.0
    nu_z: float = 1.0
    kappa_h: float = 1.0
    eps: float = 0.0

    def __post_init__(self):
        for name in ("nu_h", "nu_z", "kappa_h", "eps"):
            if not getattr(self, name) >= 0:
                raise ValueError(f"{name} must be >= 0")
        if self.h is not None and not self.h > 0:
            raise ValueError("h must be > 0")

    def check_grid(self, grid: Grid) -> None:
        if self.h is not None and not np.isclose(self.h, grid.h, rtol=1e-14, atol=0):
            raise ValueError(f"Params.h={self.h} does not match grid h={grid.h}")


@dataclass(frozen=True)
class State:
    """Prognostic snapshot (v1, v2, T) at a given time, in physical space."""

    v1: Field3
    v2: Field3
    T: Field3
    time: float = 0.0

    def __post_init__(self):
        g = self.v1.grid
        if self.v2.grid != g or self.T.grid != g:
            raise ValueError("state fields live on different grids")
        for f in (self.v1, self.v2, self.T):
            if f.spectral:
                raise ValueError("State holds physical-space fields")

    @property
    def grid(self) -> Grid:
        return self.v1.grid

    @classmethod
    def from_arrays(cls, grid: Grid, v1, v2, T, time: float = 0.0) -> "State":
        def as_field(a):
            return Field3(grid, np.broadcast_to(np.asarray(a, dtype=float), grid.shape).copy())

        return cls(as_field(v1), as_field(v2), as_field(T), float(time))

    @classmethod
    def zeros(cls, grid: Grid, time: float = 0.0) -> "State":
        return cls.from_arrays(grid, 0.0, 0.0, 0.0, time)

    @classmethod
    def from_spectral(cls, grid: Grid, v1h, v2h, Th, time: float = 0.0) -> "State":
        return cls.from_arrays(grid, grid.ifft(v1h), grid.ifft(v2h), grid.ifft(Th), time)

    def spectral(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g = self.grid
        return g.fft(self.v1.data), g.fft(self.v2.data), g.fft(self.T.data)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.v1.data, self.v2.data, self.T.data

    def replace(self, **kw) -> "State":
        g = self.grid
        args = {"v1": self.v1, "v2": self.v2, "T": self.T, "time": self.time}
        for key, val in kw.items():
            if key != "time" and not isinstance(val, Field3):
                val = Field3(g, np.broadcast_to(np.asarray(val, dtype=float), g.shape).copy())
            args[key] = val
        return State(**args)

    def is_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays())


@dataclass(frozen=True)
class DiagRecord:
    """One row of monitored norms and identity residuals."""

    time: float
    L2_v: float
    L6_v: float
    Linf_T: float
    L2_T: float
    L2_grad_v: float
    L2_gradH_T: float
    L2_gradH_vbar: float
    L2_laplH_vbar: float
    L6_dz_v: float
    L2_grad_u: float
    L2_lapl2_u: float
    L2_laplH_v: float
    L2_lapl_T: float
    energy_residual: float
    symmetry_residual: float
    u_eq_residual: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in dc_fields(cls)]

    def values(self) -> list[float]:
        return [float(getattr(self, name)) for name in self.columns()]


def vertical_average(f: Field3) -> np.ndarray:
    """Exact z-average of the interpolant, as a 2D ``(nx, ny)`` array."""
    return f.grid.ifft2(f.coefficients[:, :, 0])


def broadcast(f2: np.ndarray, grid: Grid) -> Field3:
    """Extend a 2D field on M uniformly in z."""
    return Field3(grid, np.repeat(np.asarray(f2, dtype=float)[:, :, None], grid.nz, axis=2))


def fluctuation(f: Field3) -> Field3:
    """f minus its vertical average."""
    ch = f.coefficients.copy()
    ch[:, :, 0] = 0.0
    return Field3(f.grid, f.grid.ifft(ch))


def horizontal_divergence_mean(v1: Field3, v2: Field3) -> np.ndarray:
    """div_H of the vertically averaged velocity, physical 2D array."""
    g = v1.grid
    kx, ky, _ = g.first_derivative_wavenumbers
    d = 1j * kx[:, :, 0] * v1.coefficients[:, :, 0] + 1j * ky[:, :, 0] * v2.coefficients[:, :, 0]
    return g.ifft2(d)


def diagnose_w(v1: Field3, v2: Field3) -> Field3:
    """Vertical velocity w = -int_{-h}^z div_H v, vanishing at z = -h."""
    g = v1.grid
    kx, ky, _ = g.first_derivative_wavenumbers
    div = 1j * kx * v1.coefficients + 1j * ky * v2.coefficients
    return Field3(g, -g.antiderivative(div))


def w_boundary(v1: Field3, v2: Field3) -> tuple[np.ndarray, np.ndarray]:
    """w on the planes z = -h and z = +h.

    The top value is the full-column integral, -2h div_H(vbar), which the
    periodic grid does not sample directly.
    """
    g = v1.grid
    bottom = diagnose_w(v1, v2).data[:, :, 0]
    top = -2.0 * g.h * horizontal_divergence_mean(v1, v2)
    return bottom, top


def reconstruct_pressure(T: Field3, ps: np.ndarray) -> Field3:
    """Hydrostatic pressure p = ps - int_{-h}^z T."""
    g = T.grid
    return Field3(g, np.asarray(ps, dtype=float)[:, :, None] - g.antiderivative(T.coefficients))


def _components(f: FieldLike) -> list[Field3]:
    return [f] if isinstance(f, Field3) else list(f)


def _sobolev_sq(c: Field3, order: int) -> float:
    g = c.grid
    ah = c.coefficients
    k1 = g.first_derivative_wavenumbers
    k = g.wavenumbers
    sym = np.ones(g.spectral_shape)
    if order >= 1:
        sym = sym + k1[0] ** 2 + k1[1] ** 2 + k1[2] ** 2
    if order >= 2:
        sym = sym + k[0] ** 4 + k[1] ** 4 + k[2] ** 4
        sym = sym + (k1[0] * k1[1]) ** 2 + (k1[0] * k1[2]) ** 2 + (k1[1] * k1[2]) ** 2
    return float(np.sum(g.rfft_weights * sym * np.abs(ah) ** 2) * g.volume)


def norm(f: FieldLike, kind: str = "L2") -> float:
    """Norm of a scalar field, or of a vector field given as a sequence.

    Lp norms use the collocation rule (cell volume times sum of |f|^p) with
    |f| the pointwise Euclidean magnitude for vectors.  H1 and H2 sum the
    squared L2 norms of all derivatives up to that order (each mixed
    multi-index counted once), evaluated spectrally.
    """
    comps = _components(f)
    g = comps[0].grid
    if kind in ("H1", "H2"):
        order = int(kind[1])
        return float(np.sqrt(sum(_sobolev_sq(c, order) for c in comps)))
    mag2 = sum(c.values**2 for c in comps)
    if kind == "Linf":
        return float(np.sqrt(mag2.max()))
    if kind in ("L2", "L4", "L6"):
        p = int(kind[1])
        return float((np.sum(mag2 ** (p / 2)) * g.cell_volume) ** (1.0 / p))
    raise ValueError(f"unknown norm kind {kind!r}")


def norm2d(a: np.ndarray | Sequence[np.ndarray], grid: Grid) -> float:
    """L2(M) norm of a 2D field (or 2D vector field)."""
    comps = [a] if isinstance(a, np.ndarray) else list(a)
    return float(np.sqrt(sum(np.sum(c**2) for c in comps) * grid.dx * grid.dy))

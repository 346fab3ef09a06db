"""
Periodic spectral grid on the box M x (-h, h), M = (0,1)^2.

All three directions are Fourier: x and y have period 1, z has period 2h
(the symmetric extension makes every field 2h-periodic in z).  Spectral
coefficients are stored in ``scipy.fft.rfftn`` layout with the real half
along z, normalised so that a constant field 1 has zero-mode coefficient 1.

Array layout is ``(nx, ny, nz)`` with ``indexing="ij"``; in C order z is the
fastest-varying index.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft as sfft

__all__ = [
    "Grid",
    "Field3",
    "GridError",
    "RepresentationError",
    "make_grid",
    "transform",
    "spectral_derivative",
    "dealias",
    "vertical_antiderivative",
    "fft_workers",
]

AXES = {"x": 0, "y": 1, "z": 2}


class GridError(ValueError):
    """Invalid grid dimensions or half-height."""


class RepresentationError(ValueError):
    """Field is in the wrong (physical/spectral) representation."""


_workers: int | None = None


def fft_workers(n: int | None = None) -> int:
    """Get (and optionally set) the number of FFT worker threads.

    The default comes from ``PRIMEQ_THREADS`` and falls back to 1.  Thread
    count only changes how independent 1D lines are scheduled; pocketfft
    results do not depend on it.
    """
    global _workers
    if n is not None:
        if n < 1:
            raise ValueError("worker count must be >= 1")
        _workers = int(n)
    if _workers is None:
        _workers = max(1, int(os.environ.get("PRIMEQ_THREADS", "1")))
    return _workers


@dataclass(frozen=True)
class Grid:
    """Uniform collocation grid with its Fourier wavenumber lattice.

    Parameters
    ----------
    nx, ny, nz : int
        Collocation counts, even and >= 4.
    h : float
        Half-height; z runs over [-h, h) with period 2h.
    dealias_cutoff : tuple of int, optional
        Largest retained integer mode per axis.  Defaults to the 2/3 rule.
        Only meant to be overridden for fault-injection tests.
    """

    nx: int
    ny: int
    nz: int
    h: float
    dealias_cutoff: tuple[int, int, int] | None = field(default=None, compare=False)

    def __post_init__(self):
        for name in ("nx", "ny", "nz"):
            n = getattr(self, name)
            if int(n) != n or n < 4 or n % 2:
                raise GridError(f"{name} must be an even integer >= 4, got {n}")
        if not (np.isfinite(self.h) and self.h > 0):
            raise GridError(f"half-height h must be positive, got {self.h}")

    # --- physical space -------------------------------------------------
    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def spectral_shape(self) -> tuple[int, int, int]:
        return (self.nx, self.ny, self.nz // 2 + 1)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def volume(self) -> float:
        return 2.0 * self.h

    @property
    def dx(self) -> float:
        return 1.0 / self.nx

    @property
    def dy(self) -> float:
        return 1.0 / self.ny

    @property
    def dz(self) -> float:
        return 2.0 * self.h / self.nz

    @property
    def cell_volume(self) -> float:
        return self.dx * self.dy * self.dz

    @cached_property
    def x(self) -> np.ndarray:
        return np.arange(self.nx) / self.nx

    @cached_property
    def y(self) -> np.ndarray:
        return np.arange(self.ny) / self.ny

    @cached_property
    def z(self) -> np.ndarray:
        return -self.h + 2.0 * self.h * np.arange(self.nz) / self.nz

    @cached_property
    def mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return tuple(np.meshgrid(self.x, self.y, self.z, indexing="ij"))

    # --- wavenumbers ----------------------------------------------------
    @cached_property
    def mode_index(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Integer mode numbers, broadcastable to ``spectral_shape``."""
        mx = np.fft.fftfreq(self.nx, 1.0 / self.nx).round().astype(int)
        my = np.fft.fftfreq(self.ny, 1.0 / self.ny).round().astype(int)
        mz = np.arange(self.nz // 2 + 1)
        return mx[:, None, None], my[None, :, None], mz[None, None, :]

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Angular wavenumbers 2*pi*m in x, y and pi*m/h in z."""
        mx, my, mz = self.mode_index
        return 2 * np.pi * mx, 2 * np.pi * my, (np.pi / self.h) * mz

    @cached_property
    def first_derivative_wavenumbers(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        # Nyquist modes have no real-valued first derivative; drop them.
        return tuple(np.where(np.abs(m) == n // 2, 0.0, k)
                     for k, m, n in zip(self.wavenumbers, self.mode_index, self.shape))

    @cached_property
    def k2_horizontal(self) -> np.ndarray:
        kx, ky, _ = self.wavenumbers
        return kx**2 + ky**2

    @cached_property
    def k2(self) -> np.ndarray:
        _, _, kz = self.wavenumbers
        return self.k2_horizontal + kz**2

    @cached_property
    def rfft_weights(self) -> np.ndarray:
        """Multiplicity of each stored coefficient in the full spectrum."""
        w = np.full(self.nz // 2 + 1, 2.0)
        w[0] = 1.0
        w[-1] = 1.0
        return w[None, None, :]

    @cached_property
    def cutoff(self) -> tuple[int, int, int]:
        if self.dealias_cutoff is not None:
            return tuple(int(c) for c in self.dealias_cutoff)
        # Largest K with 3K < N; equals floor(N/3) unless 3 | N.
        return tuple((n - 1) // 3 for n in self.shape)

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        mx, my, mz = self.mode_index
        kx, ky, kz = self.cutoff
        return (np.abs(mx) <= kx) & (np.abs(my) <= ky) & (mz <= kz)

    # --- raw array kernels ---------------------------------------------
    def fft(self, a: np.ndarray) -> np.ndarray:
        return sfft.rfftn(a, axes=(0, 1, 2), norm="forward", workers=fft_workers())

    def ifft(self, ah: np.ndarray) -> np.ndarray:
        return sfft.irfftn(ah, s=self.shape, axes=(0, 1, 2), norm="forward",
                           workers=fft_workers())

    def deriv_hat(self, ah: np.ndarray, axis: int, order: int = 1) -> np.ndarray:
        if order == 1:
            return 1j * self.first_derivative_wavenumbers[axis] * ah
        if order == 2:
            return -self.wavenumbers[axis] ** 2 * ah
        raise ValueError(f"unsupported derivative order {order}")

    def antiderivative_hat(self, ah: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Split the vertical antiderivative into periodic and linear parts.

        Returns the spectral coefficients of the zero-mean periodic
        antiderivative of the oscillatory z-modes, and the 2D coefficient
        array of the z-mean (which integrates to a linear profile).
        """
        kz = self.first_derivative_wavenumbers[2]
        safe = np.where(kz == 0, 1.0, kz)
        gh = np.where(kz == 0, 0.0, ah / (1j * safe))
        return gh, ah[:, :, 0].copy()

    def antiderivative(self, ah: np.ndarray) -> np.ndarray:
        """Physical values of int_{-h}^z f for spectral ``ah``."""
        gh, mean2 = self.antiderivative_hat(ah)
        g = self.ifft(gh)
        g -= g[:, :, :1]
        mean = self.ifft2(mean2)
        g += mean[:, :, None] * (self.z + self.h)[None, None, :]
        return g

    def fft2(self, a: np.ndarray) -> np.ndarray:
        """Horizontal transform of a 2D field; matches the layout of ``ah[:, :, 0]``."""
        return sfft.fft2(a, norm="forward", workers=fft_workers())

    def ifft2(self, ah: np.ndarray) -> np.ndarray:
        return sfft.ifft2(ah, norm="forward", workers=fft_workers()).real

    def inner(self, a: np.ndarray, b: np.ndarray) -> float:
        """L2 inner product by collocation quadrature."""
        return float(np.sum(a * b) * self.cell_volume)

    def inner_hat(self, ah: np.ndarray, bh: np.ndarray) -> float:
        """L2 inner product of two real fields from their coefficients."""
        return float(np.sum(self.rfft_weights * (ah * bh.conj()).real) * self.volume)

    def field(self, values, spectral: bool = False) -> "Field3":
        return Field3(self, np.asarray(values), spectral)

    def evaluate(self, func) -> "Field3":
        """Sample ``func(x, y, z)`` on the collocation points."""
        X, Y, Z = self.mesh
        return Field3(self, np.broadcast_to(np.asarray(func(X, Y, Z), dtype=float),
                                            self.shape).copy())


@dataclass(frozen=True)
class Field3:
    """One real scalar field on a grid, either physical or spectral."""

    grid: Grid
    data: np.ndarray
    spectral: bool = False

    def __post_init__(self):
        want = self.grid.spectral_shape if self.spectral else self.grid.shape
        if self.data.shape != want:
            raise ValueError(f"field shape {self.data.shape} does not match grid {want}")
        if not np.isfinite(self.data).all():
            raise ValueError("field contains NaN or Inf")

    @property
    def representation(self) -> str:
        return "spectral" if self.spectral else "physical"

    @property
    def values(self) -> np.ndarray:
        """Physical values (transforming if necessary)."""
        return self.grid.ifft(self.data) if self.spectral else self.data

    @property
    def coefficients(self) -> np.ndarray:
        return self.data if self.spectral else self.grid.fft(self.data)

    def to_physical(self) -> "Field3":
        return self if not self.spectral else Field3(self.grid, self.values, False)

    def to_spectral(self) -> "Field3":
        return self if self.spectral else Field3(self.grid, self.coefficients, True)


def make_grid(nx: int, ny: int, nz: int, h: float) -> Grid:
    """Build a grid with points x_i = i/nx, y_j = j/ny, z_k = -h + 2hk/nz."""
    return Grid(nx, ny, nz, float(h))


def transform(f: Field3, direction: str) -> Field3:
    """Exact discrete Fourier pair between physical and spectral space."""
    if direction == "forward":
        if f.spectral:
            raise RepresentationError("forward transform needs a physical field")
        return Field3(f.grid, f.grid.fft(f.data), True)
    if direction == "backward":
        if not f.spectral:
            raise RepresentationError("backward transform needs a spectral field")
        return Field3(f.grid, f.grid.ifft(f.data), False)
    raise ValueError(f"unknown direction {direction!r}")


def spectral_derivative(f: Field3, axis: str, order: int = 1) -> Field3:
    """Differentiate the trigonometric interpolant of ``f``.

    The result is returned in the same representation as the input.
    """
    if order not in (1, 2):
        raise ValueError(f"unsupported derivative order {order}")
    if axis not in AXES:
        raise ValueError(f"axis must be one of {sorted(AXES)}, got {axis!r}")
    dh = f.grid.deriv_hat(f.coefficients, AXES[axis], order)
    out = Field3(f.grid, dh, True)
    return out if f.spectral else out.to_physical()


def dealias(f: Field3) -> Field3:
    """Zero every mode above the 2/3-rule cutoff on any axis."""
    if not f.spectral:
        raise RepresentationError("dealias needs a spectral field")
    return Field3(f.grid, np.where(f.grid.dealias_mask, f.data, 0.0), True)


def vertical_antiderivative(f: Field3) -> Field3:
    """Physical values of F(x, y, z) = int_{-h}^z f(x, y, s) ds.

    Oscillatory z-modes are integrated spectrally; the z-mean contributes
    the exact linear profile mean * (z + h), so F is not periodic in
    general.
    """
    return Field3(f.grid, f.grid.antiderivative(f.coefficients), False)

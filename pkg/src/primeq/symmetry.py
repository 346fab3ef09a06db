"""Even/odd extension between the half box M x (-h, 0) and M x (-h, h).

Half-fields are sampled on the lower-half collocation points
z_k = -h + 2hk/nz, k = 0..nz/2, i.e. both fold planes z = -h and z = 0
included.  Reflection z -> -z maps grid index k to (nz - k) mod nz, so every
parity operation is an exact permutation with sign.
"""

from __future__ import annotations

from enum import Enum

import numpy as np

from .fields import State, norm
from .grid import Field3, Grid

__all__ = [
    "Parity",
    "CompatibilityError",
    "reflect",
    "even_part",
    "odd_part",
    "extend",
    "restrict",
    "symmetrize",
    "symmetry_residual",
    "TRACE_TOL",
]

TRACE_TOL = 1e-8


class Parity(str, Enum):
    EVEN = "even"
    ODD = "odd"


# parity of each prognostic field in the invariant subspace
STATE_PARITY = {"v1": Parity.EVEN, "v2": Parity.EVEN, "T": Parity.ODD}


class CompatibilityError(ValueError):
    """Half-field cannot be extended to a smooth periodic field."""


def _reflection_index(nz: int) -> np.ndarray:
    return (-np.arange(nz)) % nz


def reflect(f: Field3) -> Field3:
    """The field f(x, y, -z)."""
    return Field3(f.grid, f.values[:, :, _reflection_index(f.grid.nz)])


def even_part(f: Field3) -> Field3:
    a = f.values
    return Field3(f.grid, 0.5 * (a + a[:, :, _reflection_index(f.grid.nz)]))


def odd_part(f: Field3) -> Field3:
    a = f.values
    return Field3(f.grid, 0.5 * (a - a[:, :, _reflection_index(f.grid.nz)]))


def _fold_slope(half: np.ndarray, dz: float) -> float:
    # second-order one-sided d/dz at both fold planes, pointing into the half box
    bottom = (-3 * half[..., 0] + 4 * half[..., 1] - half[..., 2]) / (2 * dz)
    top = (3 * half[..., -1] - 4 * half[..., -2] + half[..., -3]) / (2 * dz)
    return float(max(np.abs(bottom).max(), np.abs(top).max()))


def extend(half, parity: Parity | str, grid: Grid, kink_tol: float = 0.5) -> Field3:
    """Even or odd extension in z of a field given on the lower half box.

    Parameters
    ----------
    half : array_like, shape (nx, ny, nz//2 + 1)
        Samples on z in [-h, 0].
    parity : Parity or {"even", "odd"}
    grid : Grid
        Target grid on M x (-h, h).
    kink_tol : float
        Even extensions whose one-sided slope at a fold plane exceeds
        ``kink_tol * max|f| / h`` are rejected as non-smooth.

    Raises
    ------
    CompatibilityError
        Odd extension with a boundary trace above ``TRACE_TOL``, or an even
        extension with a slope kink at z = -h or z = 0.
    """
    parity = Parity(parity)
    half = np.asarray(half, dtype=float)
    nz2 = grid.nz // 2
    if half.shape != (grid.nx, grid.ny, nz2 + 1):
        raise ValueError(f"half-field shape {half.shape} does not match grid")
    if parity is Parity.ODD:
        trace = max(np.abs(half[..., 0]).max(), np.abs(half[..., -1]).max())
        if trace > TRACE_TOL:
            raise CompatibilityError(
                f"odd extension needs f = 0 at z = -h and z = 0 (trace {trace:.3e})")
    else:
        scale = np.abs(half).max()
        if scale > 0 and _fold_slope(half, grid.dz) > kink_tol * scale / grid.h:
            raise CompatibilityError("even extension has a slope kink at a fold plane")
    sign = 1.0 if parity is Parity.EVEN else -1.0
    out = np.empty(grid.shape)
    out[..., : nz2 + 1] = half
    # upper half: z_j = -z_{nz-j}
    out[..., nz2 + 1:] = sign * half[..., nz2 - 1:0:-1]
    if parity is Parity.ODD:
        out[..., 0] = 0.0
        out[..., nz2] = 0.0
    return Field3(grid, out)


def restrict(f: Field3) -> np.ndarray:
    """Samples of ``f`` on the lower half box, z in [-h, 0]."""
    return f.values[..., : f.grid.nz // 2 + 1].copy()


def symmetrize(s: State) -> State:
    """Project a state onto the invariant subspace (v even, T odd)."""
    return State(even_part(s.v1), even_part(s.v2), odd_part(s.T), s.time)


def symmetry_residual(s: State) -> float:
    """||odd part of v||_2 + ||even part of T||_2."""
    return norm((odd_part(s.v1), odd_part(s.v2))) + norm(even_part(s.T))

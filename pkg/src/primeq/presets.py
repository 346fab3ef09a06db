"""Named initial conditions.

rest        v = 0, T = 0
inertial    v = (U, 0) uniform, T = 0
mode-decay  v = (0, U sin 2 pi x), T = 0
thermal     v = 0, T = U sin(pi z / h) sin(2 pi x)
random-H    seeded band-limited (v, T) with v even and T odd in z and a
            divergence-free vertical mean

``U`` is the ``amplitude`` argument.  The random-H field is generated on a
small auxiliary lattice and zero-padded, so for a given seed it is the same
trigonometric polynomial on every grid that resolves it.
"""

from __future__ import annotations

import numpy as np

from .dynamics import project_hat
from .fields import State
from .grid import Grid, make_grid
from .symmetry import symmetrize

__all__ = ["PRESETS", "initial_state", "random_h", "twin_perturbation", "embed"]

PRESETS = ("rest", "inertial", "mode-decay", "thermal", "random-H")


def embed(small: Grid, coeffs: np.ndarray, grid: Grid) -> np.ndarray:
    """Zero-pad spectral coefficients from ``small`` onto a finer ``grid``."""
    mx, my, mz = (m.ravel() for m in small.mode_index)
    keep = [np.abs(m) < n // 2 for m, n in zip((mx, my, mz), small.shape)]
    out = np.zeros(grid.spectral_shape, dtype=complex)
    ix = np.mod(mx[keep[0]], grid.nx)
    iy = np.mod(my[keep[1]], grid.ny)
    iz = mz[keep[2]]
    out[np.ix_(ix, iy, iz)] = coeffs[np.ix_(np.flatnonzero(keep[0]), np.flatnonzero(keep[1]),
                                            np.flatnonzero(keep[2]))]
    return out


def random_h(grid: Grid, seed: int = 0, amplitude: float = 0.5, kmax: int = 3,
             temperature_amplitude: float | None = None) -> State:
    """Seeded smooth state in the invariant subspace.

    Modes up to ``kmax`` per axis are drawn with Gaussian amplitudes damped
    by exp(-|m|^2 / kmax); v and T are then rescaled to L2 norm
    ``amplitude`` (T to ``temperature_amplitude`` if given).
    """
    if kmax > min(grid.cutoff):
        raise ValueError(f"kmax={kmax} exceeds the dealiasing cutoff {grid.cutoff}")
    n = 2 * kmax + 2
    small = make_grid(max(n, 4), max(n, 4), max(n, 4), grid.h)
    rng = np.random.default_rng(seed)
    mx, my, mz = small.mode_index
    damp = np.exp(-(mx**2 + my**2 + mz**2) / kmax)
    fields = []
    for _ in range(3):
        ch = (rng.standard_normal(small.spectral_shape)
              + 1j * rng.standard_normal(small.spectral_shape)) * damp
        # round-trip through physical space to impose conjugate symmetry
        fields.append(small.ifft(ch))
    s = symmetrize(State.from_arrays(small, *fields))
    v1h, v2h, Th = s.spectral()
    project_hat(small, v1h, v2h)
    for ch in (v1h, v2h, Th):
        ch *= np.abs(small.mode_index[0]) < small.nx // 2
        ch *= np.abs(small.mode_index[1]) < small.ny // 2
        ch *= small.mode_index[2] < small.nz // 2

    def l2(*chs):
        return np.sqrt(sum(small.inner_hat(c, c) for c in chs))

    sv = amplitude / l2(v1h, v2h)
    ta = amplitude if temperature_amplitude is None else temperature_amplitude
    sT = ta / l2(Th)
    return State.from_spectral(grid, embed(small, sv * v1h, grid), embed(small, sv * v2h, grid),
                               embed(small, sT * Th, grid))


def twin_perturbation(grid: Grid) -> State:
    """Fixed smooth direction in the invariant subspace used by twin runs.

    v' = (sin 2 pi y, sin 2 pi x) cos(pi z / h),  T' = cos(2 pi x) sin(pi z / h).
    Its vertical mean vanishes, so it satisfies the barotropic constraint.
    """
    X, Y, Z = grid.mesh
    c = np.cos(np.pi * Z / grid.h)
    return State.from_arrays(grid, np.sin(2 * np.pi * Y) * c, np.sin(2 * np.pi * X) * c,
                             np.cos(2 * np.pi * X) * np.sin(np.pi * Z / grid.h))


def initial_state(name: str, grid: Grid, amplitude: float = 1.0, seed: int = 0,
                  kmax: int = 3) -> State:
    """Build one of the named presets."""
    X, Y, Z = grid.mesh
    if name == "rest":
        return State.zeros(grid)
    if name == "inertial":
        return State.from_arrays(grid, amplitude, 0.0, 0.0)
    if name == "mode-decay":
        return State.from_arrays(grid, 0.0, amplitude * np.sin(2 * np.pi * X), 0.0)
    if name == "thermal":
        T = amplitude * np.sin(np.pi * Z / grid.h) * np.sin(2 * np.pi * X)
        return symmetrize(State.from_arrays(grid, 0.0, 0.0, T))
    if name == "random-H":
        return random_h(grid, seed=seed, amplitude=amplitude, kmax=kmax)
    raise ValueError(f"unknown preset {name!r}; choose from {PRESETS}")

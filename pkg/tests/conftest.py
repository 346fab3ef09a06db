"""Shared fixtures and independent oracles for the test suite."""

import numpy as np
import pytest

from primeq import Params, make_grid
from primeq.presets import random_h


@pytest.fixture(scope="session")
def grid16():
    return make_grid(16, 16, 16, 1.0)


@pytest.fixture(scope="session")
def grid32():
    return make_grid(32, 32, 32, 1.0)


@pytest.fixture
def params():
    return Params(h=1.0, f0=0.7, nu_h=0.5, nu_z=0.5, kappa_h=0.3, eps=0.0)


def seeded_state(grid, seed, amplitude=0.5, kmax=3):
    return random_h(grid, seed=seed, amplitude=amplitude, kmax=kmax)


def band_limited(grid, seed, kmax=4):
    """Real random field with integer modes |m| <= kmax on every axis."""
    rng = np.random.default_rng(seed)
    X, Y, Z = grid.mesh
    out = np.zeros(grid.shape)
    kz = np.pi / grid.h
    for mx in range(-kmax, kmax + 1):
        for my in range(-kmax, kmax + 1):
            for mz in range(0, kmax + 1):
                a, b = rng.standard_normal(2) / (1 + mx * mx + my * my + mz * mz)
                ph = 2 * np.pi * (mx * X + my * Y) + mz * kz * Z
                out += a * np.cos(ph) + b * np.sin(ph)
    return out


def np_deriv(a, axis, grid, order=1):
    """Spectral derivative with numpy's complex FFT (independent of the package).

    Odd orders drop the Nyquist mode, matching the real-valued convention.
    """
    n = a.shape[axis]
    L = 1.0 if axis < 2 else 2 * grid.h
    m = np.fft.fftfreq(n, 1.0 / n)
    k = 2 * np.pi * m / L
    if order % 2:
        k = np.where(np.abs(m) == n // 2, 0.0, k)
    shape = [1, 1, 1]
    shape[axis] = n
    sym = ((1j * k) ** order).reshape(shape)
    return np.real(np.fft.ifftn(sym * np.fft.fftn(a)))


def np_antiderivative(a, grid):
    """int_{-h}^z a ds for fields with zero z-mean, via numpy's FFT along z."""
    n = a.shape[2]
    k = np.fft.fftfreq(n, 1.0 / n) * np.pi / grid.h
    ah = np.fft.fft(a, axis=2)
    assert np.abs(ah[:, :, 0]).max() < 1e-10 * (1 + np.abs(ah).max())
    inv = np.zeros_like(k, dtype=complex)
    inv[1:] = 1.0 / (1j * k[1:])
    F = np.real(np.fft.ifft(ah * inv, axis=2))
    return F - F[:, :, :1]


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)

"""Integrating-factor Runge-Kutta time stepping and the run loop.

Diffusion is diagonal in Fourier space and integrated exactly through
exp(L t); advection, rotation, buoyancy and the pressure projection are
explicit (Lawson form of the underlying RK scheme, so only decaying
exponentials appear).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .dynamics import explicit_hat, linear_symbols, project_hat
from .fields import Params, State, _sobolev_sq, diagnose_w
from .grid import Field3
from .symmetry import symmetrize

__all__ = [
    "StepConfig",
    "BlowUpError",
    "SCHEMES",
    "Stepper",
    "step",
    "cfl_dt",
    "run",
    "DT_MAX",
]

DT_MAX = 0.1

# (c, A, b) Butcher tableaux of the underlying explicit schemes
SCHEMES = {
    "RK3-IMF": ((0.0, 0.5, 1.0), ((), (0.5,), (-1.0, 2.0)), (1 / 6, 2 / 3, 1 / 6)),
    "RK2-IMF": ((0.0, 1.0), ((), (1.0,)), (0.5, 0.5)),
    "EULER-IMF": ((0.0,), ((),), (1.0,)),
}


class BlowUpError(RuntimeError):
    """Non-finite state or H2 norm above the guard."""

    def __init__(self, time: float, reason: str):
        super().__init__(f"blow-up at t={time:.17g}: {reason}")
        self.time = time
        self.reason = reason


@dataclass(frozen=True)
class StepConfig:
    """Time integration settings.

    ``dt=None`` selects CFL-controlled steps.  ``resymmetrize_every=0``
    never projects onto the invariant subspace.
    """

    dt: float | None = None
    t_end: float = 1.0
    cfl: float = 0.5
    scheme: str = "RK3-IMF"
    resymmetrize_every: int = 0
    blowup_guard: float = 1e8
    dt_max: float = DT_MAX

    def __post_init__(self):
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be > 0")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}; choose from {sorted(SCHEMES)}")
        if self.resymmetrize_every < 0:
            raise ValueError("resymmetrize_every must be >= 0")


class Stepper:
    """Advance spectral coefficients ``(v1h, v2h, Th)`` with a fixed scheme.

    Exponential factors are cached per step size, so repeated steps with
    the same dt cost only the explicit tendency evaluations.
    """

    def __init__(self, grid, params: Params, scheme: str = "RK3-IMF"):
        params.check_grid(grid)
        self.grid = grid
        self.params = params
        self.c, self.A, self.b = SCHEMES[scheme]
        self.Lv, self.LT = linear_symbols(grid, params)
        self._cache: dict[float, dict[float, tuple[np.ndarray, np.ndarray]]] = {}

    def _factors(self, dt: float) -> dict[float, tuple[np.ndarray, np.ndarray]]:
        if dt not in self._cache:
            taus = {ci for ci in self.c} | {1.0 - ci for ci in self.c}
            taus |= {ci - cj for ci in self.c for cj in self.c if ci >= cj}
            self._cache = {dt: {tau: (np.exp(self.Lv * tau * dt), np.exp(self.LT * tau * dt))
                                for tau in taus}}
        return self._cache[dt]

    def explicit(self, u):
        n1, n2, nT, _ = explicit_hat(self.grid, self.params, *u)
        return n1, n2, nT

    def __call__(self, u, dt: float):
        E = self._factors(dt)
        c, A, b = self.c, self.A, self.b
        K = []
        for i, ci in enumerate(c):
            ev, et = E[ci]
            stage = [ev * u[0], ev * u[1], et * u[2]]
            for j, aij in enumerate(A[i]):
                if aij == 0.0:
                    continue
                fv, ft = E[ci - c[j]]
                stage[0] = stage[0] + dt * aij * fv * K[j][0]
                stage[1] = stage[1] + dt * aij * fv * K[j][1]
                stage[2] = stage[2] + dt * aij * ft * K[j][2]
            project_hat(self.grid, stage[0], stage[1])
            K.append(self.explicit(stage))
        ev, et = E[1.0]
        out = [ev * u[0], ev * u[1], et * u[2]]
        for j, bj in enumerate(b):
            fv, ft = E[1.0 - c[j]]
            out[0] = out[0] + dt * bj * fv * K[j][0]
            out[1] = out[1] + dt * bj * fv * K[j][1]
            out[2] = out[2] + dt * bj * ft * K[j][2]
        project_hat(self.grid, out[0], out[1])
        return tuple(out)


def _h2_norm_hat(grid, u) -> float:
    return math.sqrt(sum(_sobolev_sq(Field3(grid, a, True), 2) for a in u))


def _check_blowup(grid, u, time: float, guard: float) -> None:
    if not all(np.isfinite(a).all() for a in u):
        raise BlowUpError(time, "non-finite values")
    h2 = _h2_norm_hat(grid, u)
    if h2 > guard:
        raise BlowUpError(time, f"H2 norm {h2:.3e} exceeds guard {guard:.3e}")


def step(s: State, p: Params, c: StepConfig, dt: float, step_index: int | None = None) -> State:
    """Advance ``s`` by one step of size ``dt``.

    ``step_index`` (1-based) is only used to decide resymmetrisation.
    """
    if not dt > 0:
        raise ValueError("dt must be > 0")
    g = s.grid
    u = Stepper(g, p, c.scheme)(s.spectral(), dt)
    t = s.time + dt
    _check_blowup(g, u, t, c.blowup_guard)
    out = State.from_spectral(g, *u, time=t)
    if step_index and c.resymmetrize_every and step_index % c.resymmetrize_every == 0:
        out = symmetrize(out)
    return out


def cfl_dt(s: State, p: Params, c: StepConfig) -> float:
    """Advective CFL step, capped at ``c.dt_max``."""
    g = s.grid
    w = diagnose_w(s.v1, s.v2).data
    rates = (np.abs(s.v1.data).max() / g.dx, np.abs(s.v2.data).max() / g.dy,
             np.abs(w).max() / g.dz)
    rate = max(rates)
    if rate == 0:
        return c.dt_max
    return min(c.cfl / rate, c.dt_max)


Sink = Callable[[State], None]


def run(s0: State, p: Params, c: StepConfig, sinks: Iterable[Sink] = (),
        every: int = 1) -> State:
    """Integrate from ``s0.time`` to ``c.t_end``.

    Every sink is called with the initial state, every ``every`` steps, and
    with the final state.  Sinks exposing ``flush()`` are flushed on exit,
    including when a ``BlowUpError`` propagates.
    """
    if c.t_end < s0.time:
        raise ValueError("t_end precedes the initial time")
    sinks = list(sinks)
    g = s0.grid
    stepper = Stepper(g, p, c.scheme)

    def emit(state):
        for sink in sinks:
            sink(state)

    try:
        state = s0
        emit(state)
        u = state.spectral()
        t0 = t = s0.time
        n = 0
        last_emitted = True

        def finished(t):
            return t >= c.t_end or math.isclose(t, c.t_end, rel_tol=0,
                                                abs_tol=1e-12 * max(1.0, abs(c.t_end)))

        while not finished(t):
            dt = cfl_dt(state, p, c) if c.dt is None else c.dt
            remaining = c.t_end - t
            if dt >= remaining * (1 - 1e-12):
                dt = remaining
            u = stepper(u, dt)
            n += 1
            if dt == remaining:
                t = c.t_end
            elif c.dt is not None:
                # fixed steps: avoid accumulating round-off in the clock
                t = t0 + n * c.dt
            else:
                t = t + dt
            _check_blowup(g, u, t, c.blowup_guard)
            resym = c.resymmetrize_every and n % c.resymmetrize_every == 0
            last_emitted = n % every == 0
            if c.dt is None or last_emitted or resym or finished(t):
                state = State.from_spectral(g, *u, time=t)
                if resym:
                    state = symmetrize(state)
                    u = state.spectral()
            if last_emitted:
                emit(state)
        if not last_emitted:
            emit(state)
        return state
    finally:
        for sink in sinks:
            flush = getattr(sink, "flush", None)
            if flush is not None:
                flush()

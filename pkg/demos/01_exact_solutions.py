"""Exact solutions as a first sanity check of the time stepper.

Two closed-form solutions of the hydrostatic system:

* a uniform current under rotation turns on the inertial circle,
  v(t) = U (cos f0 t, -sin f0 t), untouched by viscosity;
* a single shear mode v2 = sin(2 pi x) decays as exp(-4 pi^2 nu t) and the
  integrating factor reproduces that to round-off for any step size.

Run with ``python3 demos/01_exact_solutions.py``.
"""

import math

import numpy as np

from primeq import Params, StepConfig, make_grid, norm, run
from primeq.presets import initial_state

grid = make_grid(16, 16, 16, 1.0)

# --- inertial oscillation -----------------------------------------------------
# One full period 2 pi / f0 brings the current back to its start; the error
# should shrink eightfold per halving of dt for the third-order scheme.
print("inertial oscillation, one period, f0 = 1")
print(f"{'steps':>8} {'rel. error':>12} {'rate':>6}")
rotating = Params(h=1.0, f0=1.0)
s0 = initial_state("inertial", grid, amplitude=1.0)
previous = None
for n in (25, 50, 100, 200, 400):
    out = run(s0, rotating, StepConfig(dt=2 * math.pi / n, t_end=2 * math.pi))
    err = math.hypot(out.v1.values[0, 0, 0] - 1.0, out.v2.values[0, 0, 0])
    rate = "" if previous is None else f"{math.log2(previous / err):6.2f}"
    print(f"{n:8d} {err:12.3e} {rate:>6}")
    previous = err

# --- viscous decay ------------------------------------------------------------
# Diffusion is integrated exactly, so even a single huge step is exact.
print("\nviscous decay of v2 = sin(2 pi x), nu = 1")
viscous = Params(h=1.0, f0=0.0, nu_h=1.0, nu_z=1.0)
m0 = initial_state("mode-decay", grid, amplitude=1.0)
for dt in (0.001, 0.01, 0.1):
    out = run(m0, viscous, StepConfig(dt=dt, t_end=0.1))
    ratio = norm(out.v2) / norm(m0.v2)
    print(f"dt = {dt:5.3f}: |v(0.1)| / |v(0)| = {ratio:.15f}  "
          f"exact {math.exp(-4 * np.pi**2 * 0.1):.15f}")

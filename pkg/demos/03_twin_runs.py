"""Continuous dependence on the initial data, measured with twin runs.

Each twin pair starts from the same random state, the second one nudged by
delta times a fixed smooth direction.  In the linear regime the squared
difference d(t) scales with delta^2, so d(t)/d(0) should not depend on delta.
The fitted constant C is the smallest power of two for which
C exp(C int phi) d(0) stays above the measured d(t).

Run with ``python3 demos/03_twin_runs.py [N]`` (default N = 16).
"""

import sys

from primeq.config import RunConfig
from primeq.experiments import twin_experiment

n = int(sys.argv[1]) if len(sys.argv) > 1 else 16
cfg = RunConfig(nx=n, ny=n, nz=n, t_end=0.5, nu_h=0.05, nu_z=0.05, kappa_h=0.05, f0=1.0,
                amplitude=2.0)

print(f"{'delta':>8} {'d(0)/delta^2':>14} {'d(T)/d(0)':>12} {'C':>6} {'max phi':>9}")
for delta in (1e-6, 1e-5, 1e-4, 1e-3, 1e-2):
    rep = twin_experiment(cfg, delta)
    print(f"{delta:8.0e} {rep.d0 / delta**2:14.6f} {rep.d[-1] / rep.d0:12.6f} {rep.C:6g} "
          f"{rep.phi.max():9.2f}")
print("\nlarger delta leaves the linear regime; the amplification then drifts.")

"""Removing the vertical heat diffusion: the eps -> 0 limit.

The same initial data is integrated with eps d2T/dz2 added for several eps.
The distance D(eps) to the eps = 0 run should vanish linearly in eps, and
the H2 panel should not depend on eps in any significant way.

Run with ``python3 demos/04_epsilon_limit.py [N]`` (default N = 16).
"""

import sys

import numpy as np

from primeq.config import RunConfig
from primeq.experiments import epsilon_experiment

n = int(sys.argv[1]) if len(sys.argv) > 1 else 16
cfg = RunConfig(nx=n, ny=n, nz=n, t_end=0.25, nu_h=0.05, nu_z=0.05, kappa_h=0.05, f0=1.0,
                amplitude=2.0)
eps_list = [0.0, 1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
rep = epsilon_experiment(cfg, eps_list)

print(f"{'eps':>8} {'D(eps)':>12} {'D/eps':>10} {'sup H2':>10} {'|T|_2 final':>12}")
for eps, D, sup, rec in zip(rep.eps, rep.D, rep.sup_h2, rep.panels):
    ratio = f"{D / eps:10.4f}" if eps > 0 else f"{'':>10}"
    print(f"{eps:8.0e} {D:12.4e} {ratio} {sup:10.2f} {rec.L2_T:12.6f}")
print(f"\nlog-log slope {rep.loglog_slope:.3f}, uniform-bound ratio {rep.uniform_ratio:.4f}")
print(f"D increasing: {bool(np.all(np.diff(rep.D) > 0))}")

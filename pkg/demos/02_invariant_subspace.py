"""What the solver preserves while a random smooth state evolves.

Starting from seeded band-limited data with v even and T odd in z, this demo
prints the monitored diagnostics every few steps:

* the symmetry residual (the parity classes are never re-imposed);
* the divergence of the column-mean velocity and w at the top lid;
* the semi-discrete energy budget residual and the u = dv/dz equation residual;
* the H2 panel |v|^2_H2 + |T|^2_H2 as a rough regularity gauge.

Run with ``python3 demos/02_invariant_subspace.py [N]`` (default N = 24).
"""

import sys

import numpy as np

from primeq import Params, StepConfig, make_grid, run
from primeq.estimates import h2_panel, norm_panel
from primeq.fields import horizontal_divergence_mean, norm2d, w_boundary
from primeq.presets import random_h

n = int(sys.argv[1]) if len(sys.argv) > 1 else 24
grid = make_grid(n, n, n, 1.0)
params = Params(h=1.0, f0=1.0, nu_h=0.05, nu_z=0.05, kappa_h=0.05)
s0 = random_h(grid, seed=1, amplitude=2.0)

print(f"{'t':>6} {'|v|':>7} {'|T|':>7} {'sym':>9} {'div vbar':>9} {'w(top)':>9} "
      f"{'energy':>9} {'u-eq':>9} {'H2':>9}")


def show(state):
    rec = norm_panel(state, params)
    div = norm2d(horizontal_divergence_mean(state.v1, state.v2), grid)
    top = np.abs(w_boundary(state.v1, state.v2)[1]).max()
    print(f"{rec.time:6.3f} {rec.L2_v:7.4f} {rec.L2_T:7.4f} {rec.symmetry_residual:9.1e} "
          f"{div:9.1e} {top:9.1e} {rec.energy_residual:9.1e} {rec.u_eq_residual:9.1e} "
          f"{h2_panel(state):9.2f}")


run(s0, params, StepConfig(t_end=1.0), [show], every=10)

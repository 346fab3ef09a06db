"""Pseudo-spectral primitive equations with horizontal eddy diffusivity."""

from .grid import (Field3, Grid, GridError, RepresentationError, dealias, make_grid,
                   spectral_derivative, transform, vertical_antiderivative)
from .fields import (DiagRecord, Params, State, diagnose_w, fluctuation, norm,
                     reconstruct_pressure, vertical_average)
from .symmetry import (CompatibilityError, Parity, extend, restrict, symmetrize,
                       symmetry_residual)
from .dynamics import (ConstraintError, SolvabilityError, Tendency, barotropic_project,
                       coriolis, solve_surface_pressure, tendency)
from .timestepper import BlowUpError, StepConfig, cfl_dt, run, step
from .estimates import (GronwallReport, InequalityReport, energy_identity_residual,
                        gronwall_envelope, inequality_ratio, norm_panel, phi,
                        u_equation_residual)

__version__ = "0.1.0"

__all__ = [
    "Field3", "Grid", "GridError", "RepresentationError", "dealias", "make_grid",
    "spectral_derivative", "transform", "vertical_antiderivative",
    "DiagRecord", "Params", "State", "diagnose_w", "fluctuation", "norm",
    "reconstruct_pressure", "vertical_average",
    "CompatibilityError", "Parity", "extend", "restrict", "symmetrize", "symmetry_residual",
    "ConstraintError", "SolvabilityError", "Tendency", "barotropic_project", "coriolis",
    "solve_surface_pressure", "tendency",
    "BlowUpError", "StepConfig", "cfl_dt", "run", "step",
    "GronwallReport", "InequalityReport", "energy_identity_residual", "gronwall_envelope",
    "inequality_ratio", "norm_panel", "phi", "u_equation_residual",
]

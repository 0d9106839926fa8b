"""Spectral contour dynamics for the one-phase Muskat problem."""

from .conformal_splat import (
    TildeState,
    map_P,
    map_P_inv,
    q_factor,
    tilde_rt_energy,
    tilde_sigma,
    tilde_step_rk4,
    tilde_velocity,
    transform_curve,
    untransform,
)
from .diagnostics import (
    DiagRecord,
    diagnose,
    h_integrator,
    rayleigh_taylor,
    rt_energy,
    sigma_min,
    strip_width,
)
from .dynamics import (
    EvolutionOptions,
    evolve,
    galerkin_project,
    integrate,
    mollify,
    step_rk4,
    tangential_speed,
    velocity,
)
from .errors import MuskatError
from .scenarios import scenario
from .singular_integrals import apply_T, birkhoff_rott, br_direct_oracle
from .spectral_curve import (
    PeriodicCurve,
    StripSpec,
    arc_chord,
    derivative,
    hilbert,
    lambda_pow,
    sobolev_strip_norm,
    strip_evaluate,
)
from .vorticity_solver import FluidParams, SolverOptions, assemble_dense_T, solve_vorticity

__all__ = [
    "apply_T",
    "arc_chord",
    "assemble_dense_T",
    "birkhoff_rott",
    "br_direct_oracle",
    "derivative",
    "diagnose",
    "DiagRecord",
    "EvolutionOptions",
    "evolve",
    "FluidParams",
    "galerkin_project",
    "h_integrator",
    "hilbert",
    "integrate",
    "lambda_pow",
    "map_P",
    "map_P_inv",
    "mollify",
    "MuskatError",
    "PeriodicCurve",
    "q_factor",
    "rayleigh_taylor",
    "rt_energy",
    "scenario",
    "sigma_min",
    "sobolev_strip_norm",
    "solve_vorticity",
    "SolverOptions",
    "step_rk4",
    "strip_evaluate",
    "strip_width",
    "StripSpec",
    "tangential_speed",
    "tilde_rt_energy",
    "tilde_sigma",
    "tilde_step_rk4",
    "tilde_velocity",
    "TildeState",
    "transform_curve",
    "untransform",
    "velocity",
]

__version__ = "0.1.0"

"""vesflow: phase-field vesicle membranes in an incompressible flow.

A cell-centered/MAC finite-difference solver for the coupled bending-
energy gradient flow of a conserved phase field and the Navier-Stokes
equations, built so the discrete system inherits the structure of the
continuous one: exact phase-average conservation, an energy balance with
a per-step residual that vanishes linearly in dt, and trajectories that
settle onto critical points of the bending energy.
"""

from vesflow.energy import (
    EnergyBreakdown,
    PhysParams,
    bending_energy,
    chemical_potential,
    g_bar,
    g_of,
    potential,
    potential_d1,
    potential_d2,
    potential_d3,
    surface_area,
    total_energy,
    z_of,
)
from vesflow.flow import NsStepParams, convective_term, elastic_force, ns_step, project
from vesflow.grid import FaceVelocity, Grid, ScalarField
from vesflow.operators import (
    advect,
    bilaplacian,
    dct_forward,
    dct_inverse,
    divergence,
    gradient,
    inner,
    laplacian,
    mean,
    norm_hk,
    norm_l2,
    poisson_neumann,
    seminorm_h1,
)
from vesflow.phase import ChStepParams, ch_step, stable_dt_hint
from vesflow.runner import RunResult, run
from vesflow.simulation import (
    ConvergenceReport,
    DissipationLedger,
    SimState,
    detect_steady,
    find_equilibrium,
    higher_norm_watch,
    lojasiewicz_estimate,
    make_state,
    step_coupled,
)

__version__ = "0.1.0"

__all__ = [
    "Grid",
    "ScalarField",
    "FaceVelocity",
    "PhysParams",
    "EnergyBreakdown",
    "ChStepParams",
    "NsStepParams",
    "SimState",
    "DissipationLedger",
    "ConvergenceReport",
    "RunResult",
    "laplacian",
    "bilaplacian",
    "dct_forward",
    "dct_inverse",
    "poisson_neumann",
    "gradient",
    "divergence",
    "advect",
    "inner",
    "mean",
    "norm_l2",
    "seminorm_h1",
    "norm_hk",
    "potential",
    "potential_d1",
    "potential_d2",
    "potential_d3",
    "surface_area",
    "chemical_potential",
    "bending_energy",
    "g_of",
    "g_bar",
    "z_of",
    "total_energy",
    "ch_step",
    "stable_dt_hint",
    "elastic_force",
    "convective_term",
    "ns_step",
    "project",
    "step_coupled",
    "detect_steady",
    "find_equilibrium",
    "lojasiewicz_estimate",
    "higher_norm_watch",
    "make_state",
    "run",
]

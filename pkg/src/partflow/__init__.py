"""Particle solver for stationary transport equations on a tilted plane."""

__version__ = "0.1.0"

from .fields import (
    AnalyticSurface,
    DryInflowError,
    FieldSet,
    divergence_grid,
    flat_surface,
    longitudinal_cosine_surface,
    make_field,
    make_tilted_plane_field,
    ridge_surface,
    transverse_cosine_surface,
)
from .grid import DomainSpec, ScalarGrid, grad_fd, interp_bilinear, laplacian_fd
from .kernel import KernelSpec, kernel_eval, kernel_gradient_bound
from .neighbor import CellGrid, build_cell_list, neighbors
from .particles import (
    Particle,
    ParticleStore,
    PositivityError,
    SolverParams,
    Trajectory,
    TrajectoryError,
    characteristic_oracle,
    euler_step,
    seed_particles,
    trace_all,
    trace_trajectory,
)
from .reconstruct import evaluate, evaluate_bruteforce, evaluate_grid, partition_of_unity
from .reference import ErrorRecord, exact_flat, linf_relative_error, solve_fv_march

__all__ = [name for name in dir() if not name.startswith("_")]

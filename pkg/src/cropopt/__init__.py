"""Optimal crop-field protection zones on triangular meshes."""
from .estimators import InterventionOptimizer
from .exceptions import (AssemblyError, AsymmetricMeshError, BudgetError, ConfigError,
                         CropOptError, DimensionError, DivergenceError, DomainError,
                         InvalidSpecError, ParameterError, SolverError)
from .fem import (assemble_load, assemble_mass, assemble_stiffness, integrate_nodal,
                  solve_screened_poisson)
from .mesh import (DomainSpec, TriMesh, benchmark_domain, generate_mesh, measure_indicator,
                   reflect_indicator)
from .model import (ProblemParams, cost_J, gradient_density, phi_bar, second_diff,
                    second_kernel, solve_state, switching_w)
from .oracle import OracleResult, make_annulus_control, random_bangbang, solve_exact
from .symmetry import (GridIndicator, check_axis_symmetry, check_directional_convexity,
                       check_star_shaped, rasterize_control, schwarz_radius,
                       steiner_symmetrize)
from .uzawa import RunHistory, UzawaConfig, budget_residual, project_box, run_uzawa

__version__ = "0.1.0"

__all__ = [
    "AssemblyError",
    "AsymmetricMeshError",
    "BudgetError",
    "ConfigError",
    "CropOptError",
    "DimensionError",
    "DivergenceError",
    "DomainError",
    "DomainSpec",
    "GridIndicator",
    "InterventionOptimizer",
    "InvalidSpecError",
    "OracleResult",
    "ParameterError",
    "ProblemParams",
    "RunHistory",
    "SolverError",
    "TriMesh",
    "UzawaConfig",
    "assemble_load",
    "assemble_mass",
    "assemble_stiffness",
    "benchmark_domain",
    "budget_residual",
    "check_axis_symmetry",
    "check_directional_convexity",
    "check_star_shaped",
    "cost_J",
    "generate_mesh",
    "gradient_density",
    "integrate_nodal",
    "make_annulus_control",
    "measure_indicator",
    "phi_bar",
    "project_box",
    "random_bangbang",
    "rasterize_control",
    "reflect_indicator",
    "run_uzawa",
    "schwarz_radius",
    "second_diff",
    "second_kernel",
    "solve_exact",
    "solve_screened_poisson",
    "solve_state",
    "steiner_symmetrize",
    "switching_w",
]

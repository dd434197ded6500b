"""Joint two-way graph cut and partition matching on a single graph."""

from .affinity import build_affinity, build_similarity, laplacian, tau
from .cut import balanced_cut, cut_update, sign_discretize, spectral_cut
from .graph import Graph, GroundTruth, SolverConfig, check_feasible, load_graph, save_graph
from .hungarian import solve_assignment
from .ibgp import gradient, ibgp_gm, ibgp_solve
from .kernels import BACKEND
from .metrics import cut_accuracy, matching_accuracy
from .projections import (
    bregman_project_zero_diag,
    center_c1_doubly,
    center_c1_symmetric,
    project_direction,
    truncate_c2,
)
from .solver import cutmatch_solve, discretize, initialize, objective
from .synthetic import GmPairConfig, SyntheticConfig, delaunay, generate_gm_pair, generate_joint

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Graph",
    "GroundTruth",
    "SolverConfig",
    "SyntheticConfig",
    "GmPairConfig",
    "balanced_cut",
    "bregman_project_zero_diag",
    "build_affinity",
    "build_similarity",
    "center_c1_doubly",
    "center_c1_symmetric",
    "check_feasible",
    "cut_accuracy",
    "cut_update",
    "cutmatch_solve",
    "delaunay",
    "discretize",
    "generate_gm_pair",
    "generate_joint",
    "gradient",
    "ibgp_gm",
    "ibgp_solve",
    "initialize",
    "laplacian",
    "load_graph",
    "matching_accuracy",
    "objective",
    "project_direction",
    "save_graph",
    "sign_discretize",
    "solve_assignment",
    "spectral_cut",
    "tau",
    "truncate_c2",
]

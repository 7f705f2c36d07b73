"""Homogeneous solutions of det(D^2 u) (sum du/dt_i)^(n-d) = c on the
octant, residual evaluation and extension to all of R^d."""

from .solution import (AnsatzProblem, AnsatzSolution, ClosedFormD1, SimplexGrid, SolverConfig,
                       solution_from_dict)
from .solvers import (solve_closed_form_d1, solve_bvp, pde_residual, boundary_residual,
                      interior_test_points, face_probe_points)
from .extension import ExtensionResult, extend_to_rd

__all__ = [
    "AnsatzProblem", "AnsatzSolution", "ClosedFormD1", "SimplexGrid", "SolverConfig",
    "solution_from_dict", "solve_closed_form_d1", "solve_bvp", "pde_residual",
    "boundary_residual", "interior_test_points", "face_probe_points",
    "ExtensionResult", "extend_to_rd",
]

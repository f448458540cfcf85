"""Unit-cube test problem: mesh, random diffusion field, assembly and Newton."""

from .assembly import (QP_REF, QP_WEIGHT, AssembledSystem, PdeCoefficients, apply_dirichlet,
                       assemble, dirichlet_data, reference_basis)
from .config import ProblemConfig
from .kl import KlBracketError, KlField, Mode1D, kl_build, kl_evaluate, modes_1d
from .mesh import CORNER_OFFSETS, StructuredMesh, build_mesh
from .newton import NewtonConvergenceError, NewtonResult, default_linear_solver, newton_solve

__all__ = [
    "CORNER_OFFSETS", "QP_REF", "QP_WEIGHT", "AssembledSystem", "KlBracketError", "KlField",
    "Mode1D", "NewtonConvergenceError", "NewtonResult", "PdeCoefficients", "ProblemConfig",
    "StructuredMesh", "apply_dirichlet", "assemble", "build_mesh", "default_linear_solver",
    "dirichlet_data", "kl_build", "kl_evaluate", "modes_1d", "newton_solve", "reference_basis",
]

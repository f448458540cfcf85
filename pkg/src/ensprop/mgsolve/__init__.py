"""Multigrid-preconditioned conjugate gradients over plain or ensemble scalars."""

from .aggregation import aggregate, galerkin_product, prolongator, transpose_pattern
from .chebyshev import ChebyshevParams, ZeroDiagonalError, chebyshev_apply, power_lambda_max
from .config import SolverConfig
from .hierarchy import (CoarseningStagnationError, MgHierarchy, MgLevel,
                        as_preconditioner, build_hierarchy, vcycle)
from .pcg import (PcgError, PcgIndefiniteError, PcgMaxIterError, PcgResult,
                  mg_pcg_solve, pcg_solve, write_residual_history)

__all__ = [
    "ChebyshevParams", "CoarseningStagnationError", "MgHierarchy", "MgLevel",
    "PcgError", "PcgIndefiniteError", "PcgMaxIterError", "PcgResult", "SolverConfig",
    "ZeroDiagonalError", "aggregate", "as_preconditioner", "build_hierarchy",
    "chebyshev_apply", "galerkin_product", "mg_pcg_solve", "pcg_solve",
    "power_lambda_max", "prolongator", "transpose_pattern", "vcycle",
    "write_residual_history",
]

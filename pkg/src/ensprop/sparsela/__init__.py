"""Sparse matrices and vectors generic over the scalar type."""

from .crs import (BlockEnsembleCrs, CrsMatrix, GraphMismatchError,
                  from_block_layout, repack, to_block_layout, unpack)
from .mmio import (read_ensemble_matrix_market, read_matrix_market,
                   write_ensemble_matrix_market, write_matrix_market)
from .ops import (crs_mat_vec_generic, dot_componentwise, dot_coupled,
                  ensemble_size, norm2_coupled, spmv, spmv_ensemble_commuted,
                  spmv_ensemble_outer, spmv_scalar, spmv_shared, vec_update)

__all__ = [
    "BlockEnsembleCrs", "CrsMatrix", "GraphMismatchError",
    "crs_mat_vec_generic", "dot_componentwise", "dot_coupled", "ensemble_size",
    "from_block_layout", "norm2_coupled", "read_ensemble_matrix_market",
    "read_matrix_market", "repack", "spmv", "spmv_ensemble_commuted",
    "spmv_ensemble_outer", "spmv_scalar", "spmv_shared", "to_block_layout", "unpack",
    "vec_update", "write_ensemble_matrix_market", "write_matrix_market",
]

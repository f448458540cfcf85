"""Matrix-vector products, coupled inner products and vector updates.

Dense vectors are plain numpy arrays: ``(n,)`` for doubles and ``(n, s)``
for ensembles in commuted layout.
"""

from __future__ import annotations

import math

import numpy as np

from ..ensemble import EnsembleValue
from . import kernels
from .crs import BlockEnsembleCrs, CrsMatrix


def ensemble_size(x) -> int:
    """Samples per entry of a dense vector (1 for plain doubles)."""
    x = np.asarray(x)
    return x.shape[1] if x.ndim == 2 else 1


def _check_spmv(A: CrsMatrix, x, out):
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[0] != A.num_cols:
        raise ValueError(
            f"dimension mismatch: matrix has {A.num_cols} columns, x has {x.shape[0]} rows")
    if A.values.ndim == 2 and A.values.shape[1:] != x.shape[1:]:
        raise ValueError(
            f"scalar type mismatch: values {A.values.shape[1:]} vs x {x.shape[1:]}")
    shape = (A.num_rows,) + x.shape[1:]
    if out is None:
        out = np.empty(shape)
    elif out.shape != shape:
        raise ValueError(f"out has shape {out.shape}, expected {shape}")
    return x, out


def spmv_scalar(A: CrsMatrix, x, out=None) -> np.ndarray:
    """``z = A x`` for a scalar matrix, rows accumulated in entry order."""
    if A.is_ensemble:
        raise TypeError("spmv_scalar needs a scalar matrix")
    x, out = _check_spmv(A, x, out)
    if x.ndim != 1:
        raise ValueError("spmv_scalar needs a plain vector; see spmv_shared")
    kernels.crs_mat_vec(A.row_map, A.col_entry, A.values, x, out)
    return out


def spmv_ensemble_commuted(A: CrsMatrix, x, out=None) -> np.ndarray:
    """Ensemble ``z = A x`` with the sample loop innermost.

    ``A.values`` is ``(nnz, s)`` and ``x`` is ``(num_cols, s)``.  The graph
    is traversed once for all samples.
    """
    if not A.is_ensemble:
        raise TypeError("spmv_ensemble_commuted needs an ensemble matrix")
    x, out = _check_spmv(A, x, out)
    kernels.ensemble_crs_mat_vec(A.row_map, A.col_entry, A.values, x, out)
    return out


def spmv_shared(A: CrsMatrix, x, out=None) -> np.ndarray:
    """Scalar matrix times ensemble vector: the same operator for every sample."""
    if A.is_ensemble:
        raise TypeError("spmv_shared needs a scalar matrix")
    x, out = _check_spmv(A, x, out)
    if x.ndim != 2:
        raise ValueError("spmv_shared needs an (n, s) ensemble vector")
    kernels.shared_crs_mat_vec(A.row_map, A.col_entry, A.values, x, out)
    return out


def spmv_ensemble_outer(A: BlockEnsembleCrs, x, out=None) -> np.ndarray:
    """Ensemble ``z = A x`` in block layout, looping over samples outermost.

    ``x`` is flat with ``s`` consecutive blocks of ``num_cols`` entries;
    the result is flat with ``s`` blocks of ``num_rows`` entries.
    """
    s = A.ensemble_size
    x = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != s * A.num_cols:
        raise ValueError(
            f"dimension mismatch: expected x of length {s * A.num_cols}, got {x.shape[0]}")
    if out is None:
        out = np.empty(s * A.num_rows)
    kernels.outer_ensemble_crs_mat_vec(
        A.row_map, A.col_entry, A.values.reshape(-1), x, out, s, A.num_cols)
    return out


def spmv(A, x, out=None) -> np.ndarray:
    """Generic ``z = A x``: dispatches on the matrix scalar type."""
    if isinstance(A, BlockEnsembleCrs):
        return spmv_ensemble_outer(A, x, out)
    if A.is_ensemble:
        if A.ensemble_size == 1 and np.ndim(x) == 2:
            # a one-sample ensemble is the plain scalar product
            if out is None:
                out = np.empty((A.num_rows, 1))
            spmv_scalar(A.with_values(A.values[:, 0]), np.asarray(x)[:, 0], out[:, 0])
            return out
        return spmv_ensemble_commuted(A, x, out)
    if np.ndim(x) == 2:
        return spmv_shared(A, x, out)
    return spmv_scalar(A, x, out)


def crs_mat_vec_generic(A: CrsMatrix, x) -> list:
    """Reference ``z = A x`` written once for any float-like scalar type.

    Slow pure-Python loop used as an oracle and for flop counting: with an
    ensemble matrix the entries become :class:`EnsembleValue` objects and
    every ``+``/``*`` acts on all samples.
    """
    if A.is_ensemble:
        vals = [EnsembleValue(v) for v in A.values]
        xs = [EnsembleValue(v) for v in np.asarray(x)]
    else:
        vals = A.values.tolist()
        xs = np.asarray(x, dtype=np.float64).tolist()
    rm = A.row_map.tolist()
    ce = A.col_entry.tolist()
    z = []
    for row in range(A.num_rows):
        total = 0.0
        for entry in range(rm[row], rm[row + 1]):
            total += vals[entry] * xs[ce[entry]]
        z.append(total)
    return z


# ---- coupled reductions ----------------------------------------------------

def _check_pair(u, v):
    u = np.ascontiguousarray(u, dtype=np.float64)
    v = np.ascontiguousarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    return u, v


def dot_componentwise(u, v):
    """Per-sample inner products ``u_e . v_e`` as an ``(s,)`` array."""
    u, v = _check_pair(u, v)
    if u.ndim == 1:
        return np.array([kernels.dot_sequential(u, v)])
    return kernels.dot_componentwise(u, v)


def dot_coupled(u, v) -> float:
    """Inner product of two ensemble vectors as one plain float.

    The per-sample products are formed first and then summed over the
    samples left to right, so every sample influences one shared value.
    For plain vectors this is the ordinary dot product.
    """
    u, v = _check_pair(u, v)
    if u.ndim == 1:
        return kernels.dot_sequential(u, v)
    total = 0.0
    for d in kernels.dot_componentwise(u, v).tolist():
        total += d
    return total


def norm2_coupled(u) -> float:
    """``sqrt(dot_coupled(u, u))``."""
    return math.sqrt(dot_coupled(u, u))


def vec_update(y, alpha: float, x, beta: float):
    """In place ``y <- alpha * x + beta * y``; returns ``y``.

    ``alpha`` and ``beta`` are plain floats shared by all samples.  With
    ``beta == 0`` the old contents of ``y`` are ignored.
    """
    if y.shape != np.shape(x):
        raise ValueError(f"dimension mismatch: {y.shape} vs {np.shape(x)}")
    if not y.flags.c_contiguous:
        raise ValueError("y must be C-contiguous")
    flat_y = y.reshape(-1)
    flat_x = np.ascontiguousarray(x, dtype=np.float64).reshape(-1)
    if beta == 0.0:
        np.multiply(flat_x, alpha, out=flat_y)
    elif beta == 1.0:
        kernels.axpy(flat_y, float(alpha), flat_x)
    else:
        kernels.axpby(flat_y, float(alpha), flat_x, float(beta))
    return y

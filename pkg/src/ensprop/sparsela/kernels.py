"""Compiled loops behind the sparse linear algebra.

All kernels accumulate sequentially in index order and are compiled
without fast-math, so sample ``e`` of an ensemble kernel performs exactly
the floating-point operations of the scalar kernel on sample ``e``.
"""

import numba as nb
import numpy as np

_jit = nb.njit(cache=True, nogil=True)


@_jit
def crs_mat_vec(row_map, col_entry, values, x, z):
    for row in range(row_map.shape[0] - 1):
        total = 0.0
        for entry in range(row_map[row], row_map[row + 1]):
            total += values[entry] * x[col_entry[entry]]
        z[row] = total


@_jit
def outer_ensemble_crs_mat_vec(row_map, col_entry, values, x, z, s, num_cols):
    # values: flat (s * nnz), x: flat (s * num_cols), z: flat (s * num_rows)
    num_rows = row_map.shape[0] - 1
    nnz = col_entry.shape[0]
    for e in range(s):
        for row in range(num_rows):
            total = 0.0
            for entry in range(row_map[row], row_map[row + 1]):
                col = col_entry[entry]
                total += values[e * nnz + entry] * x[e * num_cols + col]
            z[e * num_rows + row] = total


@_jit
def ensemble_crs_mat_vec(row_map, col_entry, values, x, z):
    # values: (nnz, s), x: (num_cols, s), z: (num_rows, s)
    s = values.shape[1]
    total = np.empty(s)
    for row in range(row_map.shape[0] - 1):
        for e in range(s):
            total[e] = 0.0
        for entry in range(row_map[row], row_map[row + 1]):
            col = col_entry[entry]
            for e in range(s):
                total[e] += values[entry, e] * x[col, e]
        for e in range(s):
            z[row, e] = total[e]


@_jit
def dot_sequential(u, v):
    total = 0.0
    for i in range(u.shape[0]):
        total += u[i] * v[i]
    return total


@_jit
def dot_componentwise(u, v):
    # (n, s) x (n, s) -> (s,), rows accumulated in order
    s = u.shape[1]
    total = np.zeros(s)
    for i in range(u.shape[0]):
        for e in range(s):
            total[e] += u[i, e] * v[i, e]
    return total


@_jit
def axpby(y, alpha, x, beta):
    # y <- alpha * x + beta * y, on flat views
    for i in range(y.shape[0]):
        y[i] = alpha * x[i] + beta * y[i]


@_jit
def axpy(y, alpha, x):
    for i in range(y.shape[0]):
        y[i] = alpha * x[i] + y[i]


@_jit
def shared_crs_mat_vec(row_map, col_entry, values, x, z):
    # sample-independent matrix (nnz,) applied to an ensemble x (num_cols, s)
    s = x.shape[1]
    total = np.empty(s)
    for row in range(row_map.shape[0] - 1):
        for e in range(s):
            total[e] = 0.0
        for entry in range(row_map[row], row_map[row + 1]):
            col = col_entry[entry]
            a = values[entry]
            for e in range(s):
                total[e] += a * x[col, e]
        for e in range(s):
            z[row, e] = total[e]

"""Greedy root aggregation and the piecewise-constant Galerkin product."""

from __future__ import annotations

import numba as nb
import numpy as np

from ..sparsela.crs import INDEX_DTYPE, OFFSET_DTYPE, CrsMatrix


@nb.njit(cache=True)
def _greedy_aggregates(row_map, col_entry):
    n = row_map.shape[0] - 1
    agg = np.full(n, -1, dtype=np.int64)
    size = np.zeros(n, dtype=np.int64)
    count = 0
    for i in range(n):
        if agg[i] != -1:
            continue
        agg[i] = count
        size[count] = 1
        for entry in range(row_map[i], row_map[i + 1]):
            j = col_entry[entry]
            if j != i and agg[j] == -1:
                agg[j] = count
                size[count] += 1
        count += 1
    # a root that found no free neighbor joins the smallest neighboring aggregate
    merged = np.zeros(count, dtype=np.bool_)
    for i in range(n):
        a = agg[i]
        if size[a] != 1:
            continue
        best = -1
        for entry in range(row_map[i], row_map[i + 1]):
            j = col_entry[entry]
            if j != i and (best == -1 or agg[j] < best):
                best = agg[j]
        if best != -1:
            agg[i] = best
            size[best] += 1
            size[a] = 0
            merged[a] = True
    # renumber, keeping the original order of the surviving aggregates
    new_id = np.empty(count, dtype=np.int64)
    k = 0
    for a in range(count):
        new_id[a] = k
        if not merged[a]:
            k += 1
    for i in range(n):
        agg[i] = new_id[agg[i]]
    return agg, k


def aggregate(A: CrsMatrix):
    """Partition the rows of ``A`` into aggregates using its graph only.

    Rows are visited in ascending order; an unaggregated row becomes a
    root and takes every unaggregated neighbor.  Roots left alone are then
    merged into the neighboring aggregate with the smallest index.  Stored
    zeros count as edges.

    Returns
    -------
    agg : ndarray
        Aggregate index of every row.
    num_aggregates : int
    """
    if A.num_rows == 0:
        raise ValueError("cannot aggregate an empty matrix")
    agg, count = _greedy_aggregates(A.row_map, A.col_entry)
    return agg, int(count)


def prolongator(agg, num_aggregates: int) -> CrsMatrix:
    """Boolean ``P`` with ``P[i, agg[i]] = 1``."""
    n = agg.shape[0]
    return CrsMatrix(np.arange(n + 1, dtype=OFFSET_DTYPE), agg.astype(INDEX_DTYPE),
                     np.ones(n), num_aggregates)


def transpose_pattern(P: CrsMatrix) -> CrsMatrix:
    """``P^T`` for a scalar matrix; columns stay sorted within rows."""
    order = np.argsort(P.col_entry, kind="stable")  # rows are already ascending
    rows = P.row_indices()
    row_map = np.zeros(P.num_cols + 1, dtype=OFFSET_DTYPE)
    np.cumsum(np.bincount(P.col_entry, minlength=P.num_cols), out=row_map[1:])
    return CrsMatrix(row_map, rows[order], P.values[order], P.num_rows)


@nb.njit(cache=True)
def _sum_into(target, values, out):
    for k in range(target.shape[0]):
        t = target[k]
        for e in range(values.shape[1]):
            out[t, e] += values[k, e]


def galerkin_product(A: CrsMatrix, agg, num_aggregates: int) -> CrsMatrix:
    """``P^T A P`` for the aggregation prolongator, without dropping.

    Coarse entry ``(I, J)`` is the sum of the fine entries ``(i, j)`` with
    ``agg[i] = I`` and ``agg[j] = J``, added in fine-entry order, so every
    sample of an ensemble matrix is reduced exactly like a scalar matrix.
    """
    nc = num_aggregates
    keys = agg[A.row_indices()] * nc + agg[A.col_entry]
    coarse_keys, target = np.unique(keys, return_inverse=True)
    rows = coarse_keys // nc
    row_map = np.zeros(nc + 1, dtype=OFFSET_DTYPE)
    np.cumsum(np.bincount(rows, minlength=nc), out=row_map[1:])
    fine = A.values.reshape(A.num_entries, -1)
    out = np.zeros((coarse_keys.shape[0], fine.shape[1]))
    _sum_into(target.reshape(-1), fine, out)
    values = out if A.is_ensemble else out[:, 0]
    return CrsMatrix(row_map, coarse_keys % nc, values, nc)

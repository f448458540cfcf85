"""Compressed-row sparse matrices over plain or ensemble scalars."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..ensemble import EnsembleValue

INDEX_DTYPE = np.int32
OFFSET_DTYPE = np.int64


class GraphMismatchError(ValueError):
    """Matrices that must share one sparsity graph do not."""


def _as_graph(row_map, col_entry):
    return (np.ascontiguousarray(row_map, dtype=OFFSET_DTYPE),
            np.ascontiguousarray(col_entry, dtype=INDEX_DTYPE))


@dataclass
class CrsMatrix:
    """CRS matrix whose values are plain doubles or ensembles.

    ``values`` has shape ``(num_entries,)`` for a scalar matrix and
    ``(num_entries, s)`` for an ensemble matrix in commuted layout, where
    the ``s`` sample values of each nonzero are contiguous.  The graph
    (``row_map``, ``col_entry``) is stored once for all samples.
    """

    row_map: np.ndarray
    col_entry: np.ndarray
    values: np.ndarray
    num_cols: int

    def __post_init__(self):
        self.row_map, self.col_entry = _as_graph(self.row_map, self.col_entry)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        self.num_cols = int(self.num_cols)

    @property
    def num_rows(self) -> int:
        return self.row_map.shape[0] - 1

    @property
    def num_entries(self) -> int:
        return self.col_entry.shape[0]

    @property
    def shape(self):
        return (self.num_rows, self.num_cols)

    @property
    def is_ensemble(self) -> bool:
        return self.values.ndim == 2

    @property
    def ensemble_size(self) -> int:
        return self.values.shape[1] if self.values.ndim == 2 else 1

    def validate(self):
        """Raise ``ValueError`` if the canonical-CRS invariants are broken."""
        rm, ce = self.row_map, self.col_entry
        if rm.ndim != 1 or rm.shape[0] < 1 or rm[0] != 0:
            raise ValueError("row_map must start at 0")
        if np.any(np.diff(rm) < 0):
            raise ValueError("row_map must be nondecreasing")
        if rm[-1] != ce.shape[0]:
            raise ValueError("row_map[-1] must equal num_entries")
        if self.values.shape[0] != ce.shape[0] or self.values.ndim not in (1, 2):
            raise ValueError("values must have one row per entry")
        if ce.size and (ce.min() < 0 or ce.max() >= self.num_cols):
            raise ValueError("column index out of range")
        # strictly increasing columns inside every row
        if ce.size > 1:
            step = np.diff(ce.astype(np.int64))
            row_start = np.zeros(ce.shape[0], dtype=bool)
            row_start[rm[:-1][rm[:-1] < ce.shape[0]]] = True
            if np.any((step <= 0) & ~row_start[1:]):
                raise ValueError("column indices must increase within a row")
        return self

    # ---- conversion -------------------------------------------------------

    def same_graph(self, other: "CrsMatrix") -> bool:
        return (self.num_cols == other.num_cols
                and np.array_equal(self.row_map, other.row_map)
                and np.array_equal(self.col_entry, other.col_entry))

    def with_values(self, values) -> "CrsMatrix":
        """New matrix sharing this graph (arrays are not copied)."""
        return CrsMatrix(self.row_map, self.col_entry, values, self.num_cols)

    def component(self, e: int) -> "CrsMatrix":
        """Scalar matrix of sample ``e`` (a copy)."""
        if not self.is_ensemble:
            if e != 0:
                raise IndexError(e)
            return self.with_values(self.values.copy())
        return self.with_values(self.values[:, e].copy())

    def value(self, row: int, col: int):
        """Stored value at (row, col); 0 when the entry is not stored."""
        lo, hi = self.row_map[row], self.row_map[row + 1]
        k = lo + np.searchsorted(self.col_entry[lo:hi], col)
        if k < hi and self.col_entry[k] == col:
            v = self.values[k]
            return EnsembleValue(v) if self.is_ensemble else float(v)
        return EnsembleValue(np.zeros(self.ensemble_size)) if self.is_ensemble else 0.0

    def row_indices(self) -> np.ndarray:
        """Row index of every stored entry."""
        return np.repeat(np.arange(self.num_rows, dtype=INDEX_DTYPE),
                         np.diff(self.row_map))

    def diagonal(self) -> np.ndarray:
        """Diagonal as ``(n,)`` or ``(n, s)``; missing entries are zero."""
        n = min(self.num_rows, self.num_cols)
        rows = self.row_indices()
        mask = rows == self.col_entry
        d = np.zeros((n,) + self.values.shape[1:])
        d[rows[mask]] = self.values[mask]
        return d

    def to_scipy(self) -> sp.csr_matrix:
        if self.is_ensemble:
            raise TypeError("to_scipy needs a scalar matrix; use component(e)")
        return sp.csr_matrix((self.values, self.col_entry, self.row_map),
                             shape=self.shape)

    def to_dense(self) -> np.ndarray:
        """Dense ``(rows, cols)`` or ``(rows, cols, s)`` array."""
        out = np.zeros(self.shape + self.values.shape[1:])
        out[self.row_indices(), self.col_entry] = self.values
        return out

    @classmethod
    def from_scipy(cls, m) -> "CrsMatrix":
        m = sp.csr_matrix(m, copy=True)
        m.sum_duplicates()
        m.sort_indices()
        return cls(m.indptr, m.indices, m.data, m.shape[1])

    @classmethod
    def from_dense(cls, a, keep_zeros: bool = False) -> "CrsMatrix":
        """Build from a dense array; zeros are not stored unless asked."""
        a = np.asarray(a, dtype=np.float64)
        mask = np.ones(a.shape, bool) if keep_zeros else a != 0
        rows, cols = np.nonzero(mask)
        row_map = np.zeros(a.shape[0] + 1, dtype=OFFSET_DTYPE)
        np.cumsum(np.bincount(rows, minlength=a.shape[0]), out=row_map[1:])
        return cls(row_map, cols, a[rows, cols], a.shape[1])

    @classmethod
    def from_graph(cls, row_map, col_entry, num_cols, ensemble_size=None):
        """Zero-valued matrix on a given graph."""
        nnz = len(col_entry)
        shape = (nnz,) if ensemble_size is None else (nnz, ensemble_size)
        return cls(row_map, col_entry, np.zeros(shape), num_cols)


@dataclass
class BlockEnsembleCrs:
    """Ensemble matrix in the block (sample-outer) layout.

    All samples share one graph; ``values`` has shape ``(s, num_entries)``
    so each sample's values are contiguous, and vectors are flat of length
    ``s * n`` with each sample's unknowns contiguous.
    """

    row_map: np.ndarray
    col_entry: np.ndarray
    values: np.ndarray
    num_cols: int

    def __post_init__(self):
        self.row_map, self.col_entry = _as_graph(self.row_map, self.col_entry)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        if self.values.ndim != 2 or self.values.shape[1] != self.col_entry.shape[0]:
            raise ValueError("values must have shape (s, num_entries)")

    @property
    def num_rows(self) -> int:
        return self.row_map.shape[0] - 1

    @property
    def num_entries(self) -> int:
        return self.col_entry.shape[0]

    @property
    def ensemble_size(self) -> int:
        return self.values.shape[0]

    def block(self, e: int) -> CrsMatrix:
        """Scalar matrix of sample ``e``; values are a view, not a copy."""
        return CrsMatrix(self.row_map, self.col_entry, self.values[e], self.num_cols)


# ---- layout conversion ------------------------------------------------------

def repack(blocks, vectors=None):
    """Interleave ``s`` scalar systems into the commuted ensemble layout.

    Parameters
    ----------
    blocks : sequence of CrsMatrix
        Scalar matrices sharing one graph.
    vectors : sequence of ndarray, optional
        One length-``n`` vector per sample.

    Returns
    -------
    CrsMatrix or (CrsMatrix, ndarray)
        Ensemble matrix with values ``(nnz, s)``; with ``vectors`` also the
        ``(n, s)`` ensemble vector.
    """
    blocks = list(blocks)
    if not blocks:
        raise ValueError("need at least one block")
    first = blocks[0]
    for b in blocks[1:]:
        if not first.same_graph(b):
            raise GraphMismatchError("blocks do not share one sparsity graph")
    values = np.stack([b.values for b in blocks], axis=1)
    A = first.with_values(values)
    if vectors is None:
        return A
    vectors = list(vectors)
    if len(vectors) != len(blocks):
        raise ValueError("need one vector per block")
    return A, np.stack([np.asarray(v, dtype=np.float64) for v in vectors], axis=1)


def unpack(A: CrsMatrix, x=None):
    """Inverse of :func:`repack`."""
    if not A.is_ensemble:
        raise TypeError("unpack needs an ensemble matrix")
    blocks = [A.component(e) for e in range(A.ensemble_size)]
    if x is None:
        return blocks
    x = np.asarray(x)
    return blocks, [x[:, e].copy() for e in range(x.shape[1])]


def to_block_layout(A: CrsMatrix, x=None):
    """Commuted ensemble matrix (and vector) to the block layout."""
    if not A.is_ensemble:
        raise TypeError("need an ensemble matrix")
    B = BlockEnsembleCrs(A.row_map, A.col_entry, A.values.T, A.num_cols)
    if x is None:
        return B
    return B, np.ascontiguousarray(np.asarray(x).T).reshape(-1)


def from_block_layout(B: BlockEnsembleCrs, x=None):
    A = CrsMatrix(B.row_map, B.col_entry, B.values.T, B.num_cols)
    if x is None:
        return A
    s = B.ensemble_size
    return A, np.ascontiguousarray(np.asarray(x).reshape(s, -1).T)

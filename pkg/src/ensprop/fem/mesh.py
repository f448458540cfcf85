"""Uniform hexahedral mesh of the unit cube and its node graph."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ..sparsela.crs import INDEX_DTYPE, OFFSET_DTYPE

# corner a of a cell sits at offset (a & 1, (a >> 1) & 1, (a >> 2) & 1)
CORNER_OFFSETS = np.array([[a & 1, (a >> 1) & 1, (a >> 2) & 1] for a in range(8)])


@dataclass(frozen=True)
class StructuredMesh:
    """``n x n x n`` cells on [0,1]^3 with lexicographic node numbering.

    Node ``(i, j, k)`` has id ``i + (n+1) * (j + (n+1) * k)`` (x fastest),
    and cell ``(i, j, k)`` has id ``i + n * (j + n * k)``.
    """

    cells_per_axis: int

    @property
    def nodes_per_axis(self) -> int:
        return self.cells_per_axis + 1

    @property
    def num_nodes(self) -> int:
        return self.nodes_per_axis ** 3

    @property
    def num_cells(self) -> int:
        return self.cells_per_axis ** 3

    @property
    def h(self) -> float:
        return 1.0 / self.cells_per_axis

    def node_id(self, i, j, k):
        p = self.nodes_per_axis
        return i + p * (j + p * k)

    def cell_ijk(self, cell):
        n = self.cells_per_axis
        return cell % n, (cell // n) % n, cell // (n * n)

    def node_index(self, cell: int, corner: int) -> int:
        """Global node id of local corner ``corner`` of ``cell``."""
        return int(self.cell_nodes[cell, corner])

    @cached_property
    def cell_nodes(self) -> np.ndarray:
        """``(num_cells, 8)`` corner node ids."""
        ci, cj, ck = self.cell_ijk(np.arange(self.num_cells))
        out = np.empty((self.num_cells, 8), dtype=INDEX_DTYPE)
        for a, (di, dj, dk) in enumerate(CORNER_OFFSETS):
            out[:, a] = self.node_id(ci + di, cj + dj, ck + dk)
        return out

    def node_coordinates(self) -> np.ndarray:
        p = self.nodes_per_axis
        ids = np.arange(self.num_nodes)
        ijk = np.stack([ids % p, (ids // p) % p, ids // (p * p)], axis=1)
        return ijk * self.h

    def x_index(self) -> np.ndarray:
        """x-plane index of every node."""
        return np.arange(self.num_nodes) % self.nodes_per_axis

    @cached_property
    def _stencil(self):
        p = self.nodes_per_axis
        ids = np.arange(self.num_nodes)
        i, j, k = ids % p, (ids // p) % p, ids // (p * p)
        nbr = np.full((self.num_nodes, 27), -1, dtype=np.int64)
        o = 0
        # (dk, dj, di) in lexicographic order gives increasing neighbor ids
        for dk in (-1, 0, 1):
            for dj in (-1, 0, 1):
                for di in (-1, 0, 1):
                    ok = ((0 <= i + di) & (i + di < p) & (0 <= j + dj) & (j + dj < p)
                          & (0 <= k + dk) & (k + dk < p))
                    nbr[ok, o] = ids[ok] + di + p * (dj + p * dk)
                    o += 1
        return nbr

    @cached_property
    def graph(self):
        """27-point node adjacency as ``(row_map, col_entry)``."""
        nbr = self._stencil
        valid = nbr >= 0
        row_map = np.zeros(self.num_nodes + 1, dtype=OFFSET_DTYPE)
        np.cumsum(valid.sum(axis=1), out=row_map[1:])
        return row_map, nbr[valid].astype(INDEX_DTYPE)

    @cached_property
    def elem_graph(self) -> np.ndarray:
        """``(num_cells, 8, 8)`` CRS entry index of each element-matrix slot."""
        row_map, _ = self.graph
        pos = np.cumsum(self._stencil >= 0, axis=1) - 1
        d = CORNER_OFFSETS[None, :, :] - CORNER_OFFSETS[:, None, :]  # (a, b, 3)
        offset = (d[..., 2] + 1) * 9 + (d[..., 1] + 1) * 3 + (d[..., 0] + 1)
        rows = self.cell_nodes[:, :, None]
        out = row_map[rows] + pos[rows, offset[None, :, :]]
        return out.astype(INDEX_DTYPE)


def build_mesh(n: int) -> StructuredMesh:
    if int(n) != n or n < 1:
        raise ValueError(f"cells per axis must be a positive integer, got {n}")
    return StructuredMesh(int(n))

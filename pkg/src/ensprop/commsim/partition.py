"""Slab decomposition of the structured mesh along x."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..fem.mesh import StructuredMesh
from ..sparsela.crs import INDEX_DTYPE, OFFSET_DTYPE, CrsMatrix


@dataclass
class RankLayout:
    """Nodes known to one rank.

    ``local_ids`` is the sorted union of owned and ghost nodes, so the
    local numbering preserves the global order.
    """

    rank: int
    planes: tuple                  # owned x-planes [start, stop)
    owned: np.ndarray              # global ids, ascending
    local_ids: np.ndarray          # owned + ghosts, ascending
    owned_local: np.ndarray        # positions of owned nodes in local_ids
    send: dict = field(default_factory=dict)   # neighbor -> global ids to send
    recv: dict = field(default_factory=dict)   # neighbor -> local positions to fill

    @property
    def ghost_local(self) -> np.ndarray:
        return np.concatenate([v for v in self.recv.values()]) if self.recv \
            else np.empty(0, dtype=np.int64)


@dataclass
class SlabPartition:
    mesh: StructuredMesh
    num_ranks: int
    ranks: list

    def plane_counts(self):
        return [r.planes[1] - r.planes[0] for r in self.ranks]

    def distribute(self, x):
        """Owned entries of a global vector; ghost slots start at zero."""
        x = np.asarray(x, dtype=np.float64)
        out = []
        for r in self.ranks:
            loc = np.zeros((r.local_ids.shape[0],) + x.shape[1:])
            loc[r.owned_local] = x[r.owned]
            out.append(loc)
        return out

    def gather(self, xs):
        """Global vector from the owned part of each rank's local vector."""
        first = xs[0]
        out = np.empty((self.mesh.num_nodes,) + first.shape[1:])
        for r, loc in zip(self.ranks, xs):
            out[r.owned] = loc[r.owned_local]
        return out

    def local_matrix(self, A: CrsMatrix, rank: int) -> CrsMatrix:
        """Owned rows of ``A`` with columns renumbered locally.

        The renumbering is monotone, so each row keeps its entry order.
        """
        r = self.ranks[rank]
        starts, stops = A.row_map[r.owned], A.row_map[r.owned + 1]
        counts = stops - starts
        entries = np.concatenate([np.arange(a, b) for a, b in zip(starts, stops)])
        cols = np.searchsorted(r.local_ids, A.col_entry[entries])
        if not np.array_equal(r.local_ids[cols], A.col_entry[entries]):
            raise ValueError("matrix couples nodes beyond one ghost plane")
        row_map = np.zeros(len(r.owned) + 1, dtype=OFFSET_DTYPE)
        np.cumsum(counts, out=row_map[1:])
        return CrsMatrix(row_map, cols.astype(INDEX_DTYPE), A.values[entries],
                         len(r.local_ids))


def partition(mesh: StructuredMesh, p: int) -> SlabPartition:
    """Split the ``n+1`` node planes along x into ``p`` contiguous slabs.

    Lower ranks take the extra plane when ``p`` does not divide ``n+1``.
    Each rank ghosts one plane from each neighbor.
    """
    planes = mesh.nodes_per_axis
    if p < 1 or p > planes:
        raise ValueError(f"need 1 <= p <= {planes} ranks, got {p}")
    base, extra = divmod(planes, p)
    bounds = np.cumsum([0] + [base + (r < extra) for r in range(p)])
    xi = mesh.x_index()
    ranks = []
    for r in range(p):
        lo, hi = int(bounds[r]), int(bounds[r + 1])
        owned = np.flatnonzero((xi >= lo) & (xi < hi))
        ghost_planes = [g for g in (lo - 1, hi) if 0 <= g < planes]
        local_ids = np.flatnonzero((xi >= lo - (lo > 0)) & (xi < hi + (hi < planes)))
        layout = RankLayout(r, (lo, hi), owned, local_ids,
                            np.searchsorted(local_ids, owned))
        for g in ghost_planes:
            nbr = r - 1 if g < lo else r + 1
            ghost_ids = np.flatnonzero(xi == g)
            layout.recv[nbr] = np.searchsorted(local_ids, ghost_ids)
            edge = lo if g < lo else hi - 1
            layout.send[nbr] = np.flatnonzero(xi == edge)
        ranks.append(layout)
    return SlabPartition(mesh, p, ranks)

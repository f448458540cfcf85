"""Multigrid hierarchy setup and the V-cycle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ..sparsela import spmv
from ..sparsela.crs import CrsMatrix
from .aggregation import aggregate, galerkin_product, prolongator, transpose_pattern
from .chebyshev import ChebyshevParams, chebyshev_apply
from .config import SolverConfig


class CoarseningStagnationError(RuntimeError):
    pass


@dataclass
class MgLevel:
    A: CrsMatrix
    P: CrsMatrix | None = None
    R: CrsMatrix | None = None
    smoother: ChebyshevParams | None = None
    level_index: int = 0


@dataclass
class MgHierarchy:
    levels: list
    coarse_lu: list = field(default_factory=list)  # one (lu, piv) per sample

    @property
    def num_levels(self) -> int:
        return len(self.levels)

    @property
    def ensemble(self) -> bool:
        return self.levels[0].A.is_ensemble

    def level_sizes(self):
        return [lvl.A.num_rows for lvl in self.levels]

    def coarse_solve(self, b):
        if b.ndim == 1:
            return scipy.linalg.lu_solve(self.coarse_lu[0], b)
        x = np.empty_like(b)
        for e, lu in enumerate(self.coarse_lu):
            x[:, e] = scipy.linalg.lu_solve(lu, np.ascontiguousarray(b[:, e]))
        return x


def build_hierarchy(A: CrsMatrix, config: SolverConfig | None = None) -> MgHierarchy:
    """Aggregate and coarsen until fewer than ``config.coarse_threshold`` rows.

    Every level gets Chebyshev data; the last level is factored by dense
    LU with partial pivoting, once per sample.  Aggregation depends only on
    the graph, so all samples of an ensemble share ``P`` and ``R``.
    """
    cfg = config or SolverConfig()
    levels = []
    Ak = A
    k = 0
    while Ak.num_rows >= cfg.coarse_threshold:
        agg, nc = aggregate(Ak)
        if nc >= Ak.num_rows:
            raise CoarseningStagnationError(
                f"level {k}: aggregation left {nc} of {Ak.num_rows} rows")
        P = prolongator(agg, nc)
        smoother = ChebyshevParams.setup(Ak, cfg.cheb_degree, cfg.cheb_ratio,
                                         cfg.cheb_boost, cfg.power_iterations)
        levels.append(MgLevel(Ak, P, transpose_pattern(P), smoother, k))
        Ak = galerkin_product(Ak, agg, nc)
        k += 1
    levels.append(MgLevel(Ak, level_index=k))
    dense = Ak.to_dense()
    if Ak.is_ensemble:
        lus = [scipy.linalg.lu_factor(np.ascontiguousarray(dense[:, :, e]))
               for e in range(Ak.ensemble_size)]
    else:
        lus = [scipy.linalg.lu_factor(dense)]
    return MgHierarchy(levels, lus)


def vcycle(hier: MgHierarchy, b, x=None, k: int = 0):
    """One V-cycle for ``A^k x = b``; returns the updated ``x``.

    ``x=None`` means a zero initial guess.  The coarsest level is solved
    directly, so no smoothing happens there.
    """
    if k == hier.num_levels - 1:
        return hier.coarse_solve(b)
    lvl = hier.levels[k]
    x = chebyshev_apply(lvl.A, lvl.smoother, b, x if x is not None else None,
                        x_is_zero=x is None)
    r = b - spmv(lvl.A, x)
    z = vcycle(hier, spmv(lvl.R, r), None, k + 1)
    x = x + spmv(lvl.P, z)
    return chebyshev_apply(lvl.A, lvl.smoother, b, x)


def as_preconditioner(hier: MgHierarchy):
    """``r -> M r``: one V-cycle from a zero guess."""
    return lambda r: vcycle(hier, r)

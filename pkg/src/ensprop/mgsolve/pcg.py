"""Preconditioned conjugate gradients with coupled ensemble reductions."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..sparsela import dot_coupled, norm2_coupled, spmv, vec_update
from ..sparsela.crs import CrsMatrix
from .config import SolverConfig
from .hierarchy import MgHierarchy, as_preconditioner, build_hierarchy


class PcgError(RuntimeError):
    """CG failed; ``history`` holds the coupled residual norms so far."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = list(history)


class PcgMaxIterError(PcgError):
    pass


class PcgIndefiniteError(PcgError):
    pass


@dataclass
class PcgResult:
    x: np.ndarray
    iterations: int
    history: list = field(default_factory=list)  # coupled ||r||, starting at r0

    @property
    def relative_residual(self) -> float:
        return self.history[-1] / self.history[0] if self.history[0] else 0.0


def pcg_solve(A: CrsMatrix, b, M: Callable | None = None, tol: float = 1e-8,
              maxit: int = 1000, x0=None) -> PcgResult:
    """Solve ``A x = b`` by preconditioned CG.

    Every inner product and norm is coupled across the ensemble, so all
    samples share the step lengths and one stopping decision:
    ``norm2_coupled(r) / norm2_coupled(b) < tol``.

    Raises
    ------
    PcgIndefiniteError
        If ``p^T A p <= 0``.
    PcgMaxIterError
        If ``maxit`` iterations do not reach ``tol``.
    """
    b = np.ascontiguousarray(b, dtype=np.float64)
    M = M or (lambda r: r.copy())
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=np.float64)
    bnorm = norm2_coupled(b)
    r = b - spmv(A, x) if x0 is not None else b.copy()
    rnorm = norm2_coupled(r)
    history = [rnorm]
    if bnorm == 0.0:
        return PcgResult(np.zeros_like(b), 0, history)
    if rnorm / bnorm < tol:
        return PcgResult(x, 0, history)
    z = M(r)
    p = z.copy()
    rz = dot_coupled(r, z)
    Ap = np.empty_like(b)
    for it in range(1, maxit + 1):
        spmv(A, p, Ap)
        pAp = dot_coupled(p, Ap)
        if not pAp > 0.0:
            raise PcgIndefiniteError(f"p^T A p = {pAp} at iteration {it}", history)
        alpha = rz / pAp
        vec_update(x, alpha, p, 1.0)
        vec_update(r, -alpha, Ap, 1.0)
        rnorm = norm2_coupled(r)
        history.append(rnorm)
        if rnorm / bnorm < tol:
            return PcgResult(x, it, history)
        z = M(r)
        rz_new = dot_coupled(r, z)
        beta = rz_new / rz
        rz = rz_new
        vec_update(p, 1.0, z, beta)
    raise PcgMaxIterError(f"no convergence in {maxit} iterations "
                          f"(relative residual {rnorm / bnorm:.3e})", history)


def mg_pcg_solve(A: CrsMatrix, b, config: SolverConfig | None = None,
                 hierarchy: MgHierarchy | None = None) -> PcgResult:
    """Build (or reuse) a multigrid hierarchy and run preconditioned CG."""
    cfg = config or SolverConfig()
    hier = hierarchy or build_hierarchy(A, cfg)
    return pcg_solve(A, b, as_preconditioner(hier), cfg.tol, cfg.maxit)


def write_residual_history(path, history):
    """CSV with columns ``iteration,coupled_residual``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "coupled_residual"])
        for i, v in enumerate(history):
            w.writerow([i, repr(float(v))])

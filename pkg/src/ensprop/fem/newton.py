"""Newton's method for the discretized problem, over plain or ensemble scalars."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..sparsela import norm2_coupled
from ..sparsela.crs import CrsMatrix
from .assembly import PdeCoefficients, apply_dirichlet, assemble
from .kl import KlField
from .mesh import StructuredMesh


class NewtonConvergenceError(RuntimeError):
    """Newton did not converge; ``history`` holds the coupled residual norms."""

    def __init__(self, message, history):
        super().__init__(message)
        self.history = list(history)


@dataclass
class NewtonResult:
    u: np.ndarray
    iterations: int
    history: list = field(default_factory=list)         # coupled ||f|| per iterate
    linear_iterations: list = field(default_factory=list)


def default_linear_solver(tol: float = 1e-12):
    """Multigrid-preconditioned CG returning ``(du, iterations)``."""
    from ..mgsolve import SolverConfig, mg_pcg_solve

    cfg = SolverConfig(tol=tol)

    def solve(A: CrsMatrix, rhs):
        res = mg_pcg_solve(A, rhs, cfg)
        return res.x, res.iterations

    return solve


def newton_solve(mesh: StructuredMesh, field: KlField, coeffs: PdeCoefficients, y,
                 linear_solver: Callable | None = None, tol: float = 1e-8,
                 maxit: int = 20, left: float = 1.0, right: float = 0.0,
                 u0=None) -> NewtonResult:
    """Solve ``f(u, y) = 0`` with Dirichlet data ``left``/``right`` on the x faces.

    Each step solves ``A du = -f`` with ``linear_solver(A, rhs) -> (du, its)``
    and stops once the coupled residual norm drops below ``tol`` times its
    initial value.  With ``alpha = beta = 0`` the problem is linear, so one
    step is taken and no re-assembly follows.

    Raises
    ------
    NewtonConvergenceError
        After ``maxit`` steps without convergence.
    """
    solver = linear_solver or default_linear_solver()
    y = np.asarray(y, dtype=np.float64)
    shape = (mesh.num_nodes,) + y.shape[1:]
    u = np.zeros(shape) if u0 is None else np.array(u0, dtype=np.float64)
    linear = coeffs.alpha == 0.0 and coeffs.beta == 0.0
    history, lin_its = [], []
    sys = None
    for it in range(maxit + 1):
        sys = apply_dirichlet(assemble(mesh, field, coeffs, u, y, out=sys), mesh, left, right)
        rnorm = norm2_coupled(sys.f)
        history.append(rnorm)
        if rnorm == 0.0 or (it > 0 and rnorm < tol * history[0]):
            return NewtonResult(u, it, history, lin_its)
        if it == maxit:
            break
        du, its = solver(sys.A, -sys.f)
        lin_its.append(its)
        u = u + du
        if linear:
            return NewtonResult(u, it + 1, history, lin_its)
    raise NewtonConvergenceError(
        f"Newton did not converge in {maxit} iterations "
        f"(relative residual {history[-1] / history[0]:.3e})", history)

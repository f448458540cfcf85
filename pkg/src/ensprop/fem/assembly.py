"""Residual and Jacobian assembly for the advection-diffusion-reaction problem.

Weak form of ``-div(kappa grad u) + alpha v.grad u + beta u^2 = 0`` with
trilinear elements and 2x2x2 Gauss quadrature.  The same compiled kernel
assembles plain systems (``s = 1``) and ensembles: every per-sample
quantity carries a trailing axis of length ``s``, while the mesh, basis
functions, KL eigenfunctions and the matrix graph are evaluated once.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

from ..sparsela.crs import CrsMatrix
from .kl import KlField
from .mesh import CORNER_OFFSETS, StructuredMesh

_GAUSS = 0.5 / np.sqrt(3.0)
QP_REF = np.array([[0.5 + (2 * ((q >> d) & 1) - 1) * _GAUSS for d in range(3)]
                   for q in range(8)])
QP_WEIGHT = np.full(8, 0.125)


def reference_basis(points):
    """Trilinear basis values ``(npts, 8)`` and gradients ``(npts, 8, 3)``."""
    points = np.atleast_2d(points)
    vals = np.ones((points.shape[0], 8))
    grads = np.ones((points.shape[0], 8, 3))
    for a, off in enumerate(CORNER_OFFSETS):
        for d in range(3):
            f = points[:, d] if off[d] else 1.0 - points[:, d]
            df = 1.0 if off[d] else -1.0
            vals[:, a] *= f
            for g in range(3):
                grads[:, a, g] *= df if g == d else f
    return vals, grads


@dataclass
class PdeCoefficients:
    alpha: float = 0.0
    beta: float = 0.0
    velocity: tuple = (1.0, 0.0, 0.0)


@dataclass
class AssembledSystem:
    """Jacobian ``A`` and residual ``f`` evaluated at state ``u``.

    Arrays are ``(n,)`` for a single sample and ``(n, s)`` for an ensemble.
    """

    A: CrsMatrix
    f: np.ndarray
    u: np.ndarray
    dirichlet: np.ndarray | None = field(default=None)  # boundary node mask once applied


@nb.njit(cache=True, nogil=True)
def _assemble_kernel(n, h, cell_nodes, elem_graph, u, y, omega, odd, norm, sqrt_lam,
                     kappa0, sigma, alpha, beta, vel, qp_ref, qp_w, N, dN, f, values):
    s = u.shape[1]
    m = y.shape[0]
    inv_h = 1.0 / h
    det_j = h * h * h
    # sample-independent element tables (diagonal, constant Jacobian)
    grad = dN * inv_h
    stiff = np.zeros((8, 8, 8))
    adv = np.zeros((8, 8, 8))
    mass = np.zeros((8, 8, 8))
    for q in range(8):
        for a in range(8):
            for b in range(8):
                stiff[q, a, b] = (grad[q, a, 0] * grad[q, b, 0] + grad[q, a, 1] * grad[q, b, 1]
                                  + grad[q, a, 2] * grad[q, b, 2])
                adv[q, a, b] = (vel[0] * grad[q, b, 0] + vel[1] * grad[q, b, 1]
                                + vel[2] * grad[q, b, 2]) * N[q, a]
                mass[q, a, b] = N[q, a] * N[q, b]

    ue = np.empty((8, s))
    fe = np.empty((8, s))
    ae = np.empty((8, 8, s))
    kappa = np.empty(s)
    uq = np.empty(s)
    gu = np.empty((3, s))
    coef = np.empty(m)
    for cell in range(cell_nodes.shape[0]):
        ci = cell % n
        cj = (cell // n) % n
        ck = cell // (n * n)
        # gather element solution
        for a in range(8):
            node = cell_nodes[cell, a]
            for e in range(s):
                ue[a, e] = u[node, e]
        fe[:, :] = 0.0
        ae[:, :, :] = 0.0
        for q in range(8):
            x0 = (ci + qp_ref[q, 0]) * h
            x1 = (cj + qp_ref[q, 1]) * h
            x2 = (ck + qp_ref[q, 2]) * h
            # KL eigenfunctions at the point: shared by all samples
            for i in range(m):
                v = sqrt_lam[i]
                for d in range(3):
                    xd = x0 if d == 0 else (x1 if d == 1 else x2)
                    t = omega[i, d] * (xd - 0.5)
                    if odd[i, d]:
                        v = v * (norm[i, d] * np.sin(t))
                    else:
                        v = v * (norm[i, d] * np.cos(t))
                coef[i] = v
            for e in range(s):
                acc = 0.0
                for i in range(m):
                    acc += coef[i] * y[i, e]
                kappa[e] = kappa0 + sigma * acc
            for e in range(s):
                uq[e] = 0.0
                gu[0, e] = 0.0
                gu[1, e] = 0.0
                gu[2, e] = 0.0
            for a in range(8):
                for e in range(s):
                    uq[e] += N[q, a] * ue[a, e]
                    gu[0, e] += grad[q, a, 0] * ue[a, e]
                    gu[1, e] += grad[q, a, 1] * ue[a, e]
                    gu[2, e] += grad[q, a, 2] * ue[a, e]
            wq = qp_w[q] * det_j
            for a in range(8):
                for e in range(s):
                    r = kappa[e] * (gu[0, e] * grad[q, a, 0] + gu[1, e] * grad[q, a, 1]
                                    + gu[2, e] * grad[q, a, 2])
                    if alpha != 0.0:
                        r += alpha * (vel[0] * gu[0, e] + vel[1] * gu[1, e]
                                      + vel[2] * gu[2, e]) * N[q, a]
                    if beta != 0.0:
                        r += beta * uq[e] * uq[e] * N[q, a]
                    fe[a, e] += wq * r
                for b in range(8):
                    kab = stiff[q, a, b]
                    if alpha == 0.0 and beta == 0.0:
                        for e in range(s):
                            ae[a, b, e] += wq * (kappa[e] * kab)
                    else:
                        aab = alpha * adv[q, a, b]
                        mab = 2.0 * beta * mass[q, a, b]
                        for e in range(s):
                            ae[a, b, e] += wq * (kappa[e] * kab + aab + mab * uq[e])
        # scatter; callers must serialize concurrent adds into shared rows
        for a in range(8):
            row = cell_nodes[cell, a]
            for e in range(s):
                f[row, e] += fe[a, e]
            for b in range(8):
                entry = elem_graph[cell, a, b]
                for e in range(s):
                    values[entry, e] += ae[a, b, e]


def _as_samples(arr, length, what):
    arr = np.asarray(arr, dtype=np.float64)
    if arr.shape[0] != length or arr.ndim not in (1, 2):
        raise ValueError(f"{what} must have {length} rows, got shape {arr.shape}")
    return arr


def assemble(mesh: StructuredMesh, field: KlField, coeffs: PdeCoefficients, u, y,
             out: AssembledSystem | None = None) -> AssembledSystem:
    """Residual ``f(u, y)`` and Jacobian ``A = df/du`` over all cells.

    Parameters
    ----------
    u : ndarray
        ``(num_nodes,)`` state, or ``(num_nodes, s)`` for an ensemble.
    y : ndarray
        ``(m,)`` KL sample, or ``(m, s)`` with one column per sample.
    out : AssembledSystem, optional
        Reuse its arrays (graph must match) instead of allocating.

    Natural boundary conditions only; see :func:`apply_dirichlet`.
    """
    u = _as_samples(u, mesh.num_nodes, "u")
    y = _as_samples(y, field.m, "y")
    if u.ndim != y.ndim or (u.ndim == 2 and u.shape[1] != y.shape[1]):
        raise ValueError(f"u {u.shape} and y {y.shape} disagree on the ensemble size")
    scalar = u.ndim == 1
    u2 = np.ascontiguousarray(u.reshape(u.shape[0], -1))
    y2 = np.ascontiguousarray(y.reshape(y.shape[0], -1))
    s = u2.shape[1]
    row_map, col_entry = mesh.graph
    nnz = col_entry.shape[0]
    if out is None:
        values = np.zeros((nnz, s))
        f = np.zeros((mesh.num_nodes, s))
    else:
        values = out.A.values.reshape(nnz, s)
        f = out.f.reshape(mesh.num_nodes, s)
        values[...] = 0.0
        f[...] = 0.0
    omega, odd, norm, sqrt_lam = field.kernel_arrays()
    N, dN = reference_basis(QP_REF)
    _assemble_kernel(mesh.cells_per_axis, mesh.h, mesh.cell_nodes, mesh.elem_graph, u2, y2,
                     omega, odd, norm, sqrt_lam, field.kappa0, field.sigma,
                     float(coeffs.alpha), float(coeffs.beta),
                     np.asarray(coeffs.velocity, dtype=np.float64), QP_REF, QP_WEIGHT,
                     N, dN, f, values)
    if scalar:
        values, f = values[:, 0], f[:, 0]
    A = CrsMatrix(row_map, col_entry, values, mesh.num_nodes)
    return AssembledSystem(A, f, u)


def dirichlet_data(mesh: StructuredMesh, left: float = 1.0, right: float = 0.0):
    """Boundary mask and values: ``left`` on x=0, ``right`` on x=1."""
    xi = mesh.x_index()
    mask = (xi == 0) | (xi == mesh.cells_per_axis)
    g = np.where(xi == 0, left, right).astype(np.float64)
    g[~mask] = 0.0
    return mask, g


def apply_dirichlet(sys: AssembledSystem, mesh: StructuredMesh, left: float = 1.0,
                    right: float = 0.0) -> AssembledSystem:
    """Impose ``u = left`` on x=0 and ``u = right`` on x=1, in place.

    Boundary rows become identity rows with residual ``u_b - g_b``, so the
    Newton step ``A du = -f`` moves ``u_b`` onto ``g_b``.  Boundary columns
    of interior rows are eliminated into the residual, keeping ``A``
    symmetric.  The sparsity graph is unchanged (zeros stay stored).
    """
    A, f, u = sys.A, sys.f, sys.u
    mask, g = dirichlet_data(mesh, left, right)
    rows = A.row_indices()
    cols = A.col_entry
    brow = mask[rows]
    sel = mask[cols] & ~brow
    if u.ndim == 2:
        delta = g[:, None] - u
    else:
        delta = g - u
    # f_i += A_ib (g_b - u_b), accumulated in entry order
    np.add.at(f, rows[sel], A.values[sel] * delta[cols[sel]])
    A.values[sel] = 0.0
    A.values[brow] = 0.0
    A.values[brow & (rows == cols)] = 1.0
    f[mask] = -delta[mask]
    sys.dirichlet = mask
    return sys

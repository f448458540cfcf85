"""Diagonally scaled Chebyshev smoothing with per-sample spectral bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..sparsela import dot_componentwise, spmv
from ..sparsela.crs import CrsMatrix


class ZeroDiagonalError(ValueError):
    pass


def _inverse_diagonal(A: CrsMatrix) -> np.ndarray:
    d = A.diagonal()
    if np.any(d == 0.0):
        raise ZeroDiagonalError("matrix has a zero diagonal entry")
    return 1.0 / d


def power_lambda_max(A: CrsMatrix, iterations: int = 10):
    """Largest eigenvalue of ``D^-1 A``, estimated separately per sample.

    Starts from the ones vector; each sample is normalized by its own
    max-abs entry so samples never mix.  Returns a float, or an ``(s,)``
    array for an ensemble matrix.
    """
    diag = A.diagonal()
    inv_d = _inverse_diagonal(A)
    x = np.ones(inv_d.shape)
    for _ in range(iterations):
        y = spmv(A, x) * inv_d
        scale = np.max(np.abs(y), axis=0)
        x = y / np.where(scale == 0.0, 1.0, scale)
    ax = spmv(A, x)
    est = dot_componentwise(x, ax) / dot_componentwise(x, diag * x)
    return est if A.is_ensemble else float(est[0])


@dataclass
class ChebyshevParams:
    """Per-level smoother data.

    ``lambda_max`` is a float or ``(s,)`` array; the smoother targets
    ``[lambda_max / ratio, boost * lambda_max]``.
    """

    lambda_max: object
    inv_diag: np.ndarray
    degree: int = 2
    ratio: float = 30.0
    boost: float = 1.1

    @classmethod
    def setup(cls, A: CrsMatrix, degree=2, ratio=30.0, boost=1.1, power_iterations=10):
        lam = power_lambda_max(A, power_iterations)
        if np.any(np.asarray(lam) <= 0):
            raise ValueError(f"nonpositive eigenvalue estimate {lam}")
        return cls(lam, _inverse_diagonal(A), degree, ratio, boost)

    def interval(self):
        lam = np.asarray(self.lambda_max, dtype=np.float64)
        return lam / self.ratio, self.boost * lam


def chebyshev_apply(A: CrsMatrix, params: ChebyshevParams, b, x, x_is_zero=False):
    """Apply ``params.degree`` Chebyshev steps to ``A x = b``; returns new ``x``.

    Three-term recurrence on the diagonally scaled residual.  For
    ensembles the recurrence coefficients are per-sample arrays.
    """
    lo, hi = params.interval()
    theta = 0.5 * (hi + lo)
    delta = 0.5 * (hi - lo)
    sigma = theta / delta
    rho = 1.0 / sigma
    r = b.copy() if x_is_zero else b - spmv(A, x)
    d = (params.inv_diag * r) / theta
    x = d.copy() if x_is_zero else x + d
    for _ in range(1, params.degree):
        rho_new = 1.0 / (2.0 * sigma - rho)
        r = b - spmv(A, x)
        d = (rho_new * rho) * d + (2.0 * rho_new / delta) * (params.inv_diag * r)
        x = x + d
        rho = rho_new
    return x

"""Truncated Karhunen-Loeve expansion of a random diffusion coefficient.

The covariance ``exp(-|x - x'|_1 / L)`` on [0,1]^3 is separable, so its
eigenpairs are tensor products of the 1D exponential-kernel eigenpairs.
On the centered interval ``t = x - 1/2`` the 1D eigenfunctions are
``cos(w t)`` with ``w tan(w/2) = 1/L`` and ``sin(w t)`` with
``(1/L) tan(w/2) = -w``; the eigenvalue is ``(2/L) / (w^2 + 1/L^2)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from ..ensemble import EnsembleValue

ROOT_XTOL = 1e-12


class KlBracketError(RuntimeError):
    """An analytic root bracket did not contain a sign change."""


@dataclass(frozen=True)
class Mode1D:
    omega: float
    odd: bool
    eigenvalue: float
    norm: float  # L2-normalization factor on [0, 1]

    def __call__(self, x):
        t = self.omega * (x - 0.5)
        return self.norm * (math.sin(t) if self.odd else math.cos(t))


def _even_residual(w, c):
    # w tan(w/2) - c, multiplied through by cos(w/2) to stay continuous
    return w * math.sin(0.5 * w) - c * math.cos(0.5 * w)


def _odd_residual(w, c):
    return c * math.sin(0.5 * w) + w * math.cos(0.5 * w)


def _bisect(f, lo, hi, c):
    try:
        return bisect(f, lo, hi, args=(c,), xtol=ROOT_XTOL, rtol=4 * np.finfo(float).eps,
                      maxiter=200)
    except ValueError as exc:
        raise KlBracketError(f"no sign change on [{lo}, {hi}]") from exc


def modes_1d(count: int, L: float) -> list[Mode1D]:
    """The ``count`` largest-eigenvalue 1D modes, by increasing frequency."""
    c = 1.0 / L
    modes = []
    k = 0
    while len(modes) < count:
        # even root in (2k pi, 2k pi + pi), odd root in (2k pi + pi, 2(k+1) pi)
        w = _bisect(_even_residual, 2 * k * math.pi, (2 * k + 1) * math.pi, c)
        norm = 1.0 / math.sqrt(0.5 + math.sin(w) / (2 * w))
        modes.append(Mode1D(w, False, 2 * c / (w * w + c * c), norm))
        if len(modes) == count:
            break
        w = _bisect(_odd_residual, (2 * k + 1) * math.pi, (2 * k + 2) * math.pi, c)
        norm = 1.0 / math.sqrt(0.5 - math.sin(w) / (2 * w))
        modes.append(Mode1D(w, True, 2 * c / (w * w + c * c), norm))
        k += 1
    return modes


@dataclass(frozen=True)
class KlField:
    """``kappa(x, y) = kappa0 + sigma * sum_i sqrt(lambda_i) phi_i(x) y_i``.

    ``phi_i`` is the normalized tensor-product eigenfunction of 3D mode
    ``i``; ``index[i]`` holds its three 1D mode indices.
    """

    kappa0: float
    sigma: float
    L: float
    modes1d: tuple
    index: np.ndarray        # (m, 3) int
    eigenvalues: np.ndarray  # (m,) decreasing

    @property
    def m(self) -> int:
        return self.index.shape[0]

    def kernel_arrays(self):
        """Per-mode/axis ``(omega, odd, norm)`` arrays and ``sqrt(lambda)``."""
        omega = np.array([[self.modes1d[j].omega for j in row] for row in self.index])
        odd = np.array([[self.modes1d[j].odd for j in row] for row in self.index])
        norm = np.array([[self.modes1d[j].norm for j in row] for row in self.index])
        return omega, odd, norm, np.sqrt(self.eigenvalues)

    def mode_coefficients(self, x) -> np.ndarray:
        """``sqrt(lambda_i) * phi_i(x)`` for every mode at one point."""
        out = np.empty(self.m)
        for i, row in enumerate(self.index):
            v = math.sqrt(self.eigenvalues[i])
            for d in range(3):
                v = v * self.modes1d[row[d]](x[d])
            out[i] = v
        return out

    def mode_coefficients_at(self, points) -> np.ndarray:
        """Vectorized :meth:`mode_coefficients` for ``(npts, 3)`` points."""
        points = np.asarray(points, dtype=np.float64)
        omega, odd, norm, sqrt_lam = self.kernel_arrays()
        out = np.empty((points.shape[0], self.m))
        for i in range(self.m):
            v = np.full(points.shape[0], sqrt_lam[i])
            for d in range(3):
                t = omega[i, d] * (points[:, d] - 0.5)
                v = v * (norm[i, d] * (np.sin(t) if odd[i, d] else np.cos(t)))
            out[:, i] = v
        return out


def kl_build(m: int, kappa0: float = 1.0, sigma: float = 0.1, L: float = 1.0) -> KlField:
    """Keep the ``m`` largest 3D eigenvalues of the exponential covariance.

    Ties between equal products are broken by the lexicographic order of
    the 1D mode indices.
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if sigma < 0 or L <= 0:
        raise ValueError("need sigma >= 0 and L > 0")
    # a triple with some index >= m is beaten by at least m triples with
    # smaller indices, so m 1D modes suffice
    modes = modes_1d(m, L)
    lam = [md.eigenvalue for md in modes]
    candidates = []
    for triple in itertools.product(range(m), repeat=3):
        a, b, c = sorted(triple)  # fixed multiplication order makes ties exact
        candidates.append((-(lam[a] * lam[b] * lam[c]), triple))
    candidates.sort()
    chosen = candidates[:m]
    return KlField(
        kappa0=float(kappa0), sigma=float(sigma), L=float(L), modes1d=tuple(modes),
        index=np.array([t for _, t in chosen], dtype=np.int64),
        eigenvalues=np.array([-v for v, _ in chosen]),
    )


def kl_evaluate(field: KlField, x, y):
    """Diffusion coefficient at point ``x`` for sample(s) ``y``.

    ``y`` holds ``m`` entries, each a float or an :class:`EnsembleValue`;
    an ``(m, s)`` array is read as ``m`` ensemble values.  The result is an
    ensemble whenever ``y`` is.
    """
    if isinstance(y, np.ndarray) and y.ndim == 2:
        y = [EnsembleValue(row) for row in y]
    if len(y) != field.m:
        raise ValueError(f"expected {field.m} KL coefficients, got {len(y)}")
    coef = field.mode_coefficients(x)
    acc = 0.0
    for i in range(field.m):
        acc = acc + float(coef[i]) * y[i]
    return field.kappa0 + field.sigma * acc

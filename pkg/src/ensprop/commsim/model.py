"""Linear halo-time model ``T(s) = a + b s`` and its ensemble speedup."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class HaloModel:
    a: float  # seconds per exchange, independent of s
    b: float  # seconds per ensemble component

    def time(self, s):
        return self.a + self.b * s


def fit_halo_model(samples):
    """Least-squares ``(a, b)`` from ``(s, T)`` pairs.

    Returns
    -------
    model : HaloModel
    rss : float
        Residual sum of squares.
    """
    s, t = np.asarray(samples, dtype=np.float64).reshape(-1, 2).T
    if s.size < 2 or np.all(s == s[0]):
        raise ValueError("need at least two distinct ensemble sizes")
    sm, tm = s.mean(), t.mean()
    b = float(np.sum((s - sm) * (t - tm)) / np.sum((s - sm) ** 2))
    a = float(tm - b * sm)
    rss = float(np.sum((t - (a + b * s)) ** 2))
    return HaloModel(a, b), rss


def predicted_speedup(model: HaloModel, s):
    """``s (a + b) / (a + b s)``."""
    if s < 1:
        raise ValueError("s must be at least 1")
    denom = model.a + model.b * s
    if denom == 0:
        raise ZeroDivisionError("a + b s is zero")
    return s * (model.a + model.b) / denom

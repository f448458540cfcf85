from __future__ import annotations

import numpy as np


def draw_samples(seed: int, count: int, m: int) -> list:
    """``count`` independent points of ``[-1, 1]^m``, reproducible from ``seed``."""
    if m < 1:
        raise ValueError("m must be at least 1")
    rng = np.random.default_rng(seed)
    return list(rng.uniform(-1.0, 1.0, size=(count, m)))


def sample_block(samples) -> np.ndarray:
    """Stack samples as the ``(m, s)`` columns of an ensemble."""
    return np.ascontiguousarray(np.stack(samples, axis=1))

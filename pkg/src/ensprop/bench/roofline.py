"""Bandwidth bounds on sparse matrix-vector throughput.

Per nonzero, a scalar product moves an 8 B value and a 4 B column index
and does 2 flops; the pessimistic case also reads an 8 B vector entry.
An ensemble amortizes the index over ``s`` values, which leaves 8 B
(optimistic) or 16 B (pessimistic) per 2 flops.
"""

from __future__ import annotations

from typing import NamedTuple

BYTES_PER_TWO_FLOPS = {
    "scalar_optimistic": 12,
    "scalar_pessimistic": 20,
    "ensemble_optimistic": 8,
    "ensemble_pessimistic": 16,
}


class RooflineBounds(NamedTuple):
    scalar_optimistic: float
    scalar_pessimistic: float
    ensemble_optimistic: float
    ensemble_pessimistic: float


def roofline_bounds(bandwidth_gbs: float) -> RooflineBounds:
    """GFLOP/s bounds from a STREAM-style bandwidth in GB/s."""
    if not bandwidth_gbs > 0:
        raise ValueError("bandwidth must be positive")
    return RooflineBounds(*(bandwidth_gbs * 2.0 / BYTES_PER_TWO_FLOPS[k]
                            for k in RooflineBounds._fields))

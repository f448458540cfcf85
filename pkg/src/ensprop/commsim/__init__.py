"""Simulated distributed memory: slab partitions, halo exchange, halo-time model."""

from .halo import (HaloError, HaloResult, TraceRecord, TransportModel, VirtualClock,
                   distributed_spmv, halo_exchange, write_trace)
from .model import HaloModel, fit_halo_model, predicted_speedup
from .partition import RankLayout, SlabPartition, partition

__all__ = [
    "HaloError", "HaloModel", "HaloResult", "RankLayout", "SlabPartition", "TraceRecord",
    "TransportModel", "VirtualClock", "distributed_spmv", "fit_halo_model", "halo_exchange",
    "partition", "predicted_speedup", "write_trace",
]

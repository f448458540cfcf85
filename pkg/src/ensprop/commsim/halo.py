"""Virtual-time halo exchange between simulated ranks."""

from __future__ import annotations

import csv
import queue
import time
from dataclasses import dataclass, field

import numpy as np

from ..sparsela import spmv
from ..sparsela.crs import CrsMatrix
from .partition import SlabPartition


class HaloError(RuntimeError):
    """A ghost slot was not filled by the exchange."""


@dataclass(frozen=True)
class TransportModel:
    latency_per_message: float = 0.0  # seconds
    bandwidth: float = 1e9             # bytes / second
    bytes_per_component: int = 8

    def __post_init__(self):
        if self.latency_per_message < 0 or self.bandwidth <= 0:
            raise ValueError("need latency >= 0 and bandwidth > 0")

    @classmethod
    def from_flags(cls, latency_us: float, bandwidth_gbs: float) -> "TransportModel":
        return cls(latency_us * 1e-6, bandwidth_gbs * 1e9)

    def message_time(self, nbytes: int) -> float:
        return self.latency_per_message + nbytes / self.bandwidth


@dataclass
class VirtualClock:
    """Per-rank accumulated communication time."""

    rank_time: dict = field(default_factory=dict)

    def charge(self, rank: int, seconds: float) -> float:
        self.rank_time[rank] = self.rank_time.get(rank, 0.0) + seconds
        return self.rank_time[rank]

    def elapsed(self) -> float:
        return max(self.rank_time.values(), default=0.0)


@dataclass(frozen=True)
class TraceRecord:
    rank: int
    neighbor: int
    bytes: int
    virtual_time: float  # sender's clock after the message


@dataclass
class HaloResult:
    x: list
    elapsed: float
    messages: int
    trace: list


class _RankActor:
    def __init__(self, layout, x):
        self.layout = layout
        self.x = x
        self.inbox = queue.SimpleQueue()
        self.filled = np.zeros(x.shape[0], dtype=bool)
        self.filled[layout.owned_local] = True

    def post(self, actors, transport, clock, trace, wall_clock):
        lay = self.layout
        for nbr, ids in lay.send.items():
            payload = self.x[np.searchsorted(lay.local_ids, ids)].copy()
            nbytes = payload.size * transport.bytes_per_component
            cost = transport.message_time(nbytes)
            if wall_clock:
                time.sleep(cost)
            now = clock.charge(lay.rank, cost)
            trace.append(TraceRecord(lay.rank, nbr, nbytes, now))
            actors[nbr].inbox.put((lay.rank, payload))

    def drain(self):
        while not self.inbox.empty():
            src, payload = self.inbox.get()
            slots = self.layout.recv[src]
            self.x[slots] = payload
            self.filled[slots] = True
        if not self.filled.all():
            missing = int((~self.filled).sum())
            raise HaloError(f"rank {self.layout.rank}: {missing} ghost slots unfilled")


def halo_exchange(part: SlabPartition, xs, transport: TransportModel,
                  clock: VirtualClock | None = None, wall_clock: bool = False) -> HaloResult:
    """Fill every ghost slot of the distributed vector ``xs`` in place.

    Each rank sends one message per neighbor carrying all ``s`` components
    of its boundary plane.  Elapsed time is the largest per-rank sum of
    ``latency + bytes / bandwidth``; it is accounted, not measured, unless
    ``wall_clock`` is set, in which case each message also sleeps.
    """
    if len(xs) != part.num_ranks:
        raise ValueError(f"expected {part.num_ranks} local vectors, got {len(xs)}")
    clock = clock or VirtualClock({r: 0.0 for r in range(part.num_ranks)})
    actors = [_RankActor(lay, x) for lay, x in zip(part.ranks, xs)]
    trace = []
    for a in actors:
        a.post(actors, transport, clock, trace, wall_clock)
    for a in actors:
        a.drain()
    return HaloResult(xs, clock.elapsed(), len(trace), trace)


def distributed_spmv(part: SlabPartition, A: CrsMatrix, x, transport: TransportModel,
                     local_matrices=None):
    """``A x`` computed rank by rank after a halo exchange.

    Returns the global result and the exchange's :class:`HaloResult`.
    """
    xs = part.distribute(x)
    halo = halo_exchange(part, xs, transport)
    mats = local_matrices or [part.local_matrix(A, r) for r in range(part.num_ranks)]
    zs = []
    for lay, Al, xl in zip(part.ranks, mats, xs):
        z = np.zeros(xl.shape)
        z[lay.owned_local] = spmv(Al, xl)
        zs.append(z)
    return part.gather(zs), halo


def write_trace(path, trace):
    """CSV with columns ``rank,neighbor,bytes,virtual_time``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["rank", "neighbor", "bytes", "virtual_time"])
        for t in trace:
            w.writerow([t.rank, t.neighbor, t.bytes, repr(t.virtual_time)])

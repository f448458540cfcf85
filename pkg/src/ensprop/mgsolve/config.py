from __future__ import annotations

from dataclasses import dataclass

from ..kvtext import dump_kv, load_kv


@dataclass
class SolverConfig:
    """Multigrid-CG settings, serializable as ``key = value`` lines."""

    tol: float = 1e-8
    maxit: int = 1000
    cheb_degree: int = 2
    cheb_ratio: float = 30.0
    cheb_boost: float = 1.1
    coarse_threshold: int = 500
    power_iterations: int = 30  # 10 from the ones vector underestimates by ~20%

    def to_text(self) -> str:
        return dump_kv(self)

    @classmethod
    def from_text(cls, text: str, strict: bool = True) -> "SolverConfig":
        return load_kv(cls, text, strict)

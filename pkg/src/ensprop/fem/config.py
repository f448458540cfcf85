from __future__ import annotations

from dataclasses import dataclass

from ..kvtext import dump_kv, load_kv


@dataclass
class ProblemConfig:
    """Test-problem settings, serializable as ``key = value`` lines."""

    n: int = 8
    m: int = 5
    kappa0: float = 1.0
    sigma: float = 0.1
    L: float = 1.0
    alpha: float = 0.0
    beta: float = 0.0
    bc_left: float = 1.0
    bc_right: float = 0.0

    def to_text(self) -> str:
        return dump_kv(self)

    @classmethod
    def from_text(cls, text: str, strict: bool = True) -> "ProblemConfig":
        return load_kv(cls, text, strict)

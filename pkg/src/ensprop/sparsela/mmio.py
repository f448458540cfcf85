"""MatrixMarket exchange for scalar and ensemble CRS matrices."""

from __future__ import annotations

from pathlib import Path

import scipy.io

from .crs import CrsMatrix, repack


def write_matrix_market(path, A: CrsMatrix):
    """Write a scalar matrix in coordinate format (explicit zeros kept)."""
    scipy.io.mmwrite(str(path), A.to_scipy().tocoo())


def read_matrix_market(path) -> CrsMatrix:
    return CrsMatrix.from_scipy(scipy.io.mmread(str(path)).tocsr())


def write_ensemble_matrix_market(stem, A: CrsMatrix) -> list[Path]:
    """One file per sample: ``<stem>.<e>.mtx``."""
    stem = Path(stem)
    paths = []
    for e in range(A.ensemble_size):
        p = stem.with_name(f"{stem.name}.{e}.mtx")
        write_matrix_market(p, A.component(e))
        paths.append(p)
    return paths


def read_ensemble_matrix_market(paths) -> CrsMatrix:
    return repack([read_matrix_market(p) for p in paths])

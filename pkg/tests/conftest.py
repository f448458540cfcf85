import sys

import numpy as np
import pytest
import scipy.sparse as sp

from ensprop.sparsela import CrsMatrix


def random_crs(rng, n, density=0.1, ncols=None, symmetric=False):
    ncols = n if ncols is None else ncols
    m = sp.random(n, ncols, density=density, random_state=rng, format="csr")
    if symmetric:
        m = m + m.T
    m = m + sp.eye(n, ncols, format="csr")  # keep rows nonempty
    return CrsMatrix.from_scipy(m)


def bits(a):
    return np.ascontiguousarray(a, dtype=np.float64).view(np.uint64)


def assert_bitwise(a, b):
    a, b = np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)
    assert a.shape == b.shape
    np.testing.assert_array_equal(bits(a), bits(b))


@pytest.fixture
def rng():
    return np.random.default_rng(20140101)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)

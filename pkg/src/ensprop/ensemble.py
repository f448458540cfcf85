"""Ensemble scalar type.

An :class:`EnsembleValue` holds ``s`` double-precision samples of one
quantity and behaves like a float: arithmetic and math functions act
componentwise, comparisons look only at the first component, and
reductions collapse it back to a plain float.  Code written against plain
floats therefore runs unchanged on ensembles.

Array containers (vectors, matrix values) do not store ``EnsembleValue``
objects; they carry the ensemble as a trailing axis of length ``s`` so the
``s`` samples of each degree of freedom stay contiguous.  Indexing a row of
such an array and wrapping it with :func:`as_ensemble` gives back the
scalar view.
"""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

__all__ = [
    "EnsembleValue",
    "EnsembleTraitView",
    "FlopCounter",
    "as_ensemble",
    "broadcast",
    "component_loop",
    "count_flops",
    "ensemble_trait",
    "format_ensemble",
    "map_math",
    "parse_ensemble",
    "reduce_sum",
    "sin", "cos", "tan", "exp", "log", "sqrt", "fabs", "fmin", "fmax", "power",
]


class FlopCounter:
    """Counts componentwise floating-point operations while active."""

    def __init__(self):
        self.flops = 0


_active_counter: FlopCounter | None = None


@contextlib.contextmanager
def count_flops():
    """Count component-level flops done by :class:`EnsembleValue` arithmetic.

    Only ``+ - * /`` between operands are counted (``s`` per operation).
    """
    global _active_counter
    previous = _active_counter
    counter = FlopCounter()
    _active_counter = counter
    try:
        yield counter
    finally:
        _active_counter = previous


def _tick(s):
    if _active_counter is not None:
        _active_counter.flops += s


class EnsembleValue:
    """Fixed-size array of ``s`` samples with float-like value semantics.

    Parameters
    ----------
    components : array_like
        The ``s >= 1`` sample values.  They are copied.

    Notes
    -----
    Instances are treated as immutable; every operation returns a new
    value, and augmented assignment (``+=``) rebinds rather than mutates.
    Comparisons use the first component only, so ``bool(x > 0)`` picks a
    single branch for the whole ensemble.  Use :func:`component_loop` when
    samples must branch independently.
    """

    __slots__ = ("_c",)
    # make numpy defer to our reflected operators instead of broadcasting
    __array_ufunc__ = None

    def __init__(self, components):
        c = np.array(components, dtype=np.float64).reshape(-1)
        if c.size < 1:
            raise ValueError("ensemble size must be at least 1")
        c.flags.writeable = False
        self._c = c

    @classmethod
    def _wrap(cls, arr):
        obj = cls.__new__(cls)
        arr.flags.writeable = False
        obj._c = arr
        return obj

    @property
    def s(self) -> int:
        return self._c.shape[0]

    @property
    def components(self) -> np.ndarray:
        """Read-only view of the components."""
        return self._c

    def __len__(self):
        return self._c.shape[0]

    def __getitem__(self, i):
        return float(self._c[i])

    def __iter__(self):
        return (float(v) for v in self._c)

    def __array__(self, dtype=None, copy=None):
        return np.array(self._c, dtype=dtype)

    # ---- arithmetic -------------------------------------------------------

    def _operand(self, other):
        if isinstance(other, EnsembleValue):
            if other.s != self.s:
                raise ValueError(
                    f"ensemble size mismatch: {self.s} vs {other.s}")
            return other._c
        if isinstance(other, (int, float, np.floating, np.integer)):
            return np.float64(other)
        return None

    def _binary(self, other, op, reflected=False):
        b = self._operand(other)
        if b is None:
            return NotImplemented
        _tick(self.s)
        with np.errstate(all="ignore"):
            res = op(b, self._c) if reflected else op(self._c, b)
        return EnsembleValue._wrap(res)

    def __add__(self, other):
        return self._binary(other, np.add)

    def __radd__(self, other):
        return self._binary(other, np.add, reflected=True)

    def __sub__(self, other):
        return self._binary(other, np.subtract)

    def __rsub__(self, other):
        return self._binary(other, np.subtract, reflected=True)

    def __mul__(self, other):
        return self._binary(other, np.multiply)

    def __rmul__(self, other):
        return self._binary(other, np.multiply, reflected=True)

    def __truediv__(self, other):
        return self._binary(other, np.divide)

    def __rtruediv__(self, other):
        return self._binary(other, np.divide, reflected=True)

    def __pow__(self, other):
        return self._binary(other, np.power)

    def __rpow__(self, other):
        return self._binary(other, np.power, reflected=True)

    def __neg__(self):
        return EnsembleValue._wrap(np.negative(self._c))

    def __pos__(self):
        return self

    def __abs__(self):
        return EnsembleValue._wrap(np.abs(self._c))

    # ---- comparisons: first component decides -----------------------------

    def _first(self, other):
        b = self._operand(other)
        if b is None:
            return None
        return b if np.ndim(b) == 0 else b[0]

    def _compare(self, other, op):
        b = self._first(other)
        if b is None:
            return NotImplemented
        return bool(op(self._c[0], b))

    def __lt__(self, other):
        return self._compare(other, lambda a, b: a < b)

    def __le__(self, other):
        return self._compare(other, lambda a, b: a <= b)

    def __gt__(self, other):
        return self._compare(other, lambda a, b: a > b)

    def __ge__(self, other):
        return self._compare(other, lambda a, b: a >= b)

    def __eq__(self, other):
        return self._compare(other, lambda a, b: a == b)

    def __ne__(self, other):
        return self._compare(other, lambda a, b: a != b)

    __hash__ = None

    def __bool__(self):
        return bool(self._c[0] != 0.0)

    def __float__(self):
        return float(self._c[0])

    # ---- text -------------------------------------------------------------

    def __str__(self):
        return format_ensemble(self)

    def __repr__(self):
        return f"EnsembleValue({format_ensemble(self)})"

    def bitwise_equal(self, other) -> bool:
        """True when every component has the same bit pattern."""
        o = np.asarray(other, dtype=np.float64)
        return o.shape == self._c.shape and bool(
            np.array_equal(self._c.view(np.uint64), o.view(np.uint64)))


def broadcast(v, s: int) -> EnsembleValue:
    """Ensemble of size ``s`` with every component equal to ``v``."""
    if s < 1:
        raise ValueError("ensemble size must be at least 1")
    return EnsembleValue._wrap(np.full(s, v, dtype=np.float64))


def as_ensemble(row) -> EnsembleValue:
    """Wrap one row of a commuted-layout array as an :class:`EnsembleValue`."""
    return EnsembleValue(row)


def reduce_sum(a) -> float:
    """Sum of the components, accumulated left to right."""
    if not isinstance(a, EnsembleValue):
        return float(a)
    total = 0.0
    for v in a._c.tolist():
        total += v
    return total


# ---- math functions -------------------------------------------------------

def _lift1(ufunc):
    def f(x):
        if isinstance(x, EnsembleValue):
            with np.errstate(all="ignore"):
                return EnsembleValue._wrap(ufunc(x._c))
        # route plain floats through the same array loop as ensembles
        with np.errstate(all="ignore"):
            return float(ufunc(np.array([x], dtype=np.float64))[0])
    f.__name__ = ufunc.__name__
    f.__doc__ = f"Componentwise ``{ufunc.__name__}``; floats pass straight through."
    return f


def _lift2(ufunc):
    def f(x, y):
        xe, ye = isinstance(x, EnsembleValue), isinstance(y, EnsembleValue)
        if not (xe or ye):
            with np.errstate(all="ignore"):
                return float(ufunc(np.array([x], dtype=np.float64),
                                   np.array([y], dtype=np.float64))[0])
        if xe and ye and x.s != y.s:
            raise ValueError(f"ensemble size mismatch: {x.s} vs {y.s}")
        a = x._c if xe else np.float64(x)
        b = y._c if ye else np.float64(y)
        with np.errstate(all="ignore"):
            return EnsembleValue._wrap(np.asarray(ufunc(a, b), dtype=np.float64))
    f.__name__ = ufunc.__name__
    f.__doc__ = f"Componentwise ``{ufunc.__name__}`` of two operands."
    return f


sin = _lift1(np.sin)
cos = _lift1(np.cos)
tan = _lift1(np.tan)
exp = _lift1(np.exp)
log = _lift1(np.log)
sqrt = _lift1(np.sqrt)
fabs = _lift1(np.abs)
fmin = _lift2(np.minimum)
fmax = _lift2(np.maximum)
power = _lift2(np.power)


def map_math(a, f: Callable, b=None):
    """Apply a float function componentwise.

    ``f`` is called once per component with plain floats (and the matching
    component of ``b`` for binary functions), in component order.
    """
    if b is None:
        return component_loop(f, a)
    return component_loop(f, a, b)


# ---- traits and divergence handling ---------------------------------------

@dataclass(frozen=True)
class EnsembleTraitView:
    """Type-generic access to the components of a scalar."""

    value_type: type
    ensemble_size: int
    coeff: Callable[[Any, int], float]


def _scalar_coeff(x, i):
    return x


def _ensemble_coeff(x, i):
    return float(x._c[i])


def ensemble_trait(x) -> EnsembleTraitView:
    """Trait of a plain float (size 1) or an :class:`EnsembleValue`."""
    if isinstance(x, EnsembleValue):
        return EnsembleTraitView(float, x.s, _ensemble_coeff)
    return EnsembleTraitView(float, 1, _scalar_coeff)


def component_loop(body: Callable[..., float], *xs):
    """Evaluate scalar ``body`` separately for each sample.

    Use it around branching code so each sample takes its own branch.
    Plain-float arguments are shared by all samples.  Returns a float if no
    argument is an ensemble.
    """
    traits = [ensemble_trait(x) for x in xs]
    sizes = {t.ensemble_size for t, x in zip(traits, xs)
             if isinstance(x, EnsembleValue)}
    if len(sizes) > 1:
        raise ValueError(f"ensemble size mismatch: {sorted(sizes)}")
    if not sizes:
        return float(body(*xs))
    s = sizes.pop()
    out = np.empty(s, dtype=np.float64)
    for i in range(s):
        out[i] = body(*(t.coeff(x, i) for t, x in zip(traits, xs)))
    return EnsembleValue._wrap(out)


# ---- text rendering -------------------------------------------------------

def format_ensemble(a) -> str:
    """Render as ``[c0, c1, ...]`` with 17 significant digits."""
    comps = a._c if isinstance(a, EnsembleValue) else [a]
    return "[" + ", ".join(format(float(v), ".17g") for v in comps) + "]"


def parse_ensemble(text: str) -> EnsembleValue:
    body = text.strip()
    if not (body.startswith("[") and body.endswith("]")):
        raise ValueError(f"not an ensemble literal: {text!r}")
    return EnsembleValue([float(tok) for tok in body[1:-1].split(",")])

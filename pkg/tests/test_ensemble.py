import math
import operator

import numpy as np
import pytest
from hypothesis import given, strategies as st

from ensprop import ensemble as ens
from ensprop.ensemble import EnsembleValue, broadcast, reduce_sum

finite = st.floats(allow_nan=False, allow_infinity=False, width=64,
                   min_value=-1e6, max_value=1e6)


def comps(s):
    return st.lists(finite, min_size=s, max_size=s)


@pytest.mark.parametrize("v,s,expected", [
    (3.5, 4, [3.5] * 4), (0.0, 2, [0.0, 0.0]), (-1.0, 1, [-1.0])])
def test_broadcast(v, s, expected):
    assert broadcast(v, s).bitwise_equal(expected)


def test_broadcast_rejects_empty():
    with pytest.raises(ValueError):
        broadcast(1.0, 0)


def test_zip_arith_examples():
    assert (EnsembleValue([1, 2]) * EnsembleValue([3, 4])).bitwise_equal([3, 8])
    assert (EnsembleValue([1, 2]) + 10).bitwise_equal([11, 12])
    assert (10 - EnsembleValue([1, 2])).bitwise_equal([9, 8])
    q = EnsembleValue([1, 0]) / EnsembleValue([0, 1])
    assert q[0] == math.inf and q[1] == 0.0


def test_size_mismatch():
    with pytest.raises(ValueError):
        EnsembleValue([1, 2]) + EnsembleValue([1, 2, 3])


def test_map_math_examples():
    e = ens.exp(EnsembleValue([0, 1]))
    assert e[0] == 1.0 and e[1] == pytest.approx(2.718281828, abs=1e-9)
    assert abs(EnsembleValue([-2, 3])).bitwise_equal([2, 3])
    assert ens.fmax(EnsembleValue([1, 5]), EnsembleValue([4, 2])).bitwise_equal([4, 5])
    assert ens.fmin(EnsembleValue([1, 5]), 3.0).bitwise_equal([1, 3])
    assert math.isnan(ens.sqrt(EnsembleValue([-1.0, 4.0]))[0])
    assert ens.map_math(EnsembleValue([1, 4]), math.sqrt).bitwise_equal([1, 2])


@pytest.mark.parametrize("a,b,rel,expected", [
    ([-1, 5], 0, operator.gt, False),
    ([2, -9], 0, operator.gt, True),
    ([3, 3], [3, 7], operator.eq, True),
    ([3, 3], [4, 0], operator.lt, True),
])
def test_compare_first(a, b, rel, expected):
    b = EnsembleValue(b) if isinstance(b, list) else b
    assert rel(EnsembleValue(a), b) is expected


def test_compare_with_numpy_scalar_on_left():
    assert (np.float64(0.0) < EnsembleValue([2, -9])) is True


@pytest.mark.parametrize("a,expected", [
    ([1, 2, 3, 4], 10.0), ([7.25], 7.25), ([1e16, 1.0, -1e16], 0.0)])
def test_reduce_sum(a, expected):
    assert reduce_sum(EnsembleValue(a)) == expected


def test_reduce_sum_left_to_right_order():
    # right-to-left would give 1.0
    assert reduce_sum(EnsembleValue([1e16, -1e16, 1.0])) == 1.0
    assert reduce_sum(EnsembleValue([1e16, 1.0, -1e16])) == 0.0


def branchy(xi):
    if xi > 0:
        z = xi * xi
        return xi + z
    return xi


@pytest.mark.parametrize("x,expected", [
    (EnsembleValue([-1, 2]), [-1, 6]), (EnsembleValue([0, 0]), [0, 0])])
def test_component_loop(x, expected):
    assert ens.component_loop(branchy, x).bitwise_equal(expected)


def test_component_loop_plain_scalar():
    assert ens.component_loop(branchy, 3.0) == 12.0


def test_component_loop_without_it_takes_one_branch():
    # the whole ensemble follows the first sample's branch
    assert branchy(EnsembleValue([-1, 2])).bitwise_equal([-1, 2])


def test_trait():
    t = ens.ensemble_trait(2.5)
    assert t.ensemble_size == 1 and t.coeff(2.5, 7) == 2.5
    x = EnsembleValue([1, 2, 3])
    t = ens.ensemble_trait(x)
    assert t.ensemble_size == 3 and [t.coeff(x, i) for i in range(3)] == [1, 2, 3]


def test_text_round_trip():
    x = EnsembleValue([0.1, 1 / 3, -2.5e-300])
    text = str(x)
    assert text == "[0.10000000000000001, 0.33333333333333331, -2.5e-300]"
    assert ens.parse_ensemble(text).bitwise_equal(x.components)


def test_flop_counter():
    a, b = EnsembleValue([1, 2, 3]), EnsembleValue([4, 5, 6])
    with ens.count_flops() as c:
        _ = a * b + a
    assert c.flops == 6


def expr(x, y, z):
    return ((x * y - z) / (1.5 + y * y)) * 3.0 + ens.exp(-x * 1e-3) - ens.sin(z) * ens.sqrt(y * y + 1.0)


@given(st.integers(1, 8).flatmap(lambda s: st.tuples(comps(s), comps(s), comps(s))))
def test_substitution_property(data):
    xs, ys, zs = data
    got = expr(EnsembleValue(xs), EnsembleValue(ys), EnsembleValue(zs))
    want = [expr(x, y, z) for x, y, z in zip(xs, ys, zs)]
    assert got.bitwise_equal(want)


@given(finite, st.integers(1, 64))
def test_broadcast_reduce_round_trip(v, s):
    v = float(np.float32(v))  # few mantissa bits so s*v is exact
    assert reduce_sum(broadcast(v, s)) == s * v


@given(comps(4), comps(3))
def test_compare_ignores_tail(a, tail):
    b = EnsembleValue([a[0]] + tail)
    assert (EnsembleValue(a) > 0.5) == (b > 0.5)
    assert (EnsembleValue(a) <= -3.0) == (b <= -3.0)


@given(comps(5))
def test_component_loop_matches_vectorized_for_branch_free_body(xs):
    body = lambda x: x * x - 2.0 * x + 0.25
    assert ens.component_loop(body, EnsembleValue(xs)).bitwise_equal(
        body(EnsembleValue(xs)).components)


@given(finite, finite)
def test_size_one_matches_plain_float(x, y):
    ex, ey = EnsembleValue([x]), EnsembleValue([y])
    for op in (operator.add, operator.sub, operator.mul):
        assert op(ex, ey).bitwise_equal([op(x, y)])
    assert ens.exp(ex * 1e-6).bitwise_equal([ens.exp(x * 1e-6)])
    assert (ex < ey) == (x < y)
    assert reduce_sum(ex) == x

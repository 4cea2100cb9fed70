import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ_I

from spps import scalar
from spps.seqgrid import (CoefficientSet, IndexWindow, OutOfRange, Sequence, apply_jacobi, delta,
                          jacobi_residuals, relative_residuals, star_sum, star_sum_array)

MODES = [scalar.FLOAT, scalar.RATIONAL]


def seq(f, lo=0, hi=10, mode=scalar.RATIONAL):
    return Sequence.from_function(f, lo, hi, mode)


def test_window_needs_three_points():
    assert IndexWindow(0, 2).size == 3
    with pytest.raises(ValueError):
        IndexWindow(0, 1)


def test_window_interior():
    w = IndexWindow(-2, 3)
    assert list(w.interior) == [-1, 0, 1, 2]
    assert 3 in w and 4 not in w


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("f, n, expected", [
    (lambda n: 1, 5, 0),
    (lambda n: n, 4, 1),
    (lambda n: n * n, 3, 7),
])
def test_delta(mode, f, n, expected):
    assert delta(seq(f, mode=mode), n) == scalar.convert(expected, mode)


def test_delta_out_of_range():
    with pytest.raises(OutOfRange):
        delta(seq(lambda n: n), 10)


def test_lookup_outside_range_is_an_error():
    u = seq(lambda n: n, 2, 6)
    with pytest.raises(OutOfRange):
        u(1)
    with pytest.raises(OutOfRange):
        u[7]


@pytest.mark.parametrize("mode", MODES)
@pytest.mark.parametrize("n, expected", [(5, 0), (8, 3), (3, -2), (0, -5), (10, 5)])
def test_star_sum_constant(mode, n, expected):
    u = seq(lambda k: 1, 0, 10, mode)
    assert star_sum(u, 5, n) == scalar.convert(expected, mode)


def test_star_sum_zero_is_exact_in_both_modes():
    for mode in MODES:
        u = seq(lambda k: 0.1 * k + 1 / 3, 0, 10, mode)
        v = star_sum(u, 4, 4)
        assert scalar.is_zero(v)


def test_star_sum_out_of_range():
    u = seq(lambda k: 1, 0, 10)
    with pytest.raises(OutOfRange):
        star_sum(u, 5, 12)


@settings(max_examples=60, deadline=None)
@given(vals=st.lists(st.integers(-50, 50), min_size=2, max_size=15), data=st.data())
def test_star_sum_increment_property(vals, data):
    m = len(vals)
    u = Sequence(0, m - 1, vals, scalar.RATIONAL)
    n0 = data.draw(st.integers(0, m - 1))
    for n in range(0, m - 1):
        lhs = star_sum(u, n0, n + 1) - star_sum(u, n0, n)
        assert lhs == u(n)


@settings(max_examples=40, deadline=None)
@given(vals=st.lists(st.integers(-20, 20), min_size=1, max_size=12), data=st.data())
def test_star_sum_array_matches_pointwise(vals, data):
    m = len(vals)
    lo = data.draw(st.integers(-5, 5))
    n0 = data.draw(st.integers(lo, lo + m))
    arr = star_sum_array(scalar.as_array(vals, scalar.RATIONAL), lo, n0)
    u = Sequence(lo, lo + m, list(vals) + [0], scalar.RATIONAL)
    for j in range(m + 1):
        assert arr[j] == star_sum(u, n0, lo + j)


def unit_coeffs(lo=0, hi=10, mode=scalar.RATIONAL):
    return CoefficientSet.from_functions(lo, hi, 1, 0, 1, mode)


@pytest.mark.parametrize("f", [lambda n: 1, lambda n: n])
def test_jacobi_annihilates_linear(f):
    c = unit_coeffs()
    u = seq(f)
    for n in c.window.interior:
        assert scalar.is_zero(apply_jacobi(c, u, 0, n))


def test_jacobi_on_power_of_two():
    c = unit_coeffs()
    u = seq(lambda n: 2 ** n)
    assert scalar.is_zero(apply_jacobi(c, u, "1/2", 3))
    assert not scalar.is_zero(apply_jacobi(c, u, 1, 3))


def test_jacobi_rejects_boundary_points():
    c = unit_coeffs()
    u = seq(lambda n: n)
    with pytest.raises(OutOfRange):
        apply_jacobi(c, u, 0, 0)
    with pytest.raises(OutOfRange):
        apply_jacobi(c, u, 0, 10)


def test_coefficient_ranges():
    c = CoefficientSet.from_functions(-1, 5, lambda n: n + 2, lambda n: n, lambda n: 2 * n)
    assert (c.p.lo, c.p.hi) == (-1, 4)
    assert (c.q.lo, c.q.hi) == (0, 5)
    assert c.r(5) == 10
    with pytest.raises(OutOfRange):
        c.p(5)
    with pytest.raises(OutOfRange):
        c.q(-1)


def test_zero_p_rejected():
    with pytest.raises(ValueError, match="p\\(2\\)"):
        CoefficientSet.from_functions(0, 5, lambda n: n - 2, 0, 1)


def test_wrong_length_rejected():
    with pytest.raises(ValueError):
        CoefficientSet(IndexWindow(0, 4), [1, 1, 1], [0] * 4, [1] * 4)


def test_shifted_replaces_q():
    c = CoefficientSet.from_functions(0, 6, 1, lambda n: n, lambda n: n + 1, scalar.RATIONAL)
    cs = c.shifted(QQ_I(2, 1))
    for n in range(1, 7):
        assert cs.q(n) == c.q(n) - QQ_I(2, 1) * c.r(n)


def test_rational_mode_inferred_from_values():
    u = Sequence(0, 2, [QQ_I(1, 0), 2, 3])
    assert u.mode == scalar.RATIONAL


@settings(max_examples=30, deadline=None)
@given(st.data())
def test_jacobi_is_linear(data):
    ints = st.integers(-9, 9)
    m = data.draw(st.integers(3, 9))
    p = data.draw(st.lists(ints.filter(bool), min_size=m - 1, max_size=m - 1))
    q = data.draw(st.lists(ints, min_size=m - 1, max_size=m - 1))
    r = data.draw(st.lists(ints, min_size=m - 1, max_size=m - 1))
    c = CoefficientSet((0, m - 1), p, q, r, scalar.RATIONAL)
    u = data.draw(st.lists(ints, min_size=m, max_size=m))
    v = data.draw(st.lists(ints, min_size=m, max_size=m))
    a, b, lam = data.draw(ints), data.draw(ints), data.draw(ints)
    U, V = Sequence(0, m - 1, u, scalar.RATIONAL), Sequence(0, m - 1, v, scalar.RATIONAL)
    W = Sequence(0, m - 1, [a * x + b * y for x, y in zip(u, v)], scalar.RATIONAL)
    lhs = jacobi_residuals(c, W, lam)
    rhs = jacobi_residuals(c, U, lam) * scalar.to_rational(a) + jacobi_residuals(c, V, lam) * scalar.to_rational(b)
    assert all(x == y for x, y in zip(lhs, rhs))


def test_relative_residual_scale_free():
    c = CoefficientSet.from_functions(0, 8, 1, 0, 1)
    u = Sequence.from_function(lambda n: 3.0 ** n, 0, 8, scalar.FLOAT)
    res = relative_residuals(c, u, 4 / 3)
    assert np.all(res < 1e-15)
    big = Sequence(0, 8, u.values * 1e200, scalar.FLOAT)
    assert np.all(relative_residuals(c, big, 4 / 3) < 1e-15)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import QQ_I

from spps import scalar
from spps.seed import (NonRealCoefficients, SeedNotFound, SeedVanishes, auto_seed, build_seed_complex,
                       build_seed_search, certify, constant_seed, default_rng, polya_residual,
                       solve_recurrence)
from spps.seqgrid import CoefficientSet, Sequence, apply_jacobi, jacobi_residuals
from spps.series import laguerre_closed_form

from conftest import random_gaussian_rational, random_rational_case

R = scalar.RATIONAL


def laguerre(N=10, mode=R):
    return CoefficientSet.from_functions(0, N, lambda s: s + 1, 0, -1, mode)


@pytest.mark.parametrize("lo", [-3, 0, 4])
def test_recurrence_linear_solution(lo):
    c = CoefficientSet.from_functions(lo, lo + 8, 1, 0, 1, R)
    u = solve_recurrence(c, 0, 0, 1)
    assert [scalar.to_complex(v).real for v in u.values] == list(range(9))


@pytest.mark.parametrize("lam", [1, "1/3", 2, (1, 1)])
def test_recurrence_reproduces_laguerre(lam):
    c = laguerre()
    lam_r = scalar.to_rational(lam)
    u = solve_recurrence(c, lam, 1, 1 - lam_r)
    for n in range(11):
        assert u(n) == laguerre_closed_form(n, lam)


def test_recurrence_from_interior_start():
    c = CoefficientSet.from_functions(0, 8, 1, 0, 1, R)
    u = solve_recurrence(c, 0, 3, 4, start=3)
    assert [u(n) for n in range(9)] == [scalar.to_rational(n) for n in range(9)]


def test_recurrence_residual_exact_random(rng):
    for _ in range(5):
        c, s, _ = random_rational_case(rng, 20)
        lam = random_gaussian_rational(rng, 1)[0]
        u = solve_recurrence(c, lam, QQ_I(1, 2), QQ_I(-3, 1))
        assert all(scalar.is_zero(v) for v in jacobi_residuals(c, u, lam))


def test_complex_seed_delta2():
    c = CoefficientSet.from_functions(2, 9, 1, 0, 1, R)
    s = build_seed_complex(c, 0)
    # u = 1 - (n - lo) from (1, 0), v = n - lo from (0, 1)
    assert [s.u0(n) for n in range(2, 10)] == [QQ_I(3 - n, n - 2) for n in range(2, 10)]
    assert s.min_abs == 1.0
    assert s.residual_bound == 0.0


def test_complex_seed_laguerre_real_part_is_one():
    s = build_seed_complex(laguerre(), 0, init_u=(1, 1))
    assert all(v.x == 1 for v in s.u0.values)


def test_complex_seed_rejects_complex_coefficients():
    c = CoefficientSet.from_functions(0, 6, 1, (0, 1), 1, R)
    with pytest.raises(NonRealCoefficients):
        build_seed_complex(c, 0)


def test_complex_seed_accepts_complex_lambda0_if_shifted_real():
    # q - λ0 r real although λ0 is complex: r = 0
    c = CoefficientSet.from_functions(0, 6, 1, 1, 0, R)
    assert build_seed_complex(c, (0, 5)).min_abs > 0


def test_complex_seed_dependent_init():
    with pytest.raises(ValueError):
        build_seed_complex(laguerre(), 0, init_u=(1, 2), init_v=(2, 4))


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_complex_seed_never_vanishes_for_real_coefficients(data):
    m = data.draw(st.integers(3, 25))
    f = st.floats(-3, 3, allow_nan=False)
    p = data.draw(st.lists(f.filter(lambda x: abs(x) > 0.05), min_size=m, max_size=m))
    q = data.draw(st.lists(f, min_size=m, max_size=m))
    r = data.draw(st.lists(f, min_size=m, max_size=m))
    lam0 = data.draw(f)
    c = CoefficientSet((0, m), p, q, r)
    s = build_seed_complex(c, lam0)
    assert s.min_abs > 0
    assert np.all(np.abs(s.u0.to_complex()) > 0)


def test_seed_search_real_first_attempt():
    c = laguerre(mode=scalar.FLOAT)
    s = build_seed_search(c, 0.3, attempts=1, rng=np.random.default_rng(0))
    assert s.min_abs > 0


def engineered():
    # with u(0) = u(1) = 1, u(2) = (2 - q(1)) - 1 vanishes for q(1) = 1
    return CoefficientSet((0, 6), [1] * 6, [1, 0, 0, 0, 0, 0], [1] * 6, R)


def test_seed_search_reports_common_zero():
    with pytest.raises(SeedNotFound) as err:
        build_seed_search(engineered(), 0, attempts=1, initial=[(1, 1)])
    assert err.value.indices == (2,)


def test_seed_search_recovers_with_other_initial_data():
    s = build_seed_search(engineered(), 0, attempts=4, initial=[(1, 1)], rng=default_rng(3))
    assert s.min_abs > 0


def test_seed_search_needs_an_attempt():
    with pytest.raises(ValueError):
        build_seed_search(engineered(), 0, attempts=0)


def test_seed_search_keeps_best_candidate():
    c = CoefficientSet.from_functions(0, 10, 1, 0, 1)
    s = build_seed_search(c, 0, attempts=1, initial=[(1, 1.01)])
    best = build_seed_search(c, 0, attempts=2, initial=[(1, 1.01), (1, 1)])
    assert best.min_abs >= s.min_abs
    assert best.min_abs == 1.0


def test_default_rng_env(monkeypatch):
    monkeypatch.setenv("SPPS_SEED", "7")
    a = default_rng().standard_normal(3)
    b = np.random.default_rng(7).standard_normal(3)
    assert np.array_equal(a, b)


def test_seed_search_deterministic():
    c = CoefficientSet.from_functions(0, 12, (1, 0.5), 0.2, 1)
    a = build_seed_search(c, -1, rng=default_rng(11))
    b = build_seed_search(c, -1, rng=default_rng(11))
    assert np.array_equal(a.u0.to_complex(), b.u0.to_complex())


def test_certify_rejects_vanishing():
    c = CoefficientSet.from_functions(0, 6, 1, 0, 1, R)
    with pytest.raises(SeedVanishes):
        certify(c, [0, 1, 2, 3, 4, 5, 6], 0)


def test_certify_reports_residual():
    c = CoefficientSet.from_functions(0, 6, 1, 0, 1)
    s = certify(c, [1, 1, 1, 2, 1, 1, 1], 0)
    assert s.residual_bound == pytest.approx(2.0)
    with pytest.raises(ValueError):
        s.check(1e-10)


def test_auto_seed_prefers_constant():
    s = auto_seed(laguerre(), 0)
    assert all(v == QQ_I(1, 0) for v in s.u0.values)


def test_polya_residual_annihilates_seed():
    c = CoefficientSet.from_functions(0, 10, lambda n: n + 2, lambda n: n % 3, 1, R)
    s = build_seed_complex(c, "1/2")
    for n in range(1, 10):
        assert scalar.is_zero(polya_residual(c, s, s.u0, "1/2", n))


def test_polya_residual_constant_seed_reduces_to_operator():
    c = laguerre()
    s = constant_seed(c, 0)
    u = Sequence(0, 10, [n * n - 3 for n in range(11)], R)
    for n in range(1, 10):
        assert polya_residual(c, s, u, 1, n) == apply_jacobi(c, u, 1, n)


def test_polya_residual_matches_operator_random(rng):
    for _ in range(5):
        c, s, _ = random_rational_case(rng, 10)
        u = Sequence(c.lo, c.hi, random_gaussian_rational(rng, c.window.size), R)
        lam = random_gaussian_rational(rng, 1)[0]
        for n in c.window.interior:
            assert polya_residual(c, s, u, lam, n) == apply_jacobi(c, u, lam, n)

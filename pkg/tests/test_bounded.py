import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spps import scalar
from spps.bounded import (DELTA_MAX, SeriesDiagnostic, SignConditionError, TableMismatch,
                          absolute_diagnostics, necessary_diagnostic, op_T, op_T_tilde,
                          phi_bounded_certificate, quasi_derivative, shifted_diagnostic,
                          sufficiency_certificate)
from spps.seed import build_seed_complex, constant_seed, solve_recurrence
from spps.seqgrid import CoefficientSet, OutOfRange, Sequence
from spps.series import build_table, eval_solution, solutions

R = scalar.RATIONAL


def table(c, n0=None):
    return build_table(c, constant_seed(c, 0), c.lo if n0 is None else n0)


def growing(hi=200, lo=0, phase=0.0):
    return CoefficientSet.from_functions(lo, hi, lambda s: 2.0 ** s * np.exp(1j * phase * s), 0, 1)


def test_volterra_identities_exact():
    c = CoefficientSet.from_functions(0, 12, lambda s: s + 2, 0, lambda s: (s % 3) + 1, R)
    n0 = 0
    t, u1, u2 = solutions(c, constant_seed(c, 0), n0)
    a, b = eval_solution(u1, 1), eval_solution(u2, 1)
    inv_p = scalar.zeros((), R)[()]
    for n in range(n0, 13):
        assert a(n) == 1 + op_T(c, a, n0, n)
        assert b(n) == inv_p + op_T(c, b, n0, n)
        if n < 12:
            inv_p = inv_p + 1 / c.p(n)
    r_sum = scalar.zeros((), R)[()]
    phi = Sequence.from_function(lambda n: quasi_derivative(c, a, n) if n < 12 else 0, 0, 12, R)
    for n in range(n0, 12):
        assert phi(n) == r_sum + op_T_tilde(c, phi, n0, n)
        r_sum = r_sum + c.r(n + 1)


def test_operator_range_checks():
    c = CoefficientSet.from_functions(0, 6, 1, 0, 1, R)
    u = solve_recurrence(c, 0, 1, 1)
    with pytest.raises(OutOfRange):
        op_T(c, u, 3, 2)
    with pytest.raises(OutOfRange):
        op_T_tilde(c, u, 0, 7)
    assert scalar.is_zero(op_T(c, u, 2, 3))


def test_necessary_requires_signs():
    with pytest.raises(SignConditionError):
        necessary_diagnostic(CoefficientSet.from_functions(0, 10, -1, 0, 1))
    with pytest.raises(SignConditionError):
        shifted_diagnostic(CoefficientSet.from_functions(0, 10, 1, 0, -1))
    with pytest.raises(SignConditionError):
        necessary_diagnostic(CoefficientSet.from_functions(0, 10, (1, 1), 0, 1))


def test_unit_p_diverges():
    c = CoefficientSet.from_functions(0, 400, 1, 0, 1)
    double, inv_p = necessary_diagnostic(c)
    assert inv_p.partial_sums[-1] == pytest.approx(400)
    assert inv_p.block_ratio() == pytest.approx(2.0, rel=0.02)
    assert inv_p.practical_divergence() and double.practical_divergence()
    assert not sufficiency_certificate(c, table(c)).valid


def test_growing_p_limits():
    # sums start at s = lo; with lo = -1 the double sum tends to Σ_{s≥0} (s+1)/2^s = 4
    c = CoefficientSet.from_functions(-1, 120, lambda s: 2.0 ** s, 0, 1)
    double, inv_p = necessary_diagnostic(c)
    assert double.partial_sums[-1] == pytest.approx(4.0, rel=1e-12)
    assert inv_p.partial_sums[-1] == pytest.approx(4.0, rel=1e-12)
    assert not double.practical_divergence() and not inv_p.practical_divergence()


@pytest.mark.parametrize("f, expected", [
    (lambda s: 1.0, 2.0), (lambda s: 1.0 / (s + 1), 1.0), (lambda s: 1.0 / (s + 1) ** 2, 0.5),
    (lambda s: 0.5 ** s, 0.0),
])
def test_block_ratio(f, expected):
    sums = np.cumsum([f(s) for s in range(1 << 16)])
    d = SeriesDiagnostic("inv_p", 0, sums, True)
    assert d.block_ratio() == pytest.approx(expected, abs=0.02)


def test_practical_divergence_threshold_and_trend():
    d = SeriesDiagnostic("inv_p", 0, np.arange(1.0, 11.0), True)
    assert d.practical_divergence(threshold=5)
    assert not d.practical_divergence(threshold=50)
    assert not SeriesDiagnostic("inv_p", 0, np.arange(10.0, 0, -1), False).practical_divergence()
    assert np.isnan(SeriesDiagnostic("inv_p", 0, np.ones(4), True).block_ratio())


@pytest.mark.parametrize("phase", [0.0, 1.0])
def test_growing_p_certificate(phase):
    c = growing(phase=phase)
    t = table(c)
    cert = sufficiency_certificate(c, t)
    assert cert.valid
    assert cert.delta <= DELTA_MAX
    assert cert.n_star == 2 and cert.delta == pytest.approx(0.5)
    t, u1, u2 = solutions(c, constant_seed(c, 0), c.lo)
    for sol in (u1, u2):
        vals = np.abs(eval_solution(sol, 1).to_complex())
        assert vals.max() <= cert.solution_bound


def test_growing_p_phi_certificate_refused():
    c = growing()
    cert = phi_bounded_certificate(c, table(c))
    assert not cert.valid
    assert cert.solution_bound == np.inf
    assert cert.tails["block_ratio_double_shifted"] == pytest.approx(2.0, rel=0.05)


def test_phi_certificate_decaying_r():
    c = CoefficientSet.from_functions(0, 200, lambda s: 2.0 ** s, 0, lambda s: 0.25 ** s)
    t = table(c)
    cert = phi_bounded_certificate(c, t)
    assert cert.valid
    _, u1, u2 = solutions(c, constant_seed(c, 0), 0)
    r = c.r.to_complex()
    for sol in (u1, u2):
        u = eval_solution(sol, 1)
        # p Δu loses every digit once p is huge; φ(n) = φ(0) + Σ_{τ=1}^{n} r(τ) u(τ) does not
        phi0 = scalar.to_complex(quasi_derivative(c, u, 0))
        phis = np.abs(phi0 + np.concatenate([[0], np.cumsum(r * u.to_complex()[1:])]))
        assert phis.max() <= cert.solution_bound
    assert sufficiency_certificate(c, t).valid


def test_phi_certificate_zero_r():
    c = CoefficientSet.from_functions(0, 60, lambda s: 2.0 ** s, 0, 0)
    cert = phi_bounded_certificate(c, table(c))
    assert cert.valid and cert.delta == 0.0


def test_quadratic_p_flags_only_double_series():
    c = CoefficientSet.from_functions(0, 1 << 15, lambda s: (s + 1.0) ** 2, 0, 1)
    double, inv_p = necessary_diagnostic(c)
    assert double.practical_divergence()
    assert not inv_p.practical_divergence()


def test_certificate_needs_matching_table():
    c = CoefficientSet.from_functions(0, 30, lambda s: 2.0 ** s, 0, 1)
    with pytest.raises(TableMismatch):
        sufficiency_certificate(c, build_table(c, build_seed_complex(c, 0), 0))
    cq = CoefficientSet.from_functions(0, 30, lambda s: 2.0 ** s, 1, 1)
    with pytest.raises(TableMismatch):
        sufficiency_certificate(cq, table(cq))


def test_certificate_horizon_range():
    c = growing(40)
    with pytest.raises(OutOfRange):
        sufficiency_certificate(c, table(c), horizon=41)


def test_certificate_dict():
    c = growing(60)
    d = sufficiency_certificate(c, table(c)).to_dict()
    assert d["scope"] == "window-relative"
    assert {"delta_x", "delta_y", "block_ratio_inv_p", "block_ratio_double_rp"} <= set(d)


def test_absolute_diagnostics_match_signed():
    c = CoefficientSet.from_functions(0, 50, lambda s: s + 1.0, 0, lambda s: 1.0 / (s + 1))
    signed = necessary_diagnostic(c) + (shifted_diagnostic(c),)
    for a, b in zip(absolute_diagnostics(c), signed):
        assert a.kind == b.kind and np.allclose(a.partial_sums, b.partial_sums)


@settings(max_examples=15, deadline=None)
@given(base=st.floats(1.5, 4.0), rscale=st.floats(0.0, 3.0), phase=st.floats(0.0, 3.0),
       length=st.integers(40, 120))
def test_certificate_bound_is_sound(base, rscale, phase, length):
    c = CoefficientSet.from_functions(0, length, lambda s: base ** s * np.exp(1j * phase * s), 0,
                                      lambda s: rscale)
    t = table(c)
    cert = sufficiency_certificate(c, t)
    if not cert.valid:
        return
    _, u1, u2 = solutions(c, constant_seed(c, 0), 0)
    for sol in (u1, u2):
        assert np.abs(eval_solution(sol, 1).to_complex()).max() <= cert.solution_bound * (1 + 1e-12)


@settings(max_examples=15, deadline=None)
@given(base=st.floats(1.2, 4.0), length=st.integers(20, 80))
def test_partial_sums_monotone(base, length):
    c = CoefficientSet.from_functions(0, length, lambda s: base ** s, 0, lambda s: 1.0 / (s + 1))
    for d in necessary_diagnostic(c) + (shifted_diagnostic(c),):
        assert d.trend
        assert np.all(np.diff(d.partial_sums) >= 0)


def laguerre_like():
    return CoefficientSet.from_functions(0, 10, lambda s: s + 2, 0, lambda s: (s % 3) + 1, R)


def table_row(t, which, i, c):
    get = t.x if which == "X" else t.y
    return Sequence(c.lo, c.hi, [get(i, n) for n in range(c.lo, c.hi + 1)], R)


@pytest.mark.parametrize("n0", [0, 4])
def test_T_iterates_reproduce_table(n0):
    c = laguerre_like()
    t = table(c, n0)
    for k in range(1, 5):
        x_prev, x = table_row(t, "X", 2 * k - 2, c), table_row(t, "X", 2 * k, c)
        y_prev, y = table_row(t, "Y", 2 * k - 1, c), table_row(t, "Y", 2 * k + 1, c)
        for n in range(n0, c.hi + 1):
            assert x(n) == op_T(c, x_prev, n0, n)
            assert y(n) == op_T(c, y_prev, n0, n)


def test_T_tilde_chain_reproduces_table():
    c = laguerre_like()
    t = table(c, 0)
    for k in range(1, 5):
        prev, cur = table_row(t, "X", 2 * k - 1, c), table_row(t, "X", 2 * k + 1, c)
        for n in range(0, c.hi):
            assert cur(n) == op_T_tilde(c, prev, 0, n)


def test_T_tilde_unit_p_example():
    c = CoefficientSet.from_functions(0, 8, 1, 0, lambda s: s * s - 3, R)
    one = solve_recurrence(c, 0, 1, 1)
    for n in range(2, 9):
        want = sum(((s - 2 + 1) * c.r(s + 1) for s in range(2, n)), scalar.zeros((), R)[()])
        assert op_T_tilde(c, one, 2, n) == want


def test_quasi_derivative_is_odd_X_even_Y():
    c = laguerre_like()
    t, u1, u2 = solutions(c, constant_seed(c, 0), 0)
    a, b = eval_solution(u1, 1), eval_solution(u2, 1)
    for n in range(0, c.hi):
        phi1 = sum((t.x(i, n) for i in range(1, t.max_order + 1, 2)), scalar.zeros((), R)[()])
        phi2 = sum((t.y(i, n) for i in range(0, t.max_order + 1, 2)), scalar.zeros((), R)[()])
        assert quasi_derivative(c, a, n) == phi1
        assert quasi_derivative(c, b, n) == phi2
        if n >= 1:
            # Δφ(n-1) = r(n) u(n)
            assert quasi_derivative(c, a, n) - quasi_derivative(c, a, n - 1) == c.r(n) * a(n)
    assert scalar.is_zero(quasi_derivative(c, solve_recurrence(c, 0, 5, 5), 3))

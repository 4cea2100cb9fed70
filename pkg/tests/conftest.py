import numpy as np
import pytest
from sympy import QQ_I

from spps import scalar
from spps.seed import build_seed_search
from spps.seqgrid import CoefficientSet


def cz(rng, size=None):
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_complex_case(rng, max_len=40):
    """Random complex problem in the well-conditioned regime used throughout.

    Coefficients are O(1) perturbations of ``p = r = 1, q = 0``, ``λ0`` sits
    near -2 and the evaluation points stay within about 0.2 of it, so the
    finite power sums have little cancellation.
    """
    L = int(rng.integers(3, max_len + 1))
    lo = int(rng.integers(-5, 5))
    hi = lo + L - 1
    m = hi - lo
    c = CoefficientSet((lo, hi), 1 + 0.3 * cz(rng, m), 0.3 * cz(rng, m), 1 + 0.3 * cz(rng, m))
    lam0 = complex(-2 + 0.5 * cz(rng))
    n0 = int(rng.integers(lo, hi))
    s = build_seed_search(c, lam0, rng=rng)
    return c, s, n0


def random_gaussian_rational(rng, size, spread=5, den=4):
    re = rng.integers(-spread, spread + 1, size=size)
    im = rng.integers(-spread, spread + 1, size=size)
    d1 = rng.integers(1, den + 1, size=size)
    d2 = rng.integers(1, den + 1, size=size)
    return [scalar.to_rational((f"{a}/{b}", f"{c}/{d}")) for a, b, c, d in zip(re, d1, im, d2)]


def random_rational_case(rng, max_len=12):
    """Random Gaussian-rational coefficients with p bounded away from zero."""
    L = int(rng.integers(3, max_len + 1))
    lo = int(rng.integers(-3, 3))
    hi = lo + L - 1
    m = hi - lo
    p = [v + QQ_I(3, 0) for v in random_gaussian_rational(rng, m, spread=2)]
    p = [v if v else QQ_I(1, 0) for v in p]
    q = random_gaussian_rational(rng, m)
    r = random_gaussian_rational(rng, m)
    c = CoefficientSet((lo, hi), p, q, r, scalar.RATIONAL)
    lam0 = random_gaussian_rational(rng, 1)[0]
    n0 = int(rng.integers(lo, hi))
    s = build_seed_search(c, lam0, rng=rng)
    return c, s, n0


@pytest.fixture
def rng():
    return np.random.default_rng(12345)

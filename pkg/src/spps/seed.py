"""Nonvanishing seed solutions ``u0`` of the ``λ = λ0`` equation."""

import os
from dataclasses import dataclass

import numpy as np
from sympy import QQ_I

from . import scalar
from .scalar import RATIONAL
from .seqgrid import OutOfRange, Sequence, jacobi_residuals, relative_residuals

DEFAULT_SEED = 271828


class NonRealCoefficients(ValueError):
    pass


class SeedNotFound(RuntimeError):
    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class SeedVanishes(ValueError):
    pass


@dataclass(frozen=True)
class SeedSolution:
    """A certified seed.

    ``residual_bound`` is the largest ``|L u0 - λ0 r u0|`` over the interior
    (exactly 0 for an exact rational seed); ``relative_residual`` is the same
    quantity scaled by the operator's term magnitudes.
    """

    u0: Sequence
    lambda0: object
    residual_bound: float
    min_abs: float
    relative_residual: float = 0.0

    @property
    def mode(self):
        return self.u0.mode

    def check(self, tol):
        """Raise unless the seed residual is within ``tol`` (relative)."""
        if self.relative_residual > tol:
            raise ValueError(f"seed relative residual {self.relative_residual:.3g} exceeds {tol:.3g}")
        return self


def default_rng(seed=None):
    """Generator for seed searches; ``SPPS_SEED`` overrides the fixed default."""
    if seed is None:
        seed = int(os.environ.get("SPPS_SEED", DEFAULT_SEED))
    return np.random.default_rng(seed)


def solve_recurrence(c, lam, v_lo, v_lo1, start=None):
    """Solve ``Lu = λ r u`` on the whole window from two consecutive values.

    ``u(start) = v_lo`` and ``u(start+1) = v_lo1``; ``start`` defaults to
    ``lo``.  Values right of ``start+1`` come from the forward recurrence and
    values left of ``start`` from the backward one (both need ``p != 0``).
    """
    lo, hi, mode = c.lo, c.hi, c.mode
    start = lo if start is None else start
    if not lo <= start < hi:
        raise OutOfRange(f"start {start} must lie in [{lo}, {hi - 1}]")
    lam = scalar.convert(lam, mode)
    p, q, r = c.p, c.q, c.r
    u = [None] * (hi - lo + 1)
    u[start - lo] = scalar.convert(v_lo, mode)
    u[start + 1 - lo] = scalar.convert(v_lo1, mode)
    for n in range(start + 1, hi):
        diag = p(n) + p(n - 1) - q(n) + lam * r(n)
        u[n + 1 - lo] = (diag * u[n - lo] - p(n - 1) * u[n - 1 - lo]) / p(n)
    for n in range(start, lo, -1):
        diag = p(n) + p(n - 1) - q(n) + lam * r(n)
        u[n - 1 - lo] = (diag * u[n - lo] - p(n) * u[n + 1 - lo]) / p(n - 1)
    return Sequence(lo, hi, u, mode)


def certify(c, u0, lambda0):
    """Wrap an explicit sequence as a :class:`SeedSolution`.

    Raises :class:`SeedVanishes` if ``u0`` has a zero on the window.
    """
    if not isinstance(u0, Sequence):
        u0 = Sequence(c.lo, c.hi, u0, c.mode)
    if (u0.lo, u0.hi) != (c.lo, c.hi):
        raise ValueError("seed must span the coefficient window")
    if u0.mode != c.mode:
        u0 = Sequence(u0.lo, u0.hi, u0.values, c.mode)
    zeros = [n for n, v in zip(u0.indices(), u0.values) if scalar.is_zero(v)]
    if zeros:
        raise SeedVanishes(f"seed vanishes at n = {zeros}")
    lambda0 = scalar.convert(lambda0, c.mode)
    res = scalar.magnitudes(jacobi_residuals(c, u0, lambda0))
    rel = relative_residuals(c, u0, lambda0)
    return SeedSolution(u0, lambda0, float(res.max()), float(scalar.magnitudes(u0.values).min()),
                        float(rel.max()))


def constant_seed(c, lambda0):
    """``u0 ≡ 1``, valid when ``q - λ0 r`` vanishes identically."""
    return certify(c, scalar.ones(c.window.size, c.mode), lambda0)


def build_seed_complex(c, lambda0, init_u=(1, 0), init_v=(0, 1)):
    """``u0 = u + i v`` from two real solutions with independent initial data.

    Requires real ``p`` and ``q - λ0 r``.  Two independent real solutions can
    not vanish at the same point, so ``u0`` never vanishes.
    """
    mode = c.mode
    lambda0 = scalar.convert(lambda0, mode)
    shifted = c.q.values - c.r.values * lambda0
    if not all(scalar.is_real(v) for v in c.p.values) or not all(scalar.is_real(v) for v in shifted):
        raise NonRealCoefficients("p and q - λ0 r must be real; use build_seed_search")
    for pair in (init_u, init_v):
        if not all(scalar.is_real(scalar.convert(x, mode)) for x in pair):
            raise NonRealCoefficients("initial data must be real")
    a, b = (scalar.convert(x, mode) for x in init_u)
    d, e = (scalar.convert(x, mode) for x in init_v)
    if scalar.is_zero(a * e - b * d):
        raise ValueError("initial pairs are linearly dependent")
    u = solve_recurrence(c, lambda0, a, b)
    v = solve_recurrence(c, lambda0, d, e)
    i = QQ_I(0, 1) if mode == RATIONAL else 1j
    return certify(c, u.values + v.values * i, lambda0)


def _random_pair(rng, mode):
    if mode == RATIONAL:
        num = rng.integers(-9, 10, size=4)
        den = rng.integers(1, 6, size=4)
        vals = [scalar.to_rational((f"{num[k]}/{den[k]}", f"{num[k + 1]}/{den[k + 1]}")) for k in (0, 2)]
        return tuple(vals)
    z = rng.standard_normal(4)
    return complex(z[0], z[1]), complex(z[2], z[3])


def build_seed_search(c, lambda0, attempts=8, rng=None, initial=()):
    """Randomised seed search for complex coefficients.

    Tries the pairs in ``initial`` first, then random initial data, up to
    ``attempts`` candidates in total, and keeps the nonvanishing candidate
    with the largest ``min |u0|``.
    """
    if attempts < 1:
        raise ValueError("attempts must be at least 1")
    rng = default_rng() if rng is None else rng
    lambda0 = scalar.convert(lambda0, c.mode)
    best = None
    vanished = None
    candidates = list(initial)[:attempts]
    while len(candidates) < attempts:
        candidates.append(_random_pair(rng, c.mode))
    for a, b in candidates:
        u = solve_recurrence(c, lambda0, a, b)
        zero_at = {n for n, v in zip(u.indices(), u.values) if scalar.is_zero(v)}
        if zero_at:
            vanished = zero_at if vanished is None else vanished & zero_at
            continue
        s = certify(c, u, lambda0)
        if best is None or s.min_abs > best.min_abs:
            best = s
    if best is None:
        where = sorted(vanished or ())
        raise SeedNotFound(f"every candidate vanished; common zeros at n = {where}", where)
    return best


def auto_seed(c, lambda0, rng=None):
    """Constant seed if it works, else the complex construction, else search."""
    lambda0 = scalar.convert(lambda0, c.mode)
    if all(scalar.is_zero(v) for v in c.q.values - c.r.values * lambda0):
        return constant_seed(c, lambda0)
    try:
        return build_seed_complex(c, lambda0)
    except NonRealCoefficients:
        return build_seed_search(c, lambda0, rng=rng)


def polya_residual(c, s, u, lam, n):
    """The operator in factored form through the seed.

    ``(1/u0(n)) Δ[p(n-1) u0(n-1) u0(n) Δ(u(n-1)/u0(n-1))] - (λ-λ0) r(n) u(n)``,
    which equals ``apply_jacobi(c, u, lam, n)`` whenever ``u0`` solves the
    ``λ0`` equation.
    """
    if not c.lo < n < c.hi:
        raise OutOfRange(f"{n} is not interior to [{c.lo}, {c.hi}]")
    mode = c.mode
    lam = scalar.convert(lam, mode)
    u0 = s.u0

    def flux(m):
        return c.p(m) * u0(m) * u0(m + 1) * (u(m + 1) / u0(m + 1) - u(m) / u0(m))

    return (flux(n) - flux(n - 1)) / u0(n) - (lam - s.lambda0) * c.r(n) * u(n)


__all__ = [
    "SeedSolution", "NonRealCoefficients", "SeedNotFound", "SeedVanishes", "solve_recurrence",
    "certify", "constant_seed", "build_seed_complex", "build_seed_search", "auto_seed",
    "polya_residual", "default_rng",
]

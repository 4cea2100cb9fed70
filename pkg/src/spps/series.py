"""Coefficient tables X⁽ⁱ⁾, Y⁽ⁱ⁾ and the finite-sum solutions u1, u2.

With a seed ``u0`` solving the ``λ0`` equation and a centre ``n0``, the tables
are built by alternating star sums

    X⁽ⁱ⁾(n) = Σ*_{s=n0}^{n-1} X⁽ⁱ⁻¹⁾(s) / (p(s) u0(s) u0(s+1))        i even
    X⁽ⁱ⁾(n) = Σ*_{s=n0}^{n-1} u0(s+1)² r(s+1) X⁽ⁱ⁻¹⁾(s+1)            i odd

(``Y`` swaps the two parities), starting from ``X⁽⁰⁾ = Y⁽⁰⁾ = 1``.  Then

    u1(n) = u0(n) Σ_k (λ-λ0)^k X⁽²ᵏ⁾(n),   u2(n) = u0(n) Σ_k (λ-λ0)^k Y⁽²ᵏ⁺¹⁾(n)

and both sums are finite: ``X⁽²ᵏ⁾`` vanishes on ``n0-k+1..n0+k`` and
``Y⁽²ᵏ⁺¹⁾`` on ``n0-k..n0+k``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import scalar
from .scalar import FLOAT, RATIONAL
from .seqgrid import OutOfRange, Sequence, star_sum_array

# Float-mode site polynomials whose largest coefficient exceeds 2**SCALE_EXP
# are stored normalised, with the power of two kept separately.
SCALE_EXP = 256


class InsufficientOrder(ValueError):
    pass


class SeedResidualTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SppsTable:
    n0: int
    max_order: int
    X: np.ndarray
    Y: np.ndarray
    seed: object
    coeffs: object

    @property
    def lo(self):
        return self.coeffs.lo

    @property
    def hi(self):
        return self.coeffs.hi

    @property
    def mode(self):
        return self.coeffs.mode

    def x(self, i, n):
        return self.X[i, self._col(n)]

    def y(self, i, n):
        return self.Y[i, self._col(n)]

    def x_seq(self, i):
        return Sequence(self.lo, self.hi, self.X[i], self.mode)

    def y_seq(self, i):
        return Sequence(self.lo, self.hi, self.Y[i], self.mode)

    def _col(self, n):
        if not self.lo <= n <= self.hi:
            raise OutOfRange(f"index {n} outside [{self.lo}, {self.hi}]")
        return n - self.lo


def default_order(lo, hi, n0):
    return 2 * max(hi - n0, n0 - lo) + 1


def build_table(c, s, n0, max_order=None, tol=None):
    """Fill ``X[i]``, ``Y[i]`` for ``i = 0..max_order`` on the whole window.

    Both parities of both tables are kept.  ``tol`` (relative) rejects a seed
    whose residual is too large.
    """
    lo, hi, mode = c.lo, c.hi, c.mode
    if not lo <= n0 <= hi - 1:
        raise OutOfRange(f"n0 = {n0} must lie in [{lo}, {hi - 1}]")
    if max_order is None:
        max_order = default_order(lo, hi, n0)
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    if s.mode != mode:
        raise ValueError("seed and coefficients use different arithmetic modes")
    if tol is not None and s.relative_residual > tol:
        raise SeedResidualTooLarge(
            f"seed relative residual {s.relative_residual:.3g} exceeds tolerance {tol:.3g}")

    u0 = s.u0.values
    w = 1 / (c.p.values * u0[:-1] * u0[1:])        # on [lo, hi-1]
    rho = u0[1:] * u0[1:] * c.r.values             # rho(s) = u0(s+1)² r(s+1), s on [lo, hi-1]

    size = hi - lo + 1
    X = scalar.zeros((max_order + 1, size), mode)
    Y = scalar.zeros((max_order + 1, size), mode)
    X[0] = scalar.ones(size, mode)
    Y[0] = scalar.ones(size, mode)
    for i in range(1, max_order + 1):
        if i % 2 == 0:
            X[i] = star_sum_array(X[i - 1][:-1] * w, lo, n0)
            Y[i] = star_sum_array(rho * Y[i - 1][1:], lo, n0)
        else:
            X[i] = star_sum_array(rho * X[i - 1][1:], lo, n0)
            Y[i] = star_sum_array(Y[i - 1][:-1] * w, lo, n0)
    X.flags.writeable = False
    Y.flags.writeable = False
    return SppsTable(n0, max_order, X, Y, s, c)


@dataclass(frozen=True, eq=False)
class LambdaPolySolution:
    """Per-site polynomials in ``(λ - λ0)``.

    ``u(n) = 2**exponents[n-lo] * Σ_k sites[n-lo][k] (λ-λ0)^k``.  Exponents
    are zero except for float-mode sites that needed rescaling.
    """

    n0: int
    lambda0: object
    lo: int
    hi: int
    sites: tuple
    which: str
    mode: str
    exponents: tuple = field(default=())

    def coefficients(self, n):
        """Unscaled coefficient array of the site-``n`` polynomial."""
        if not self.lo <= n <= self.hi:
            raise OutOfRange(f"index {n} outside [{self.lo}, {self.hi}]")
        c = self.sites[n - self.lo]
        e = self.exponents[n - self.lo] if self.exponents else 0
        return c * 2.0 ** e if e else c

    def degree(self, n):
        """Length-based degree; -1 for the zero polynomial."""
        return len(self.sites[n - self.lo]) - 1

    def indices(self):
        return range(self.lo, self.hi + 1)


def _branch_degree(n, n0, which):
    if which == "u1":
        return n - n0 - 1 if n > n0 else n0 - n
    return abs(n - n0) - 1


def _assemble(t, which):
    lo, hi, n0, mode = t.lo, t.hi, t.n0, t.mode
    table = t.X if which == "u1" else t.Y
    offset = 0 if which == "u1" else 1
    need = max(2 * _branch_degree(n, n0, which) + offset for n in range(lo, hi + 1))
    if need > t.max_order:
        raise InsufficientOrder(f"{which} needs table order {need}, table has {t.max_order}")
    u0 = t.seed.u0.values
    sites, exps = [], []
    for j, n in enumerate(range(lo, hi + 1)):
        K = _branch_degree(n, n0, which)
        coeffs = scalar.zeros(K + 1, mode)
        for k in range(K + 1):
            coeffs[k] = u0[j] * table[2 * k + offset, j]
        e = 0
        if mode == FLOAT and K >= 0:
            big = np.max(np.abs(coeffs))
            if np.isfinite(big) and big > 2.0 ** SCALE_EXP:
                e = math.frexp(big)[1]
                coeffs = coeffs * 2.0 ** -e
        coeffs.flags.writeable = False
        sites.append(coeffs)
        exps.append(e)
    return LambdaPolySolution(n0, t.seed.lambda0, lo, hi, tuple(sites), which, mode, tuple(exps))


def assemble_u1(t):
    """Site coefficients ``u0(n) X⁽²ᵏ⁾(n)`` up to the branch-dependent degree."""
    return _assemble(t, "u1")


def assemble_u2(t):
    """Site coefficients ``u0(n) Y⁽²ᵏ⁺¹⁾(n)``; the site ``n0`` is the zero polynomial."""
    return _assemble(t, "u2")


def eval_solution(sol, lam):
    """Evaluate every site polynomial at ``λ`` by Horner's rule."""
    mode = sol.mode
    t = scalar.convert(lam, mode) - sol.lambda0
    out = []
    for j, coeffs in enumerate(sol.sites):
        acc = scalar.zeros((), mode)[()]
        for ck in coeffs[::-1]:
            acc = acc * t + ck
        e = sol.exponents[j] if sol.exponents else 0
        out.append(acc * 2.0 ** e if e else acc)
    return Sequence(sol.lo, sol.hi, out, mode)


def evaluation_condition(sol, lam):
    """Per-site cancellation factor ``Σ_k |c_k| |λ-λ0|^k / |u(n)|``.

    In float mode about ``log10`` of this many digits are lost when the site
    polynomial is summed; large values flag evaluation points far from ``λ0``.
    Sites where ``u(n) = 0`` report ``inf`` (or 1 if the polynomial is zero).
    """
    t = abs(scalar.to_complex(scalar.convert(lam, sol.mode) - sol.lambda0))
    vals = scalar.magnitudes(eval_solution(sol, lam).values)
    out = np.empty(len(sol.sites))
    for j, n in enumerate(sol.indices()):
        mags = scalar.magnitudes(sol.coefficients(n))
        num = float(np.sum(mags * t ** np.arange(len(mags)))) if len(mags) else 0.0
        out[j] = 1.0 if num == 0 else (num / vals[j] if vals[j] else np.inf)
    return out


def solutions(c, s, n0=None, max_order=None, tol=None):
    """Convenience: ``(table, u1, u2)`` for a coefficient set and seed."""
    n0 = c.lo if n0 is None else n0
    t = build_table(c, s, n0, max_order, tol)
    return t, assemble_u1(t), assemble_u2(t)


def casoratian(c, u, v, n):
    """``u(n) v(n+1) - u(n+1) v(n)``."""
    if not c.lo <= n < c.hi:
        raise OutOfRange(f"casoratian needs n, n+1 in [{c.lo}, {c.hi}]")
    return u(n) * v(n + 1) - u(n + 1) * v(n)


def normalized_pair(u1, u2, n0):
    """Solutions ``e1, e2`` in the span of ``u1, u2`` with
    ``(e1(n0), e1(n0+1)) = (1, 0)`` and ``(e2(n0), e2(n0+1)) = (0, 1)``.

    Any two bases of the same solution space give the same pair, which makes
    this the natural way to compare constructions that used different seeds.
    """
    a, b = u1(n0), u1(n0 + 1)
    c, d = u2(n0), u2(n0 + 1)
    w = a * d - b * c
    if scalar.is_zero(w):
        raise ValueError("u1 and u2 are linearly dependent at n0")
    e1 = (u1.values * d - u2.values * b) / w
    e2 = (u2.values * a - u1.values * c) / w
    return Sequence(u1.lo, u1.hi, e1, u1.mode), Sequence(u1.lo, u1.hi, e2, u1.mode)


def falling_factorial(n, k):
    """``n (n-1) ... (n-k+1)``; the empty product for ``k = 0`` is 1."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    out = 1
    for j in range(k):
        out *= n - j
    return out


def laguerre_coefficients(n):
    """Exact coefficients of ``Σ_k C(n,k) (-λ)^k / k!`` in powers of λ."""
    return [Fraction((-1) ** k * math.comb(n, k), math.factorial(k)) for k in range(n + 1)]


def laguerre_closed_form(n, lam):
    """Laguerre polynomial ``Σ_{k=0}^{n} C(n,k) (-λ)^k / k!``.

    Exact for integer/rational/Gaussian-rational ``lam``; complex otherwise.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    exact = isinstance(lam, (int, Fraction, scalar.GaussianRational, str, tuple, list))
    lam = scalar.to_rational(lam) if exact else complex(lam)
    acc = scalar.to_rational(0) if exact else 0j
    for ck in reversed(laguerre_coefficients(n)):
        acc = acc * lam + (scalar.to_rational(ck) if exact else float(ck))
    return acc


__all__ = [
    "SppsTable", "LambdaPolySolution", "InsufficientOrder", "SeedResidualTooLarge",
    "build_table", "default_order", "assemble_u1", "assemble_u2", "eval_solution", "solutions",
    "evaluation_condition",
    "casoratian", "normalized_pair", "falling_factorial", "laguerre_coefficients",
    "laguerre_closed_form", "RATIONAL",
]

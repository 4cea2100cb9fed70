"""Two-point eigenvalue problems via the characteristic polynomial in λ.

Every solution is ``c1 u1 + c2 u2``; imposing the two boundary conditions
gives a 2x2 linear system whose determinant is a polynomial in ``(λ - λ0)``.
Its roots are the eigenvalues.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import scalar
from .scalar import FLOAT, RATIONAL
from .seqgrid import relative_residuals
from .series import eval_solution

TRIM_RTOL = 1e-13
CLUSTER_RTOL = 1e-6
REAL_SNAP = 1e-12


class DegenerateProblem(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, message, roots, unconverged):
        super().__init__(message)
        self.roots = roots
        self.unconverged = tuple(unconverged)


class NotAnEigenvalue(ValueError):
    pass


@dataclass(frozen=True)
class BoundarySide:
    """``α(λ) u(site) + β(λ) u(site+1) = 0``.

    ``alpha`` and ``beta`` are tuples of polynomial coefficients in powers of
    λ (lowest first); a plain constant is the common case, and a λ-linear
    ``alpha`` expresses conditions such as ``u(1) = (1 - λ) u(0)``.
    """

    alpha: tuple
    beta: tuple
    site: int

    @classmethod
    def make(cls, alpha, beta, site):
        a = tuple(alpha) if isinstance(alpha, tuple) else (alpha,)
        b = tuple(beta) if isinstance(beta, tuple) else (beta,)
        return cls(a, b, int(site))

    def _poly_is_zero(self, coeffs):
        return all(scalar.is_zero(scalar.to_rational(x)) for x in coeffs)

    @property
    def alpha_zero(self):
        return self._poly_is_zero(self.alpha)

    @property
    def beta_zero(self):
        return self._poly_is_zero(self.beta)

    def alpha_at(self, lam, mode=FLOAT):
        return _horner([scalar.convert(a, mode) for a in self.alpha], scalar.convert(lam, mode), mode)

    def beta_at(self, lam, mode=FLOAT):
        return _horner([scalar.convert(b, mode) for b in self.beta], scalar.convert(lam, mode), mode)

    def apply(self, u, lam):
        mode = u.mode
        val = self.alpha_at(lam, mode) * u(self.site)
        if not self.beta_zero:
            val = val + self.beta_at(lam, mode) * u(self.site + 1)
        return val

    def shifted_coeffs(self, lambda0, mode):
        """``(α, β)`` re-expanded in powers of ``t = λ - λ0``."""
        return _taylor_shift(self.alpha, lambda0, mode), _taylor_shift(self.beta, lambda0, mode)

    def is_real(self):
        return all(scalar.is_real(scalar.to_rational(x)) for x in self.alpha + self.beta)


@dataclass(frozen=True)
class BoundaryCondition:
    left: BoundarySide
    right: BoundarySide

    def __post_init__(self):
        for name, side in (("left", self.left), ("right", self.right)):
            if side.alpha_zero and side.beta_zero:
                raise DegenerateProblem(f"{name} boundary condition has α = β = 0")
        if self.left.site >= self.right.site:
            raise ValueError("left site must be smaller than right site")

    @classmethod
    def dirichlet(cls, left_site, right_site):
        return cls(BoundarySide.make(1, 0, left_site), BoundarySide.make(1, 0, right_site))

    def check_window(self, lo, hi):
        for name, side in (("left", self.left), ("right", self.right)):
            last = side.site if side.beta_zero else side.site + 1
            if side.site < lo or last > hi:
                raise ValueError(f"{name} boundary site {side.site} does not fit in [{lo}, {hi}]")

    def is_real(self):
        return self.left.is_real() and self.right.is_real()


def _horner(coeffs, x, mode):
    acc = scalar.zeros((), mode)[()]
    for ck in reversed(coeffs):
        acc = acc * x + ck
    return acc


def _taylor_shift(coeffs, lambda0, mode):
    a = [scalar.convert(x, mode) for x in coeffs]
    lam0 = scalar.convert(lambda0, mode)
    d = len(a) - 1
    out = scalar.zeros(d + 1, mode)
    for m in range(d + 1):
        acc = scalar.zeros((), mode)[()]
        for j in range(m, d + 1):
            acc = acc + a[j] * math.comb(j, m) * lam0 ** (j - m)
        out[m] = acc
    return out


def poly_mul(a, b, mode):
    if len(a) == 0 or len(b) == 0:
        return scalar.zeros(0, mode)
    out = scalar.zeros(len(a) + len(b) - 1, mode)
    for i, ai in enumerate(a):
        out[i:i + len(b)] = out[i:i + len(b)] + b * ai
    return out


def poly_add(a, b, mode):
    out = scalar.zeros(max(len(a), len(b)), mode)
    out[:len(a)] = out[:len(a)] + a
    out[:len(b)] = out[:len(b)] + b
    return out


def trim(coeffs, mode, rtol=TRIM_RTOL):
    """Drop negligible leading coefficients (exact zeros in rational mode)."""
    coeffs = np.asarray(coeffs)
    if mode == RATIONAL:
        k = len(coeffs)
        while k > 0 and scalar.is_zero(coeffs[k - 1]):
            k -= 1
        return coeffs[:k]
    mags = np.abs(coeffs)
    if len(mags) == 0 or mags.max() == 0:
        return coeffs[:0]
    cut = rtol * mags.max()
    k = len(coeffs)
    while k > 0 and mags[k - 1] <= cut:
        k -= 1
    return coeffs[:k]


@dataclass(frozen=True, eq=False)
class CharPoly:
    """Polynomial in ``t = λ - λ0``, coefficients lowest power first."""

    coeffs: np.ndarray
    lambda0: object
    mode: str

    @property
    def degree(self):
        return len(self.coeffs) - 1

    def __call__(self, lam):
        t = scalar.convert(lam, self.mode) - self.lambda0
        return _horner(list(self.coeffs), t, self.mode)

    def complex_coeffs(self):
        return scalar.to_complex_array(self.coeffs)


def _site_poly(sol, n):
    return np.asarray(sol.coefficients(n))


def _functional(sol, side, lambda0, mode):
    alpha, beta = side.shifted_coeffs(lambda0, mode)
    out = poly_mul(alpha, _site_poly(sol, side.site), mode)
    if not side.beta_zero:
        out = poly_add(out, poly_mul(beta, _site_poly(sol, side.site + 1), mode), mode)
    return out


def char_poly(u1, u2, bc):
    """Determinant of the boundary matrix of ``(u1, u2)`` as a polynomial."""
    if u1.n0 != u2.n0 or (u1.lo, u1.hi) != (u2.lo, u2.hi):
        raise ValueError("u1 and u2 must come from the same table")
    bc.check_window(u1.lo, u1.hi)
    mode, lam0 = u1.mode, u1.lambda0
    l1, l2 = _functional(u1, bc.left, lam0, mode), _functional(u2, bc.left, lam0, mode)
    r1, r2 = _functional(u1, bc.right, lam0, mode), _functional(u2, bc.right, lam0, mode)
    det = poly_add(poly_mul(l1, r2, mode), -poly_mul(l2, r1, mode), mode)
    det = trim(det, mode)
    if len(det) == 0:
        raise DegenerateProblem("characteristic polynomial vanishes identically")
    det = det.copy()
    det.flags.writeable = False
    return CharPoly(det, lam0, mode)


def _root_bound(a):
    """Fujiwara's bound on the root moduli of ``Σ a_k x^k`` (``a`` lowest first)."""
    d = len(a) - 1
    lead = a[-1]
    terms = [abs(a[k] / lead) ** (1.0 / (d - k)) for k in range(d)]
    terms[0] = (abs(a[0] / lead) / 2) ** (1.0 / d)
    return 2 * max(terms)


def _eval_with_derivative(a, z):
    p = a[-1]
    dp = 0j
    for ak in a[-2::-1]:
        dp = dp * z + p
        p = p * z + ak
    return p, dp


def _horner_abs(abs_a, x):
    acc = 0.0
    for ak in abs_a[::-1]:
        acc = acc * x + ak
    return acc


def find_roots(p, tol=1e-14, max_iter=500, polish=3):
    """All roots of a :class:`CharPoly`, as λ values.

    Aberth-Ehrlich simultaneous iteration from points on a circle around the
    root centroid, sized by a coefficient root bound, followed by a few
    Newton steps that are kept only when they reduce ``|p|``.  A root is
    accepted once its correction drops below ``tol`` relative or ``|p(z)|``
    falls to the rounding level of evaluating ``p`` at ``z``.
    """
    a = p.complex_coeffs() if isinstance(p, CharPoly) else np.asarray(p, dtype=complex)
    shift = scalar.to_complex(p.lambda0) if isinstance(p, CharPoly) else 0j
    a = trim(a, FLOAT)
    d = len(a) - 1
    if d < 1:
        raise ValueError("polynomial degree must be at least 1")
    a = a / a[-1]
    if d == 1:
        return np.array([-a[0] + shift])

    centre = -a[-2] / d
    radius = max(_root_bound(a), 1e-300) + abs(centre)
    angles = 2 * np.pi * np.arange(d) / d + 0.4
    z = centre + radius * np.exp(1j * angles)

    abs_a = np.abs(a)
    noise = 4 * d * np.finfo(float).eps
    done = np.zeros(d, dtype=bool)
    for _ in range(max_iter):
        for i in range(d):
            if done[i]:
                continue
            pv, dpv = _eval_with_derivative(a, z[i])
            if abs(pv) <= noise * _horner_abs(abs_a, abs(z[i])):
                done[i] = True      # |p(z)| is at the rounding level: z is a root of a nearby polynomial
                continue
            diff = z[i] - np.delete(z, i)
            s = np.sum(1.0 / diff) if np.all(diff != 0) else 0.0
            denom = dpv - pv * s
            if denom == 0:
                w = 1e-3 * max(1.0, abs(z[i])) * np.exp(1j * i)
            else:
                w = pv / denom
            z[i] -= w
            if abs(w) <= tol * max(1.0, abs(z[i])):
                done[i] = True
        if done.all():
            break
    if not done.all():
        bad = np.flatnonzero(~done).tolist()
        raise NoConvergence(f"Aberth iteration did not converge for roots {bad}", z + shift, bad)

    for i in range(d):
        for _ in range(polish):
            pv, dpv = _eval_with_derivative(a, z[i])
            if dpv == 0 or pv == 0:
                break
            cand = z[i] - pv / dpv
            if abs(_eval_with_derivative(a, cand)[0]) < abs(pv):
                z[i] = cand
            else:
                break
    return z + shift


def multiplicity_flags(roots, rtol=CLUSTER_RTOL):
    roots = np.asarray(roots, dtype=complex)
    scale = max(1.0, float(np.max(np.abs(roots)))) if len(roots) else 1.0
    flags = np.zeros(len(roots), dtype=bool)
    for i in range(len(roots)):
        for j in range(i + 1, len(roots)):
            if abs(roots[i] - roots[j]) < rtol * scale:
                flags[i] = flags[j] = True
    return flags


def boundary_matrix(u1, u2, bc, lam):
    a = eval_solution(u1, lam)
    b = eval_solution(u2, lam)
    M = np.array([[bc.left.apply(a, lam), bc.left.apply(b, lam)],
                  [bc.right.apply(a, lam), bc.right.apply(b, lam)]], dtype=object)
    return scalar.to_complex_array(M), a, b


def eigenfunction(u1, u2, bc, lam, rtol=1e-6):
    """``c1 u1(λ) + c2 u2(λ)`` with ``(c1, c2)`` spanning the null space of the
    boundary matrix, scaled so its largest-magnitude entry equals 1.

    Raises :class:`NotAnEigenvalue` if the boundary matrix is not
    numerically singular (smallest/largest singular value above ``rtol``).
    """
    from .seqgrid import Sequence

    lam = complex(scalar.to_complex(lam))
    M, a, b = boundary_matrix(u1, u2, bc, lam)
    sv = np.linalg.svd(M, compute_uv=False)
    if sv[0] == 0:
        raise DegenerateProblem("boundary matrix vanishes")
    if sv[-1] > rtol * sv[0]:
        raise NotAnEigenvalue(f"λ = {lam} is not an eigenvalue (σ_min/σ_max = {sv[-1] / sv[0]:.2e})")
    _, _, vh = np.linalg.svd(M)
    c1, c2 = np.conj(vh[-1])
    vals = c1 * a.to_complex() + c2 * b.to_complex()
    k = int(np.argmax(np.abs(vals)))
    vals = vals / vals[k]
    return Sequence(a.lo, a.hi, vals, FLOAT)


@dataclass(frozen=True, eq=False)
class EigenResult:
    eigenvalues: np.ndarray
    residuals: np.ndarray
    boundary_residuals: np.ndarray
    multiplicity_flags: np.ndarray
    eigenfunctions: tuple
    char_poly: CharPoly


def _sort_key(z):
    return (round(z.real, 12), round(z.imag, 12))


def solve_eigen(c, u1, u2, bc, tol=1e-14, max_iter=500):
    """Eigenvalues, eigenfunctions and their residuals for one problem.

    ``residuals`` holds the worst relative operator residual of each
    eigenfunction and ``boundary_residuals`` the larger of its two boundary
    values (eigenfunctions are scaled to unit maximum).
    """
    cp = char_poly(u1, u2, bc)
    roots = find_roots(cp, tol=tol, max_iter=max_iter)
    if not np.any(cp.complex_coeffs().imag) and scalar.to_complex(cp.lambda0).imag == 0:
        # real polynomial: roots within rounding of the axis are real
        roots = [complex(z.real, 0.0) if abs(z.imag) <= REAL_SNAP * max(1.0, abs(z)) else z
                 for z in roots]
    roots = np.array(sorted(roots, key=_sort_key))
    cf = c.with_mode(FLOAT) if c.mode != FLOAT else c
    funcs, res, bres = [], [], []
    for lam in roots:
        try:
            f = eigenfunction(u1, u2, bc, lam)
        except NotAnEigenvalue:
            funcs.append(None)
            res.append(np.inf)
            bres.append(np.inf)
            continue
        funcs.append(f)
        res.append(float(relative_residuals(cf, f, lam).max()))
        bres.append(max(abs(bc.left.apply(f, lam)), abs(bc.right.apply(f, lam))))
    return EigenResult(roots, np.array(res), np.array(bres), multiplicity_flags(roots),
                       tuple(funcs), cp)


__all__ = [
    "BoundarySide", "BoundaryCondition", "CharPoly", "EigenResult", "DegenerateProblem",
    "NoConvergence", "NotAnEigenvalue", "char_poly", "find_roots", "eigenfunction",
    "solve_eigen", "multiplicity_flags", "boundary_matrix", "trim",
]

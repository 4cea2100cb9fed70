"""Brute-force cross-checks: direct recurrence and real shooting."""

from dataclasses import dataclass

import numpy as np

from . import scalar
from .seed import solve_recurrence

BISECT_RTOL = 1e-12


@dataclass(frozen=True)
class ShootingProfile:
    lam_grid: np.ndarray
    boundary_value: np.ndarray

    def __post_init__(self):
        if len(self.lam_grid) != len(self.boundary_value):
            raise ValueError("grid and values differ in length")
        if np.any(np.diff(self.lam_grid) <= 0):
            raise ValueError("λ grid must be strictly increasing")


def oracle_solution(c, lam, init):
    """Solution of the recurrence with ``(u(lo), u(lo+1)) = init``."""
    return solve_recurrence(c, lam, init[0], init[1])


def _side_coeffs(side, lam):
    return side.alpha_at(lam), side.beta_at(lam)


def boundary_functional(c, bc, lam):
    """Right boundary functional of the solution satisfying the left condition.

    The left condition ``α u(s) + β u(s+1) = 0`` is met by starting the
    recurrence from ``(u(s), u(s+1)) = (β, -α)``.
    """
    a, b = _side_coeffs(bc.left, lam)
    u = solve_recurrence(c, lam, b, -a, start=bc.left.site)
    return bc.right.apply(u, lam)


def shooting_profile(c, bc, lam_lo, lam_hi, grid):
    if grid < 2:
        raise ValueError("grid needs at least two points")
    lams = np.linspace(lam_lo, lam_hi, grid)
    vals = np.array([scalar.to_complex(boundary_functional(c, bc, lam)) for lam in lams])
    return ShootingProfile(lams, vals)


def _real_functional(c, bc, lam):
    return scalar.to_complex(boundary_functional(c, bc, lam)).real


def shooting_eigen_real(c, bc, lam_lo, lam_hi, grid=400):
    """Real eigenvalues in ``[lam_lo, lam_hi]`` by sign changes plus bisection.

    Coefficients and boundary data must be real.  Each bracket is bisected
    to width ``1e-12 * max(1, |λ|)``.  Two eigenvalues between neighbouring
    grid points cancel each other's sign change and are missed, as is any
    root of even multiplicity.
    """
    if not c.is_real() or not bc.is_real():
        raise ValueError("shooting needs real coefficients and boundary data")
    c = c.with_mode(scalar.FLOAT) if c.mode != scalar.FLOAT else c
    prof = shooting_profile(c, bc, lam_lo, lam_hi, grid)
    f = prof.boundary_value.real
    roots = []
    for i in range(len(f)):
        if f[i] == 0:
            roots.append(float(prof.lam_grid[i]))
    for i in range(len(f) - 1):
        if f[i] == 0 or f[i + 1] == 0 or np.sign(f[i]) == np.sign(f[i + 1]):
            continue
        a, b = float(prof.lam_grid[i]), float(prof.lam_grid[i + 1])
        fa = f[i]
        while b - a > BISECT_RTOL * max(1.0, abs(a), abs(b)):
            m = 0.5 * (a + b)
            if m in (a, b):
                break
            fm = _real_functional(c, bc, m)
            if fm == 0:
                a = b = m
                break
            if np.sign(fm) == np.sign(fa):
                a, fa = m, fm
            else:
                b = m
        roots.append(0.5 * (a + b))
    return sorted(roots)


__all__ = ["ShootingProfile", "oracle_solution", "boundary_functional", "shooting_profile",
           "shooting_eigen_real"]

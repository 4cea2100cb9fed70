"""
Eigenvalues from the characteristic polynomial
==============================================

Two-point problems reduce to the roots of a determinant that is a
polynomial in λ.  Compare with the closed-form spectrum and with shooting.
"""

import numpy as np

from spps import scalar
from spps.oracle import shooting_eigen_real
from spps.seed import build_seed_complex, constant_seed
from spps.seqgrid import CoefficientSet
from spps.series import laguerre_coefficients, solutions
from spps.spectral import BoundaryCondition, BoundarySide, char_poly, solve_eigen

R = scalar.RATIONAL

# Δ²u = λu, u(0) = u(N) = 0
N = 8
c = CoefficientSet.from_functions(0, N, 1, 0, 1, R)
bc = BoundaryCondition.dirichlet(0, N)
_, u1, u2 = solutions(c, constant_seed(c, 0), 0)
print("characteristic polynomial:", [str(x) for x in char_poly(u1, u2, bc).coeffs])

res = solve_eigen(c, u1, u2, bc)
closed = np.sort(-4 * np.sin(np.arange(1, N) * np.pi / (2 * N)) ** 2)
shot = shooting_eigen_real(c, bc, -4.5, 0.5, grid=2000)
for z, e, s in zip(res.eigenvalues, closed, shot):
    print(f"{z.real: .15f}  closed {e: .15f}  shooting {s: .15f}")
print("worst operator residual:", res.residuals.max())

# Laguerre: p(n) = n + 1 on [0, N], r = -1, u(1) = (1 - λ) u(0), u(N) = 0.
# The determinant is -L_N(λ), so the eigenvalues are the Laguerre zeros.
N = 12
c = CoefficientSet.from_functions(0, N, lambda s: s + 1, 0, -1, R)
bc = BoundaryCondition(BoundarySide.make((-1, 1), 1, 0), BoundarySide.make(1, 0, N))
_, u1, u2 = solutions(c, constant_seed(c, 0), 0)
cp = char_poly(u1, u2, bc)
print("matches -L_12:", list(cp.coeffs) == [-scalar.to_rational(x) for x in laguerre_coefficients(N)])
print("zeros:", np.round(solve_eigen(c, u1, u2, bc).eigenvalues.real, 10))

# the spectrum does not depend on where the expansion is centred or which seed is used
cf = c.with_mode(scalar.FLOAT)
for n0 in (0, 6, 11):
    for label, seed in (("u0 = 1", constant_seed(cf, 0)), ("u0 = u + iv", build_seed_complex(cf, 0))):
        _, a, b = solutions(cf, seed, n0)
        ev = solve_eigen(cf, a, b, bc).eigenvalues.real
        print(f"n0 = {n0:2d}  {label:12s} smallest {ev[0]:.12f}  largest {ev[-1]:.10f}")

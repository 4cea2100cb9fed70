"""
Coefficient tables and the two solutions
========================================

Build the X/Y tables for Δ²u = λu, look at their zero pattern, assemble
u1 and u2 and check them against the direct recurrence.
"""

import math

import numpy as np

from spps import scalar
from spps.seed import build_seed_search, constant_seed, solve_recurrence
from spps.seqgrid import CoefficientSet, relative_residuals
from spps.series import build_table, casoratian, eval_solution, falling_factorial, solutions

R = scalar.RATIONAL

# p = r = 1, q = 0 on [0, 12], exact arithmetic, seed u0 = 1 at λ0 = 0
c = CoefficientSet.from_functions(0, 12, 1, 0, 1, R)
t = build_table(c, constant_seed(c, 0), 0)
print("table order:", t.max_order)

# X[2k] vanishes on n0-k+1 .. n0+k, so each row starts further right
for k in range(4):
    row = [scalar.format_real(scalar.parts(t.x(2 * k, n))[0], R) for n in range(9)]
    print(f"X[{2 * k}]", " ".join(f"{v:>5}" for v in row))

# the rows are falling factorials divided by (2k)!
k, n = 3, 9
print("X[6](9) =", t.x(2 * k, n), " closed form:",
      falling_factorial(n + k - 1, 2 * k) / math.factorial(2 * k))

# per-site polynomials in λ; u2 vanishes identically at n0
_, u1, u2 = solutions(c, constant_seed(c, 0), 0)
print("degrees of u1:", [u1.degree(n) for n in range(13)])
print("degrees of u2:", [u2.degree(n) for n in range(13)])

# at λ = -2 the recurrence gives u(n+1) = -u(n-1)
print("u2 at λ = -2:", [scalar.to_complex(v).real for v in eval_solution(u2, -2).values])

# p W(u1, u2) = 1 at every site, exactly
a, b = eval_solution(u1, "3/7"), eval_solution(u2, "3/7")
print("p W:", {str(c.p(n) * casoratian(c, a, b, n)) for n in range(12)})

# complex float coefficients: a randomised seed search replaces u0 = 1
rng = np.random.default_rng(0)
m = 30
cf = CoefficientSet((0, m), 1 + 0.3 * rng.standard_normal(m), 0.3j * rng.standard_normal(m),
                    np.ones(m))
s = build_seed_search(cf, -2 + 0.5j, rng=rng)
_, v1, v2 = solutions(cf, s, 15)
lam = -1.9 + 0.4j
w = eval_solution(v1, lam)
o = solve_recurrence(cf, lam, w(15), w(16), start=15)
print("min |u0|:", s.min_abs)
print("max relative residual:", relative_residuals(cf, w, lam).max())
print("max |series - recurrence| / max |u|:",
      np.abs(w.to_complex() - o.to_complex()).max() / np.abs(o.to_complex()).max())

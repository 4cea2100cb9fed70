"""
Bounded solutions of Δ(pΔu) = r u
=================================

Partial sums rule boundedness out; contraction certificates rule it in.
Both only ever speak about the window they are given.
"""

import numpy as np

from spps.bounded import (necessary_diagnostic, phi_bounded_certificate, shifted_diagnostic,
                          sufficiency_certificate)
from spps.seed import constant_seed, solve_recurrence
from spps.seqgrid import CoefficientSet
from spps.series import build_table, eval_solution, solutions


def report(name, c):
    t = build_table(c, constant_seed(c, 0), c.lo)
    double, inv_p = necessary_diagnostic(c)
    shifted = shifted_diagnostic(c)
    print(f"--- {name}")
    for d in (double, inv_p, shifted):
        print(f"  {d.kind:15s} last partial sum {d.partial_sums[-1]:10.4g}  "
              f"block ratio {d.block_ratio():6.3f}  divergent: {d.practical_divergence()}")
    for cert in (sufficiency_certificate(c, t), phi_bounded_certificate(c, t)):
        print(f"  {cert.kind:16s} valid {cert.valid!s:5s}  n* {cert.n_star:3d}  "
              f"delta {cert.delta:.4g}  bound {cert.solution_bound:.4g}")
    return t


# rapidly growing p: every solution is bounded
c = CoefficientSet.from_functions(0, 200, lambda s: 2.0 ** s, 0, 1)
report("p = 2^s, r = 1", c)
_, u1, u2 = solutions(c, constant_seed(c, 0), 0)
print("  max |u1|, |u2| at λ = 1:", [round(float(np.abs(eval_solution(u, 1).to_complex()).max()), 4) for u in (u1, u2)])

# the quasi-derivative certificate is refused here: Σ r(s+1) Σ 1/p grows linearly

# with r decaying as well, both certificates hold
report("p = 2^s, r = 4^-s", CoefficientSet.from_functions(0, 200, lambda s: 2.0 ** s, 0, lambda s: 0.25 ** s))

# p = 1: Σ 1/p diverges and the recurrence shows the unbounded solution
c = CoefficientSet.from_functions(0, 200, 1.0, 0, 1)
report("p = 1, r = 1", c)
u = solve_recurrence(c, 1, 1, 1).to_complex()
print("  |u(n)| at n = 50, 100, 200:", np.abs(u[[50, 100, 200]]))

# complex p with |p(s)| = 2^s: the certificate only needs absolute values
c = CoefficientSet.from_functions(0, 200, lambda s: 2.0 ** s * np.exp(1j * s), 0, 1)
t = build_table(c, constant_seed(c, 0), 0)
cert = sufficiency_certificate(c, t)
print("--- complex p: valid", cert.valid, "delta", cert.delta, "bound", round(cert.solution_bound, 4))

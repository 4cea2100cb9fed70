"""Finite power-series-in-λ solutions of Jacobi difference equations.

``Δ(p(n-1)Δu(n-1)) + q(n)u(n) = λ r(n)u(n)`` on a finite window ``[lo, hi]``
has a fundamental pair ``u1, u2`` whose values are polynomials in ``λ - λ0``
at every site.  The subpackages build those polynomials, extract eigenvalues
of two-point problems from them, and certify boundedness of solutions.
"""

from .scalar import FLOAT, RATIONAL
from .seqgrid import (CoefficientSet, IndexWindow, OutOfRange, Sequence, apply_jacobi, delta,
                      jacobi_residuals, relative_residuals, star_sum)
from .seed import (SeedSolution, auto_seed, build_seed_complex, build_seed_search, certify,
                   constant_seed, polya_residual, solve_recurrence)
from .series import (LambdaPolySolution, SppsTable, assemble_u1, assemble_u2, build_table,
                     casoratian, eval_solution, evaluation_condition, falling_factorial,
                     laguerre_closed_form, normalized_pair, solutions)
from .oracle import oracle_solution, shooting_eigen_real
from .spectral import BoundaryCondition, BoundarySide, char_poly, eigenfunction, find_roots, solve_eigen
from .bounded import (necessary_diagnostic, op_T, op_T_tilde, phi_bounded_certificate,
                      quasi_derivative, sufficiency_certificate)

__version__ = "0.1.0"

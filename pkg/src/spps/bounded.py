"""Boundedness of solutions of ``Δ(p(n-1)Δu(n-1)) = r(n)u(n)``.

This is the ``q ≡ 0`` equation with ``u0 ≡ 1``, ``λ0 = 0``, evaluated at
``λ = 1``.  Three tools are provided:

* partial sums of ``Σ 1/p`` and ``Σ_s Σ_{τ≤s} r(τ)/p(s)``, whose divergence
  (for ``p > 0``, ``r ≥ 0``) rules out boundedness of all solutions;
* a contraction certificate: once the absolute tails of both series past some
  ``n*`` are below ``δ < 1``, every table entry obeys ``|X⁽²ᵏ⁾|, |Y⁽²ᵏ⁺¹⁾| ≤ δᵏ``
  and all solutions are bounded;
* the same argument for the quasi-derivative ``φ(n) = p(n)Δu(n)``, driven by
  ``Σ_s Σ_{τ≤s} r(s+1)/p(τ)``.

Everything is window-relative: a finite window can only ever show that the
tails are small *on the window*.
"""

from dataclasses import dataclass, field

import numpy as np

from . import scalar
from .seqgrid import OutOfRange
from .series import eval_solution, assemble_u1, assemble_u2

DELTA_MAX = 0.9


class SignConditionError(ValueError):
    """``p > 0`` and ``r ≥ 0`` (real) are required for this diagnostic."""


class TableMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SeriesDiagnostic:
    kind: str               # "inv_p" | "double_rp" | "double_shifted"
    start: int              # index of the first partial sum
    partial_sums: np.ndarray
    trend: bool             # nondecreasing

    def block_ratio(self):
        """``(S(m) - S(m/2)) / (S(m/2) - S(m/4))`` over the ``m`` partial sums.

        About 2 for linear growth, 1 for logarithmic growth, ``2^-ε`` for
        terms decaying like ``s^-(1+ε)`` and essentially 0 for geometric decay.
        """
        s = self.partial_sums
        m = len(s)
        if m < 8:
            return float("nan")
        a, b, c = s[m // 4 - 1], s[m // 2 - 1], s[-1]
        prev = b - a
        if prev <= 0:
            return 0.0 if c - b <= 0 else float("inf")
        return float((c - b) / prev)

    def practical_divergence(self, threshold=None, ratio=0.75):
        """Heuristic divergence flag for a monotone partial-sum sequence.

        With ``threshold`` the flag is ``last partial sum > threshold``.
        Otherwise the increment over the second half of the window is compared
        with the increment over the quarter before it (:meth:`block_ratio`).
        Only a heuristic; a finite window can never prove divergence.
        """
        if not self.trend:
            return False
        if threshold is not None:
            return bool(self.partial_sums[-1] > threshold)
        return bool(self.block_ratio() >= ratio)

    def to_dict(self):
        s = self.partial_sums
        return {"kind": self.kind, "start": self.start, "n_terms": len(s),
                "last": float(s[-1]) if len(s) else 0.0, "monotone": self.trend,
                "block_ratio": self.block_ratio()}


@dataclass(frozen=True)
class BoundCertificate:
    """Outcome of a contraction search.

    ``delta`` is the larger of the two tail sums past ``n_star`` and
    ``solution_bound`` bounds ``|u1|, |u2|`` (or ``|φ1|, |φ2|``) of the
    inspected table on ``[lo, horizon]``.  The certificate is window
    relative; ``valid = False`` means inconclusive, never unbounded.
    """

    n_star: int
    delta: float
    solution_bound: float
    valid: bool
    kind: str = "solutions"
    horizon: int = 0
    window: tuple = (0, 0)
    tails: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind, "valid": self.valid, "n_star": self.n_star,
                "delta": self.delta, "solution_bound": self.solution_bound,
                "horizon": self.horizon, "window": list(self.window),
                "scope": "window-relative", **{k: float(v) for k, v in self.tails.items()}}


def _real_vals(seq):
    return scalar.to_complex_array(seq.values)


def _check_range(c, n0, n):
    if n0 < c.lo or n > c.hi or n < n0:
        raise OutOfRange(f"need lo <= n0 <= n <= hi, got n0={n0}, n={n}")


def op_T(c, u, n0, n):
    """``Σ_{s=n0+1}^{n-1} Σ_{τ=n0+1}^{s} u(τ) r(τ) / p(s)`` (zero for ``n <= n0+1``)."""
    _check_range(c, n0, n)
    total = scalar.zeros((), c.mode)[()]
    inner = scalar.zeros((), c.mode)[()]
    for s in range(n0 + 1, n):
        inner = inner + u(s) * c.r(s)
        total = total + inner / c.p(s)
    return total


def op_T_tilde(c, u, n0, n):
    """``Σ_{s=n0}^{n-1} Σ_{τ=n0}^{s} r(s+1) u(τ) / p(τ)``."""
    _check_range(c, n0, n)
    total = scalar.zeros((), c.mode)[()]
    inner = scalar.zeros((), c.mode)[()]
    for s in range(n0, n):
        inner = inner + u(s) / c.p(s)
        total = total + c.r(s + 1) * inner
    return total


def quasi_derivative(c, u, n):
    """``φ(n) = p(n) (u(n+1) - u(n))``."""
    return c.p(n) * (u(n + 1) - u(n))


def _require_signs(c):
    p = scalar.to_complex_array(c.p.values)
    r = scalar.to_complex_array(c.r.values)
    if np.any(p.imag != 0) or np.any(r.imag != 0) or np.any(p.real <= 0) or np.any(r.real < 0):
        raise SignConditionError("p must be real positive and r real nonnegative")
    return p.real, r.real


def _diag(kind, start, sums):
    return SeriesDiagnostic(kind, start, sums, bool(np.all(np.diff(sums) >= 0)))


def _main_sums(p, r, lo):
    inv_p = np.cumsum(1.0 / p)                     # s = lo .. hi-1
    r_cum = np.cumsum(r[:-1])                      # τ = lo+1 .. s for s = lo+1 .. hi-1
    double = np.cumsum(r_cum / p[1:])
    return _diag("double_rp", lo + 1, double), _diag("inv_p", lo, inv_p)


def _shifted_sums(p, r, lo):
    inner = np.cumsum(1.0 / p)                     # τ = lo .. s
    return _diag("double_shifted", lo, np.cumsum(r * inner))   # r(s+1), s = lo .. hi-1


def necessary_diagnostic(c):
    """Partial sums ``(Σ_s Σ_{τ≤s} r(τ)/p(s), Σ_s 1/p(s))`` over the window.

    For ``p > 0``, ``r ≥ 0``: if either diverges, some solution is unbounded.
    """
    p, r = _require_signs(c)
    return _main_sums(p, r, c.lo)


def shifted_diagnostic(c):
    """Partial sums of ``Σ_s Σ_{τ≤s} r(s+1)/p(τ)``, the quasi-derivative series."""
    p, r = _require_signs(c)
    return _shifted_sums(p, r, c.lo)


def absolute_diagnostics(c):
    """The three series with ``|p|`` and ``|r|``; no sign conditions needed."""
    p, r = _abs_coeffs(c)
    return (*_main_sums(p, r, c.lo), _shifted_sums(p, r, c.lo))


def _abs_coeffs(c):
    return np.abs(scalar.to_complex_array(c.p.values)), np.abs(scalar.to_complex_array(c.r.values))


def _tails(c, horizon):
    """Absolute tail sums for every candidate ``n*`` in ``[lo, horizon-1]``.

    ``dy[j]`` = Σ_{s=n*}^{h-1} 1/|p(s)|,
    ``dx[j]`` = Σ_{s=n*+1}^{h-1} Σ_{τ=n*+1}^{s} |r(τ)|/|p(s)|,
    ``dt[j]`` = Σ_{s=n*}^{h-1} |r(s+1)| Σ_{τ=n*}^{s} 1/|p(τ)|,
    ``sr[j]`` = Σ_{τ=n*+1}^{h} |r(τ)|, with ``n* = lo + j``.
    """
    lo = c.lo
    ap, ar = _abs_coeffs(c)
    m = horizon - lo                               # candidates n* = lo .. horizon-1
    dy, dx, dt, sr = (np.zeros(m) for _ in range(4))
    for j in range(m):
        ns = lo + j
        s_idx = np.arange(ns, horizon)             # s = n* .. h-1
        ip = 1.0 / ap[s_idx - lo]
        dy[j] = ip.sum()
        rr = ar[s_idx + 1 - (lo + 1)]              # r(s+1)
        dt[j] = np.sum(rr * np.cumsum(ip))
        sr[j] = rr.sum()
        if horizon - 1 >= ns + 1:
            s2 = np.arange(ns + 1, horizon)
            rcum = np.cumsum(ar[s2 - (lo + 1)])    # Σ_{τ=n*+1}^{s} |r(τ)|
            dx[j] = np.sum(rcum / ap[s2 - lo])
    return dy, dx, dt, sr


def _check_table(t):
    u0 = scalar.to_complex_array(t.seed.u0.values)
    q = scalar.to_complex_array(t.coeffs.q.values)
    if np.any(u0 != 1) or scalar.to_complex(t.seed.lambda0) != 0 or np.any(q != 0):
        raise TableMismatch("table must be built with u0 ≡ 1, λ0 = 0 and q ≡ 0")


def _default_min_tail(c, horizon):
    return max(2, (horizon - c.lo) // 2)


def _search(delta, horizon, lo, min_tail, delta_max):
    for j, d in enumerate(delta):
        if lo + j > horizon - min_tail:
            break
        if d <= delta_max:
            return j
    return None


def _driving_ratios(c, horizon, kinds):
    """Dyadic block ratios of the absolute driving series, cut at ``horizon``."""
    keep = {"double_rp": horizon - c.lo - 1, "inv_p": horizon - c.lo, "double_shifted": horizon - c.lo}
    out = {}
    for d in absolute_diagnostics(c):
        if d.kind in kinds:
            cut = _diag(d.kind, d.start, d.partial_sums[:keep[d.kind]])
            out[d.kind] = cut
    return out


def _certificate(c, t, horizon, delta_max, min_tail, kind):
    _check_table(t)
    horizon = c.hi if horizon is None else horizon
    if not c.lo + 1 <= horizon <= c.hi:
        raise OutOfRange(f"horizon {horizon} outside [{c.lo + 1}, {c.hi}]")
    min_tail = _default_min_tail(c, horizon) if min_tail is None else min_tail
    dy, dx, dt, sr = _tails(c, horizon)
    if kind == "solutions":
        delta, kinds = np.maximum(dy, dx), ("double_rp", "inv_p")
    else:
        delta, kinds = dt, ("double_shifted",)
    window = (c.lo, c.hi)
    diags = _driving_ratios(c, horizon, kinds)
    ratios = {f"block_ratio_{k}": d.block_ratio() for k, d in diags.items()}
    stable = not any(d.practical_divergence() for d in diags.values())
    j = _search(delta, horizon, c.lo, min_tail, delta_max)
    if j is None or not stable:
        k = int(np.argmin(delta)) if j is None else j
        return BoundCertificate(c.lo + k, float(delta[k]), float("inf"), False, kind, horizon,
                                window, ratios)
    n_star = c.lo + j
    bound = 0.0
    for sol in (assemble_u1(t), assemble_u2(t)):
        u = eval_solution(sol, 1)
        if kind == "solutions":
            vals = np.abs(_real_vals(u))
            prefix = vals[:n_star - c.lo + 1].max()
            phi = abs(scalar.to_complex(quasi_derivative(c, u, n_star)))
            tail = (vals[n_star - c.lo] + phi * dy[j]) / (1.0 - dx[j])
        else:
            phis = [abs(scalar.to_complex(quasi_derivative(c, u, n))) for n in range(c.lo, n_star + 1)]
            prefix = max(phis)
            tail = (abs(scalar.to_complex(u(n_star))) * sr[j] + phis[-1]) / (1.0 - dt[j])
        bound = max(bound, prefix, tail)
    extra = {"delta_x": dx[j], "delta_y": dy[j]} if kind == "solutions" else {"r_tail": sr[j]}
    return BoundCertificate(n_star, float(delta[j]), float(bound), True, kind, horizon, window,
                            {**extra, **ratios})


def sufficiency_certificate(c, t, horizon=None, delta_max=DELTA_MAX, min_tail=None):
    """Contraction certificate for boundedness of all solutions.

    Scans ``n*`` upward and takes the first one whose absolute tails of
    ``Σ 1/|p|`` and ``Σ Σ |r|/|p|`` up to ``horizon`` are both ``≤ delta_max``
    while leaving at least ``min_tail`` points (default: half the window)
    past ``n*``.  A certificate is also refused when either absolute series
    shows practical divergence on the window, since small tails on a finite
    window mean nothing for a divergent series.

    The emitted bound covers the table's own ``u1, u2`` at ``λ = 1``: their
    maximum on ``[lo, n*]`` and, beyond, ``(|u(n*)| + |φ(n*)| δ_Y) / (1 - δ_X)``.
    """
    return _certificate(c, t, horizon, delta_max, min_tail, "solutions")


def phi_bounded_certificate(c, t, horizon=None, delta_max=DELTA_MAX, min_tail=None):
    """Contraction certificate for boundedness of ``φ = pΔu`` for all solutions.

    Same search as :func:`sufficiency_certificate`, driven by the tails of
    ``Σ_s Σ_τ |r(s+1)|/|p(τ)|``.  The bound covers ``φ1, φ2`` of the table:
    their maximum on ``[lo, n*]`` and beyond it
    ``(|u(n*)| Σ_{τ>n*} |r(τ)| + |φ(n*)|) / (1 - δ)``.
    """
    return _certificate(c, t, horizon, delta_max, min_tail, "quasi_derivative")


__all__ = [
    "SeriesDiagnostic", "BoundCertificate", "SignConditionError", "TableMismatch",
    "op_T", "op_T_tilde", "quasi_derivative", "necessary_diagnostic", "shifted_diagnostic",
    "sufficiency_certificate", "phi_bounded_certificate", "absolute_diagnostics",
]

"""Index windows, sequences on windows, forward differences and star sums.

A problem lives on a finite window ``[lo, hi]`` of integers.  The unknown ``u``
is defined on the whole window, ``p`` on ``[lo, hi-1]`` and ``q``, ``r`` on
``[lo+1, hi]``, so that

    Lu(n) = Δ(p(n-1) Δu(n-1)) + q(n) u(n) - λ r(n) u(n)

can be evaluated at every interior point ``lo < n < hi``.
"""

from dataclasses import dataclass

import numpy as np

from . import scalar
from .scalar import FLOAT, RATIONAL


class OutOfRange(IndexError):
    """Lookup outside a sequence's declared index range."""


@dataclass(frozen=True)
class IndexWindow:
    lo: int
    hi: int

    def __post_init__(self):
        if int(self.lo) != self.lo or int(self.hi) != self.hi:
            raise TypeError("window bounds must be integers")
        if self.lo > self.hi - 2:
            raise ValueError(f"window [{self.lo}, {self.hi}] needs at least three points")

    @property
    def size(self):
        return self.hi - self.lo + 1

    @property
    def interior(self):
        return range(self.lo + 1, self.hi)

    def indices(self):
        return range(self.lo, self.hi + 1)

    def __contains__(self, n):
        return self.lo <= n <= self.hi


class Sequence:
    """Values on an integer range ``[lo, hi]``; immutable.

    ``u(n)`` or ``u[n]`` returns the value at index ``n``; anything outside
    the range raises :class:`OutOfRange`.
    """

    __slots__ = ("lo", "hi", "values", "mode")

    def __init__(self, lo, hi, values, mode=None):
        lo, hi = int(lo), int(hi)
        if mode is None:
            if isinstance(values, np.ndarray):
                mode = scalar.mode_of(values)
            else:
                values = list(values)
                exact = any(isinstance(v, scalar.GaussianRational) for v in values)
                mode = RATIONAL if exact else FLOAT
        scalar.check_mode(mode)
        arr = scalar.as_array(values, mode)
        if arr.ndim != 1 or len(arr) != hi - lo + 1:
            raise ValueError(f"expected {hi - lo + 1} values on [{lo}, {hi}], got {len(arr)}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "mode", mode)

    def __setattr__(self, name, value):
        raise AttributeError("Sequence is immutable")

    @classmethod
    def from_function(cls, f, lo, hi, mode=FLOAT):
        return cls(lo, hi, [f(n) for n in range(lo, hi + 1)], mode)

    def __call__(self, n):
        if not self.lo <= n <= self.hi:
            raise OutOfRange(f"index {n} outside [{self.lo}, {self.hi}]")
        return self.values[n - self.lo]

    __getitem__ = __call__

    def __len__(self):
        return len(self.values)

    def indices(self):
        return range(self.lo, self.hi + 1)

    def slice(self, a, b):
        """Values on ``[a, b]`` as an array (both ends inclusive)."""
        if a < self.lo or b > self.hi:
            raise OutOfRange(f"range [{a}, {b}] outside [{self.lo}, {self.hi}]")
        return self.values[a - self.lo:b - self.lo + 1]

    def to_complex(self):
        return scalar.to_complex_array(self.values)

    def __repr__(self):
        return f"Sequence([{self.lo}, {self.hi}], mode={self.mode!r})"


class CoefficientSet:
    """The sequences ``p``, ``q``, ``r`` defining one Jacobi operator.

    Values are converted to ``mode`` on construction and ``p`` is checked to
    be nonzero everywhere on ``[lo, hi-1]``.
    """

    def __init__(self, window, p, q, r, mode=FLOAT):
        if not isinstance(window, IndexWindow):
            window = IndexWindow(*window)
        scalar.check_mode(mode)
        lo, hi = window.lo, window.hi
        self.window = window
        self.mode = mode
        self.p = _on(p, lo, hi - 1, mode, "p")
        self.q = _on(q, lo + 1, hi, mode, "q")
        self.r = _on(r, lo + 1, hi, mode, "r")
        for n, v in zip(self.p.indices(), self.p.values):
            if scalar.is_zero(v):
                raise ValueError(f"p({n}) = 0; p must not vanish on [{lo}, {hi - 1}]")

    @classmethod
    def from_functions(cls, lo, hi, p, q, r, mode=FLOAT):
        """Build from callables (or constants) of the index."""
        def grid(f, a, b):
            return [f(n) if callable(f) else f for n in range(a, b + 1)]
        return cls(IndexWindow(lo, hi), grid(p, lo, hi - 1), grid(q, lo + 1, hi), grid(r, lo + 1, hi), mode)

    @property
    def lo(self):
        return self.window.lo

    @property
    def hi(self):
        return self.window.hi

    def shifted(self, mu):
        """Coefficients of ``L - μ r``: ``q`` replaced by ``q - μ r``."""
        mu = scalar.convert(mu, self.mode)
        return CoefficientSet(self.window, self.p.values, self.q.values - self.r.values * mu,
                              self.r.values, self.mode)

    def with_mode(self, mode):
        return CoefficientSet(self.window, self.p.values, self.q.values, self.r.values, mode)

    def is_real(self):
        return all(scalar.is_real(v) for s in (self.p, self.q, self.r) for v in s.values)

    def __repr__(self):
        return f"CoefficientSet([{self.lo}, {self.hi}], mode={self.mode!r})"


def _on(seq, a, b, mode, name):
    if isinstance(seq, Sequence):
        if (seq.lo, seq.hi) != (a, b):
            raise ValueError(f"{name} must be defined on [{a}, {b}], got [{seq.lo}, {seq.hi}]")
        seq = seq.values
    values = list(seq) if not isinstance(seq, np.ndarray) else seq
    if len(values) != b - a + 1:
        raise ValueError(f"{name} needs {b - a + 1} values on [{a}, {b}], got {len(values)}")
    return Sequence(a, b, values, mode)


def delta(u, n):
    """Forward difference ``u(n+1) - u(n)``."""
    return u(n + 1) - u(n)


def star_sum(u, n0, n):
    """Indefinite sum of ``u`` normalised to vanish at ``n0``.

    Forward sum ``u(n0) + ... + u(n-1)`` for ``n > n0``, zero at ``n == n0``
    and ``-(u(n) + ... + u(n0-1))`` for ``n < n0``.
    """
    if n > n0:
        vals = u.slice(n0, n - 1)
        sign = 1
    elif n < n0:
        vals = u.slice(n, n0 - 1)
        sign = -1
    else:
        if not u.lo <= n0 <= u.hi + 1:
            raise OutOfRange(f"base point {n0} outside [{u.lo}, {u.hi + 1}]")
        return _zero(u.mode)
    total = vals[0]
    for v in vals[1:]:
        total = total + v
    return total if sign > 0 else -total


def star_sum_array(f, lo, n0):
    """All star sums of ``f`` at once.

    ``f`` holds values on ``[lo, lo+len(f)-1]``; the result has one more entry
    and holds ``Σ*_{j=n0}^{n-1} f(j)`` for ``n`` in ``[lo, lo+len(f)]``.
    """
    m = len(f)
    k = n0 - lo
    if not 0 <= k <= m:
        raise OutOfRange(f"base point {n0} outside [{lo}, {lo + m}]")
    out = np.empty(m + 1, dtype=f.dtype)
    out[k] = _zero(scalar.mode_of(f))
    if k < m:
        out[k + 1:] = np.cumsum(f[k:])
    if k > 0:
        out[:k] = -np.cumsum(f[k - 1::-1])[::-1]
    return out


def _zero(mode):
    return scalar.zeros((), mode)[()]


def apply_jacobi(c, u, lam, n):
    """``Δ(p(n-1)Δu(n-1)) + q(n)u(n) - λ r(n)u(n)`` at an interior point."""
    if not c.lo < n < c.hi:
        raise OutOfRange(f"{n} is not interior to [{c.lo}, {c.hi}]")
    lam = scalar.convert(lam, c.mode)
    un = u(n)
    return (c.p(n) * (u(n + 1) - un) - c.p(n - 1) * (un - u(n - 1))
            + c.q(n) * un - lam * c.r(n) * un)


def _interior_terms(c, u, lam):
    lo, hi = c.lo, c.hi
    lam = scalar.convert(lam, c.mode)
    uv = u.slice(lo, hi)
    if scalar.mode_of(uv) != c.mode:
        uv = scalar.as_array(uv, c.mode)
    pn = c.p.slice(lo + 1, hi - 1)
    pm = c.p.slice(lo, hi - 2)
    qn = c.q.slice(lo + 1, hi - 1)
    rn = c.r.slice(lo + 1, hi - 1)
    um, un, up = uv[:-2], uv[1:-1], uv[2:]
    return [pn * up, -pn * un, -pm * un, pm * um, qn * un, -(rn * lam) * un]


def jacobi_residuals(c, u, lam):
    """Residuals ``Lu - λ r u`` at every interior point, in the set's mode."""
    terms = _interior_terms(c, u, lam)
    total = terms[0]
    for t in terms[1:]:
        total = total + t
    return total


def relative_residuals(c, u, lam):
    """|residual| / (largest term magnitude) at every interior point.

    The terms are the six products in the expanded operator; a point where
    every term vanishes has relative residual 0.
    """
    terms = _interior_terms(c, u, lam)
    res = scalar.magnitudes(sum(terms[1:], terms[0]))
    scale = np.max([scalar.magnitudes(t) for t in terms], axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        rel = np.where(scale > 0, res / np.where(scale > 0, scale, 1.0), 0.0)
    return rel


__all__ = [
    "FLOAT", "RATIONAL", "IndexWindow", "Sequence", "CoefficientSet", "OutOfRange",
    "delta", "star_sum", "star_sum_array", "apply_jacobi", "jacobi_residuals",
    "relative_residuals",
]

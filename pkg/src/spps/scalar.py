"""Scalars in the two arithmetic modes.

``"float"`` values are Python/numpy complex numbers.  ``"rational"`` values are
exact Gaussian rationals (elements of sympy's ``QQ_I`` domain, backed by gmpy2
when available).  Every array handed around the package is either a
``complex128`` array (float mode) or an ``object`` array of ``QQ_I`` elements
(rational mode), so plain numpy arithmetic works in both.
"""

from fractions import Fraction
from numbers import Integral, Rational, Real

import numpy as np
from sympy import QQ_I

FLOAT = "float"
RATIONAL = "rational"
MODES = (FLOAT, RATIONAL)

GaussianRational = type(QQ_I(0, 0))


def check_mode(mode):
    if mode not in MODES:
        raise ValueError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode


def _exact(x):
    """Real number -> Fraction, exactly."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (Integral, Rational)):
        return Fraction(int(x.numerator), int(x.denominator))
    if hasattr(x, "numerator") and hasattr(x, "denominator"):  # gmpy2.mpq
        return Fraction(int(x.numerator), int(x.denominator))
    if isinstance(x, Real):
        x = float(x)
        if not np.isfinite(x):
            raise ValueError(f"non-finite value {x!r} has no rational form")
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as a real number")


def parts(x):
    """Return ``(re, im)`` of any supported scalar, without rounding."""
    if isinstance(x, GaussianRational):
        return x.x, x.y
    if isinstance(x, (tuple, list)):
        if len(x) != 2:
            raise ValueError(f"complex pair must have two entries, got {x!r}")
        return x[0], x[1]
    if isinstance(x, (complex, np.complexfloating)):
        return x.real, x.imag
    return x, 0


def to_rational(x):
    """Exact conversion to a Gaussian rational."""
    if isinstance(x, GaussianRational):
        return x
    re, im = parts(x)
    return QQ_I(_exact(re), _exact(im))


def _float(x):
    return float(Fraction(x.strip())) if isinstance(x, str) else float(x)


def to_complex(x):
    """Conversion to Python ``complex`` (rounds rationals)."""
    if isinstance(x, GaussianRational):
        return complex(float(x.x), float(x.y))
    if isinstance(x, (tuple, list, str)):
        re, im = parts(x)
        return complex(_float(re), _float(im))
    return complex(x)


def convert(x, mode):
    return to_rational(x) if mode == RATIONAL else to_complex(x)


def as_array(values, mode):
    """Convert an iterable of scalars into the mode's array representation."""
    check_mode(mode)
    if mode == FLOAT:
        if isinstance(values, np.ndarray) and values.dtype != object:
            return np.asarray(values, dtype=complex)
        return np.array([to_complex(v) for v in values], dtype=complex)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = to_rational(v)
    return out


def zeros(shape, mode):
    if mode == FLOAT:
        return np.zeros(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(QQ_I.zero)
    return out


def ones(shape, mode):
    if mode == FLOAT:
        return np.ones(shape, dtype=complex)
    out = np.empty(shape, dtype=object)
    out.fill(QQ_I.one)
    return out


def is_zero(x):
    # QQ_I(0, 0) == 0 is False, so zero tests go through bool().
    return not x


def magnitude(x):
    """|x| as a float, for either mode."""
    if isinstance(x, GaussianRational):
        return abs(complex(float(x.x), float(x.y)))
    return abs(x)


def magnitudes(values):
    values = np.asarray(values)
    if values.dtype == object:
        return np.array([magnitude(v) for v in values.ravel()], dtype=float).reshape(values.shape)
    return np.abs(values)


def is_real(x):
    if isinstance(x, GaussianRational):
        return not x.y
    return complex(x).imag == 0


def mode_of(values):
    return RATIONAL if np.asarray(values).dtype == object else FLOAT


def to_complex_array(values):
    values = np.asarray(values)
    if values.dtype == object:
        return np.array([to_complex(v) for v in values.ravel()], dtype=complex).reshape(values.shape)
    return values.astype(complex)


def format_real(x, mode):
    """Full-precision text for one real part: 17 significant digits or ``p/q``."""
    if mode == RATIONAL:
        f = _exact(x)
        return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"
    return format(float(x), ".17g")


def to_json(x, mode):
    """JSON-ready form: a real number/string, or an ``[re, im]`` pair."""
    re, im = parts(convert(x, mode))
    if mode == RATIONAL:
        enc = lambda v: format_real(v, RATIONAL)  # noqa: E731
    else:
        enc = float
    if im:
        return [enc(re), enc(im)]
    return enc(re)

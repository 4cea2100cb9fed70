"""JSON problem files: parsing with field-path errors, expansion, canonical emit.

A problem file describes one Jacobi operator on a window plus what to do with
it.  See ``docs/schemas.md`` for the full schema; in short::

    {
      "schema_version": 1,
      "window": {"a": 1, "n_max": 4},           # lo = a - 1, hi = n_max
      "mode": "rational",
      "n0": 0,
      "lambda0": 0,
      "coefficients": {
        "p": {"name": "constant", "params": {"value": 1}},
        "q": [0, 0, 0, 0],
        "r": {"name": "constant", "params": {"value": 1}}
      },
      "boundary": {"left": {"alpha": 1, "beta": 0, "site": 0},
                   "right": {"alpha": 1, "beta": 0, "site": 4}},
      "lambdas": [0, "1/2", [0, 1]]
    }

Scalars are numbers, exact strings ``"p/q"`` or ``[re, im]`` pairs.
"""

import json
import math
from dataclasses import dataclass, field

from . import scalar
from .scalar import FLOAT, RATIONAL
from .seqgrid import CoefficientSet, IndexWindow
from .spectral import BoundaryCondition, BoundarySide, DegenerateProblem

SCHEMA_VERSION = 1
BUILTINS = ("constant", "power", "exponential", "laguerre_p")
_TOP_KEYS = {"schema_version", "name", "description", "window", "mode", "n0", "lambda0",
             "coefficients", "boundary", "lambdas", "seed", "shooting", "bounded", "expected"}


class ProblemError(ValueError):
    """Invalid problem file; ``path`` names the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


def _scalar(x, mode, path):
    if isinstance(x, bool) or x is None or isinstance(x, dict):
        raise ProblemError(path, f"expected a scalar, got {x!r}")
    try:
        return scalar.convert(x, mode)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ProblemError(path, f"not a scalar ({exc})") from None


def _int(x, path):
    if isinstance(x, bool) or not isinstance(x, int):
        raise ProblemError(path, f"expected an integer, got {x!r}")
    return x


def _obj(x, path):
    if not isinstance(x, dict):
        raise ProblemError(path, f"expected an object, got {type(x).__name__}")
    return x


def _no_extra(d, allowed, path):
    extra = set(d) - set(allowed)
    if extra:
        raise ProblemError(path, f"unknown keys {sorted(extra)}")


@dataclass(frozen=True)
class Builtin:
    """A named coefficient family with keyword parameters.

    * ``constant``: ``value``
    * ``power``: ``scale * (n + shift) ** exponent``
    * ``exponential``: ``scale * base ** n * exp(i * phase * n)`` (``phase`` float mode only)
    * ``laguerre_p``: ``n + 1``, so that the coefficient in front of ``Δu(n-1)`` is ``n``
    """

    name: str
    params: tuple   # sorted (key, value) pairs

    def param(self, key, default=None):
        return dict(self.params).get(key, default)

    def value(self, n, mode):
        one = scalar.convert(1, mode)
        if self.name == "constant":
            return self.param("value")
        if self.name == "power":
            k = self.param("exponent")
            return self.param("scale", one) * (scalar.convert(n, mode) + self.param("shift", 0 * one)) ** k
        if self.name == "exponential":
            b = self.param("base")
            v = self.param("scale", one) * (b ** n if n >= 0 else one / b ** (-n))
            phase = self.param("phase")
            if phase is not None:
                v = v * complex(math.cos(phase * n), math.sin(phase * n))
            return v
        return scalar.convert(n + 1, mode)


_PARAMS = {
    "constant": ({"value"}, {"value"}),
    "power": ({"exponent"}, {"scale", "exponent", "shift"}),
    "exponential": ({"base"}, {"base", "scale", "phase"}),
    "laguerre_p": (set(), set()),
}


def _builtin(d, mode, path):
    _no_extra(d, {"name", "params"}, path)
    name = d.get("name")
    if name not in BUILTINS:
        raise ProblemError(f"{path}.name", f"unknown builtin {name!r}; expected one of {BUILTINS}")
    params = _obj(d.get("params", {}), f"{path}.params")
    required, allowed = _PARAMS[name]
    _no_extra(params, allowed, f"{path}.params")
    missing = required - set(params)
    if missing:
        raise ProblemError(f"{path}.params", f"missing {sorted(missing)}")
    out = {}
    for key, val in params.items():
        kp = f"{path}.params.{key}"
        if key == "exponent":
            out[key] = _int(val, kp)
            if out[key] < 0:
                raise ProblemError(kp, "exponent must be nonnegative")
        elif key == "phase":
            if mode == RATIONAL:
                raise ProblemError(kp, "a phase is not exact; use float mode")
            if isinstance(val, bool) or not isinstance(val, (int, float)):
                raise ProblemError(kp, "phase must be a real number")
            out[key] = float(val)
        else:
            out[key] = _scalar(val, mode, kp)
    if name == "exponential" and scalar.is_zero(out["base"]):
        raise ProblemError(f"{path}.params.base", "base must be nonzero")
    return Builtin(name, tuple(sorted(out.items())))


def _spec_json(spec, mode):
    if isinstance(spec, Builtin):
        params = {k: (v if k in ("exponent", "phase") else scalar.to_json(v, mode)) for k, v in spec.params}
        return {"name": spec.name, "params": params}
    return [scalar.to_json(v, mode) for v in spec]


def _side(d, mode, path):
    _obj(d, path)
    _no_extra(d, {"alpha", "beta", "site"}, path)
    for key in ("alpha", "beta", "site"):
        if key not in d:
            raise ProblemError(path, f"missing {key!r}")

    def coeffs(v, p):
        if isinstance(v, dict):
            _no_extra(v, {"poly"}, p)
            poly = v.get("poly")
            if not isinstance(poly, list) or not poly:
                raise ProblemError(f"{p}.poly", "expected a nonempty list of λ-coefficients")
            return tuple(_scalar(x, mode, f"{p}.poly[{i}]") for i, x in enumerate(poly))
        return (_scalar(v, mode, p),)

    side = BoundarySide(coeffs(d["alpha"], f"{path}.alpha"), coeffs(d["beta"], f"{path}.beta"),
                        _int(d["site"], f"{path}.site"))
    if side.alpha_zero and side.beta_zero:
        raise ProblemError(path, "degenerate boundary condition: alpha = beta = 0")
    return side


def _side_json(side, mode):
    def enc(c):
        return scalar.to_json(c[0], mode) if len(c) == 1 else {"poly": [scalar.to_json(x, mode) for x in c]}
    return {"alpha": enc(side.alpha), "beta": enc(side.beta), "site": side.site}


@dataclass(frozen=True)
class ProblemFile:
    lo: int
    hi: int
    mode: str
    n0: int
    lambda0: object
    coefficients: tuple            # ((name, spec), ...) for p, q, r
    boundary: object = None        # BoundaryCondition or None
    lambdas: tuple = ()
    seed: tuple = None
    name: str = ""
    description: str = ""
    shooting: tuple = None         # (lam_lo, lam_hi, grid)
    bounded: tuple = ()            # sorted (key, value) pairs
    expected: tuple = ()           # sorted (key, tuple of scalars) pairs
    schema_version: int = SCHEMA_VERSION
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def window(self):
        return IndexWindow(self.lo, self.hi)

    def spec(self, name):
        return dict(self.coefficients)[name]

    def coefficient_set(self, mode=None):
        mode = self.mode if mode is None else mode
        key = ("c", mode)
        if key not in self._cache:
            ranges = {"p": (self.lo, self.hi - 1), "q": (self.lo + 1, self.hi), "r": (self.lo + 1, self.hi)}
            seqs = {}
            for name, spec in self.coefficients:
                a, b = ranges[name]
                vals = list(spec) if not isinstance(spec, Builtin) else [spec.value(n, self.mode)
                                                                        for n in range(a, b + 1)]
                seqs[name] = [scalar.convert(v, mode) for v in vals]
            self._cache[key] = CoefficientSet(self.window, seqs["p"], seqs["q"], seqs["r"], mode)
        return self._cache[key]

    def bounded_option(self, key, default=None):
        return dict(self.bounded).get(key, default)

    def expected_values(self, key):
        return dict(self.expected).get(key)

    def to_dict(self):
        m = self.mode
        d = {"schema_version": self.schema_version}
        if self.name:
            d["name"] = self.name
        if self.description:
            d["description"] = self.description
        d["window"] = {"a": self.lo + 1, "n_max": self.hi}
        d["mode"] = m
        d["n0"] = self.n0
        d["lambda0"] = scalar.to_json(self.lambda0, m)
        d["coefficients"] = {k: _spec_json(v, m) for k, v in self.coefficients}
        if self.boundary is not None:
            d["boundary"] = {"left": _side_json(self.boundary.left, m),
                             "right": _side_json(self.boundary.right, m)}
        if self.lambdas:
            d["lambdas"] = [scalar.to_json(x, m) for x in self.lambdas]
        if self.seed is not None:
            d["seed"] = [scalar.to_json(x, m) for x in self.seed]
        if self.shooting is not None:
            d["shooting"] = dict(zip(("lam_lo", "lam_hi", "grid"), self.shooting))
        if self.bounded:
            d["bounded"] = dict(self.bounded)
        if self.expected:
            d["expected"] = {k: [scalar.to_json(x, m) for x in v] for k, v in self.expected}
        return d


def parse(data, mode=None):
    """Validate a decoded JSON document and return a :class:`ProblemFile`.

    ``mode`` overrides the file's arithmetic mode.  Raises
    :class:`ProblemError` with the path of the first offending field.
    """
    d = _obj(data, "")
    _no_extra(d, _TOP_KEYS, "")
    version = d.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ProblemError("schema_version", f"unsupported version {version!r}; expected {SCHEMA_VERSION}")
    mode = d.get("mode", FLOAT) if mode is None else mode
    if mode not in scalar.MODES:
        raise ProblemError("mode", f"expected one of {scalar.MODES}, got {mode!r}")

    w = _obj(d.get("window"), "window")
    _no_extra(w, {"a", "n_max"}, "window")
    lo = _int(w.get("a"), "window.a") - 1
    hi = _int(w.get("n_max"), "window.n_max")
    if hi < lo + 2:
        raise ProblemError("window", f"need n_max >= a + 1, got a={lo + 1}, n_max={hi}")

    n0 = _int(d.get("n0", lo), "n0")
    if not lo <= n0 <= hi - 1:
        raise ProblemError("n0", f"must lie in [{lo}, {hi - 1}]")
    lambda0 = _scalar(d.get("lambda0", 0), mode, "lambda0")

    cd = _obj(d.get("coefficients"), "coefficients")
    _no_extra(cd, {"p", "q", "r"}, "coefficients")
    lengths = {"p": hi - lo, "q": hi - lo, "r": hi - lo}
    coeffs = []
    for name in ("p", "q", "r"):
        path = f"coefficients.{name}"
        if name not in cd:
            raise ProblemError(path, "missing")
        v = cd[name]
        if isinstance(v, dict):
            spec = _builtin(v, mode, path)
        elif isinstance(v, list):
            if len(v) != lengths[name]:
                raise ProblemError(path, f"expected {lengths[name]} values, got {len(v)}")
            spec = tuple(_scalar(x, mode, f"{path}[{i}]") for i, x in enumerate(v))
        else:
            raise ProblemError(path, "expected an array or a builtin object")
        coeffs.append((name, spec))

    bc = None
    if d.get("boundary") is not None:
        b = _obj(d["boundary"], "boundary")
        _no_extra(b, {"left", "right"}, "boundary")
        for key in ("left", "right"):
            if key not in b:
                raise ProblemError("boundary", f"missing {key!r}")
        left, right = _side(b["left"], mode, "boundary.left"), _side(b["right"], mode, "boundary.right")
        try:
            bc = BoundaryCondition(left, right)
            bc.check_window(lo, hi)
        except (DegenerateProblem, ValueError) as exc:
            raise ProblemError("boundary", str(exc)) from None

    lambdas = d.get("lambdas", [])
    if not isinstance(lambdas, list):
        raise ProblemError("lambdas", "expected a list")
    lambdas = tuple(_scalar(x, mode, f"lambdas[{i}]") for i, x in enumerate(lambdas))

    seed = d.get("seed")
    if seed is not None:
        if not isinstance(seed, list) or len(seed) != hi - lo + 1:
            raise ProblemError("seed", f"expected a list of {hi - lo + 1} values")
        seed = tuple(_scalar(x, mode, f"seed[{i}]") for i, x in enumerate(seed))
        for i, v in enumerate(seed):
            if scalar.is_zero(v):
                raise ProblemError(f"seed[{i}]", "seed must not vanish")

    shooting = None
    if d.get("shooting") is not None:
        s = _obj(d["shooting"], "shooting")
        _no_extra(s, {"lam_lo", "lam_hi", "grid"}, "shooting")
        try:
            shooting = (float(s["lam_lo"]), float(s["lam_hi"]), _int(s.get("grid", 2000), "shooting.grid"))
        except (KeyError, TypeError, ValueError) as exc:
            raise ProblemError("shooting", f"needs numeric lam_lo, lam_hi ({exc})") from None
        if not shooting[0] < shooting[1] or shooting[2] < 2:
            raise ProblemError("shooting", "need lam_lo < lam_hi and grid >= 2")

    bounded = _obj(d.get("bounded", {}), "bounded")
    _no_extra(bounded, {"horizon", "min_tail", "threshold"}, "bounded")
    for key in ("horizon", "min_tail"):
        if key in bounded:
            _int(bounded[key], f"bounded.{key}")
    if "threshold" in bounded and (isinstance(bounded["threshold"], bool)
                                   or not isinstance(bounded["threshold"], (int, float))):
        raise ProblemError("bounded.threshold", "expected a number")

    expected = _obj(d.get("expected", {}), "expected")
    _no_extra(expected, {"eigenvalues"}, "expected")
    exp = []
    for key, vals in expected.items():
        if not isinstance(vals, list):
            raise ProblemError(f"expected.{key}", "expected a list")
        exp.append((key, tuple(_scalar(x, mode, f"expected.{key}[{i}]") for i, x in enumerate(vals))))

    for key in ("name", "description"):
        if not isinstance(d.get(key, ""), str):
            raise ProblemError(key, "expected a string")

    pf = ProblemFile(lo, hi, mode, n0, lambda0, tuple(coeffs), bc, lambdas, seed,
                     d.get("name", ""), d.get("description", ""), shooting,
                     tuple(sorted(bounded.items())), tuple(sorted(exp)), version)
    try:
        c = pf.coefficient_set()
    except ValueError as exc:
        msg = str(exc)
        path = "coefficients.p"
        if msg.startswith("p(") and ")" in msg:
            path = f"coefficients.p[{int(msg[2:msg.index(')')]) - lo}]"
        raise ProblemError(path, msg) from None
    except (TypeError, ZeroDivisionError, OverflowError) as exc:
        raise ProblemError("coefficients", f"expansion failed ({exc})") from None
    del c
    return pf


def loads(text, mode=None):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"line {exc.lineno}", f"invalid JSON: {exc.msg}") from None
    return parse(data, mode)


def load(path, mode=None):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), mode)


def dumps(pf, indent=2):
    return json.dumps(pf.to_dict(), indent=indent, ensure_ascii=False) + "\n"


__all__ = ["ProblemFile", "ProblemError", "Builtin", "SCHEMA_VERSION", "BUILTINS",
           "parse", "loads", "load", "dumps"]

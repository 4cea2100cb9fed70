"""Command-line front end: ``spps solve|eigen|bounded|verify|demo``.

Exit codes: 0 success, 1 usage or parse error, 2 numerical failure,
3 inconclusive boundedness certificate, 4 necessary condition violated.
"""

import argparse
import csv
import io
import math
import sys

import numpy as np

from . import bounded, scalar, seed, series, spectral
from .oracle import shooting_eigen_real
from .problem import SCHEMA_VERSION, ProblemError, load
from .scalar import FLOAT, RATIONAL
from .seqgrid import CoefficientSet, relative_residuals

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_INCONCLUSIVE, EXIT_NECESSARY = 0, 1, 2, 3, 4
DEFAULT_TOL = 1e-10


class CommandError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


# ----------------------------------------------------------------- output

def _num(x, mode):
    re, im = scalar.parts(scalar.convert(x, mode))
    return scalar.format_real(re, mode), scalar.format_real(im, mode)


def _flt(x):
    return "" if x is None else format(float(x), ".17g")


def _render(header, rows, pretty):
    if not pretty:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["schema_version", *header])
        for row in rows:
            w.writerow([SCHEMA_VERSION, *row])
        return buf.getvalue()
    cells = [header] + [[_pretty_cell(v) for v in row] for row in rows]
    widths = [max(len(str(r[j])) for r in cells) for j in range(len(header))]
    lines = ["  ".join(str(v).rjust(widths[j]) for j, v in enumerate(r)) for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _pretty_cell(v):
    if isinstance(v, str):
        try:
            f = float(v)
        except ValueError:
            return v
        if "/" in v or v.lstrip("-").isdigit():
            return v
        return format(f, ".10g")
    return v


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _note(msg):
    print(msg, file=sys.stderr)


# ----------------------------------------------------------------- helpers

def _seed_for(pf, c, rng=None):
    if pf.seed is not None:
        s = seed.certify(c, list(pf.seed), pf.lambda0)
    else:
        s = seed.auto_seed(c, pf.lambda0, rng=rng)
    return s


def _construct(pf, mode):
    c = pf.coefficient_set(mode)
    try:
        s = _seed_for(pf, c)
    except (seed.SeedNotFound, seed.SeedVanishes) as exc:
        raise CommandError(f"seed construction failed: {exc}", EXIT_NUMERIC) from None
    t, u1, u2 = series.solutions(c, s, pf.n0)
    return c, s, t, u1, u2


# ----------------------------------------------------------------- commands

def cmd_solve(pf, args):
    if not pf.lambdas:
        raise CommandError("solve needs a nonempty 'lambdas' list", EXIT_USAGE)
    mode = pf.mode
    c, s, t, u1, u2 = _construct(pf, mode)
    rows, worst = [], (0.0, None, None)
    for lam in pf.lambdas:
        a, b = series.eval_solution(u1, lam), series.eval_solution(u2, lam)
        res1, res2 = relative_residuals(c, a, lam), relative_residuals(c, b, lam)
        lr, li = _num(lam, mode)
        for j, n in enumerate(c.window.indices()):
            res = None
            if c.lo < n < c.hi:
                res = max(res1[n - c.lo - 1], res2[n - c.lo - 1])
                if res > worst[0]:
                    worst = (res, n, lam)
            rows.append([lr, li, n, *_num(s.u0(n), mode), *_num(a(n), mode), *_num(b(n), mode), _flt(res)])
    header = ["lambda_re", "lambda_im", "n", "u0_re", "u0_im", "u1_re", "u1_im", "u2_re", "u2_im",
              "residual"]
    _emit(_render(header, rows, args.pretty), args.out)
    if worst[0] > args.tol:
        _note(f"residual {worst[0]:.3g} exceeds tolerance at n={worst[1]}, lambda={scalar.to_complex(worst[2])}")
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_eigen(pf, args):
    if pf.boundary is None:
        raise CommandError("eigen needs a 'boundary' block", EXIT_USAGE)
    c, s, t, u1, u2 = _construct(pf, pf.mode)
    try:
        res = spectral.solve_eigen(c, u1, u2, pf.boundary)
    except spectral.DegenerateProblem as exc:
        raise CommandError(str(exc), EXIT_NUMERIC) from None
    except spectral.NoConvergence as exc:
        rows = [[k, *_num(z, FLOAT), "", "", "", "unconverged" if k in exc.unconverged else ""]
                for k, z in enumerate(exc.roots)]
        _emit(_render(["index", "lambda_re", "lambda_im", "residual", "boundary_residual",
                       "multiple", "status"], rows, args.pretty), args.out)
        _note(str(exc))
        return EXIT_NUMERIC
    rows = []
    for k, z in enumerate(res.eigenvalues):
        ok = res.residuals[k] <= args.tol and res.boundary_residuals[k] <= args.tol
        rows.append([k, *_num(z, FLOAT), _flt(res.residuals[k]), _flt(res.boundary_residuals[k]),
                     int(res.multiplicity_flags[k]), "ok" if ok else "residual"])
    _emit(_render(["index", "lambda_re", "lambda_im", "residual", "boundary_residual", "multiple",
                   "status"], rows, args.pretty), args.out)
    if args.eigenfunctions:
        frows = []
        for k, f in enumerate(res.eigenfunctions):
            if f is None:
                continue
            for n, v in zip(f.indices(), f.values):
                frows.append([k, n, *_num(v, FLOAT)])
        _emit(_render(["index", "n", "value_re", "value_im"], frows, args.pretty), args.eigenfunctions)
    if not all(r[-1] == "ok" for r in rows):
        _note("some eigenpairs exceed the residual tolerance")
        return EXIT_NUMERIC
    return EXIT_OK


def _bounded_problem(pf):
    c = pf.coefficient_set()
    if not all(scalar.is_zero(v) for v in c.q.values):
        raise CommandError("bounded needs q ≡ 0 (the equation Δ(pΔu) = r u)", EXIT_USAGE)
    s = seed.constant_seed(c, 0)
    return c, series.build_table(c, s, pf.n0)


def cmd_bounded(pf, args):
    c, t = _bounded_problem(pf)
    horizon = pf.bounded_option("horizon")
    min_tail = pf.bounded_option("min_tail")
    threshold = pf.bounded_option("threshold")
    rows, necessary_violated = [], False
    try:
        diags = (*bounded.necessary_diagnostic(c), bounded.shifted_diagnostic(c))
        signs = True
    except bounded.SignConditionError as exc:
        diags = bounded.absolute_diagnostics(c)
        signs = False
        rows.append(["sign_conditions", "status", "not met"])
        _note(f"necessary-condition check skipped: {exc}")
    if signs:
        rows.append(["sign_conditions", "status", "met"])
    for d in diags:
        div = d.practical_divergence(threshold)
        info = d.to_dict()
        for key in ("n_terms", "last", "monotone", "block_ratio"):
            rows.append([f"series.{d.kind}", key, str(info[key])])
        rows.append([f"series.{d.kind}", "practical_divergence", str(div)])
        if signs and div and d.kind in ("inv_p", "double_rp"):
            necessary_violated = True
    certs = {"certificate.solutions": bounded.sufficiency_certificate(c, t, horizon, min_tail=min_tail),
             "certificate.quasi_derivative": bounded.phi_bounded_certificate(c, t, horizon, min_tail=min_tail)}
    for section, cert in certs.items():
        for key, val in cert.to_dict().items():
            if key != "kind":
                rows.append([section, key, str(val)])
    main = certs["certificate.solutions"]
    if necessary_violated:
        verdict, code = "necessary-condition-violated", EXIT_NECESSARY
    elif main.valid:
        verdict, code = "certified", EXIT_OK
    else:
        verdict, code = "inconclusive", EXIT_INCONCLUSIVE
    rows.append(["summary", "verdict", verdict])
    _emit(_render(["section", "key", "value"], rows, args.pretty), args.out)
    if code == EXIT_NECESSARY:
        _note("necessary condition violated: a driving series diverges on the window")
    elif code == EXIT_OK:
        _note(f"certified, delta = {main.delta:.6g}, n_star = {main.n_star}")
    return code


def _verify_lambdas(pf):
    if pf.lambdas:
        return list(pf.lambdas)
    return [pf.lambda0, pf.lambda0 + scalar.convert("1/2", pf.mode)]


def cmd_verify(pf, args):
    mode = pf.mode
    c, s, t, u1, u2 = _construct(pf, mode)
    checks = []          # (name, discrepancy, n, lambda)

    checks.append(("seed_residual", s.relative_residual, None, pf.lambda0))
    for lam in _verify_lambdas(pf):
        a, b = series.eval_solution(u1, lam), series.eval_solution(u2, lam)
        for name, u in (("u1", a), ("u2", b)):
            # march outward from n0, where the series reproduces the seed data
            o = seed.solve_recurrence(c, lam, u(pf.n0), u(pf.n0 + 1), start=pf.n0)
            diff = scalar.magnitudes(u.values - o.values)
            k = int(np.argmax(diff))
            scale = max(scalar.magnitudes(o.values).max(), 1e-300)
            checks.append((f"oracle_{name}", float(diff[k] / scale), c.lo + k, lam))
        worst = (0.0, None)
        for n in range(c.lo, c.hi):
            # scaled by the size of the cancelling products, like the operator residual
            w = c.p(n) * series.casoratian(c, a, b, n) - 1
            size = scalar.magnitude(c.p(n)) * (scalar.magnitude(a(n) * b(n + 1))
                                               + scalar.magnitude(a(n + 1) * b(n)))
            m = scalar.magnitude(w) / max(1.0, size)
            if m >= worst[0]:
                worst = (m, n)
        checks.append(("casoratian", worst[0], worst[1], lam))

    roots = None
    if pf.boundary is not None:
        try:
            res = spectral.solve_eigen(c, u1, u2, pf.boundary)
        except (spectral.DegenerateProblem, spectral.NoConvergence) as exc:
            raise CommandError(f"eigenvalue solve failed: {exc}", EXIT_NUMERIC) from None
        roots = res.eigenvalues
        checks.append(("eigen_residual", float(np.max(res.residuals, initial=0.0)), None, None))
        if c.is_real() and pf.boundary.is_real():
            real = np.array(sorted(z.real for z in roots if abs(z.imag) <= 1e-8 * max(1.0, abs(z))))
            if pf.shooting is not None:
                lam_lo, lam_hi, grid = pf.shooting
            elif len(real):
                span = max(1.0, real[-1] - real[0])
                lam_lo, lam_hi, grid = real[0] - 0.1 * span, real[-1] + 0.1 * span, 4000
            else:
                lam_lo = lam_hi = None
            if lam_lo is not None:
                shot = np.array(shooting_eigen_real(c, pf.boundary, lam_lo, lam_hi, grid))
                inside = real[(real >= lam_lo) & (real <= lam_hi)]
                if len(shot) != len(inside):
                    checks.append(("shooting_count", math.inf, None, None))
                    _note(f"shooting found {len(shot)} eigenvalues, polynomial roots give {len(inside)}")
                else:
                    d = np.abs(shot - inside) / np.maximum(1.0, np.abs(inside))
                    k = int(np.argmax(d)) if len(d) else 0
                    checks.append(("shooting", float(d[k]) if len(d) else 0.0, None,
                                   inside[k] if len(d) else None))
    exp = pf.expected_values("eigenvalues")
    if exp is not None:
        if roots is None:
            raise CommandError("expected eigenvalues need a 'boundary' block", EXIT_USAGE)
        want = sorted((scalar.to_complex(z) for z in exp), key=lambda z: (z.real, z.imag))
        if len(want) != len(roots):
            checks.append(("expected_eigenvalues", math.inf, None, None))
        else:
            d = [abs(a - b) / max(1.0, abs(b)) for a, b in zip(roots, want)]
            k = int(np.argmax(d))
            checks.append(("expected_eigenvalues", float(d[k]), None, want[k]))

    rows = []
    for name, disc, n, lam in checks:
        lr, li = _num(lam, FLOAT) if lam is not None else ("", "")
        rows.append([name, _flt(disc), "" if n is None else n, lr, li,
                     "ok" if disc <= args.tol else "FAIL"])
    _emit(_render(["check", "discrepancy", "n", "lambda_re", "lambda_im", "status"], rows, args.pretty),
          args.out)
    failed = [r for r in checks if not r[1] <= args.tol]
    if failed:
        name, disc, n, lam = max(failed, key=lambda r: r[1])
        where = f" at n={n}" if n is not None else ""
        where += f", lambda={scalar.to_complex(lam)}" if lam is not None else ""
        _note(f"verify failed: {name} discrepancy {disc:.3g}{where}")
        return EXIT_NUMERIC
    return EXIT_OK


def _demo_delta2(mode, kmax=6, nmax=12):
    c = CoefficientSet.from_functions(0, nmax, 1, 0, 1, mode)
    t = series.build_table(c, seed.constant_seed(c, 0), 0, 2 * kmax + 1)
    rows = []
    for k in range(kmax + 1):
        for n in range(nmax + 1):
            fx = scalar.convert(series.falling_factorial(n + k - 1, 2 * k), mode) / math.factorial(2 * k)
            fy = scalar.convert(series.falling_factorial(n + k, 2 * k + 1), mode) / math.factorial(2 * k + 1)
            rows.append(("X[2k]", k, n, t.x(2 * k, n), fx))
            rows.append(("Y[2k+1]", k, n, t.y(2 * k + 1, n), fy))
    return rows


def _laguerre(nmax, r, mode):
    c = CoefficientSet.from_functions(0, nmax, lambda s: s + 1, 0, r, mode)
    return c, series.build_table(c, seed.constant_seed(c, 0), 0)


def _demo_laguerre(mode, nmax=12):
    rows = []
    c, t = _laguerre(nmax, 1, mode)
    for k in range(1, nmax + 1):
        for n in range(nmax + 1):
            lhs = t.x(2 * k, n) + t.y(2 * k - 1, n)
            rhs = scalar.convert(series.falling_factorial(n, k), mode) / math.factorial(k) ** 2
            rows.append(("X[2k]+Y[2k-1]", k, n, lhs, rhs))
    for n in range(1, nmax + 1):
        rows.append(("Y[2n-1](n)", n, n, t.y(2 * n - 1, n), scalar.convert(1, mode) / math.factorial(n)))
    c, t = _laguerre(nmax, -1, mode)
    u1, u2 = series.assemble_u1(t), series.assemble_u2(t)
    for lam in (1, 2, "1/2"):
        a, b = series.eval_solution(u1, lam), series.eval_solution(u2, lam)
        lam_m = scalar.convert(lam, mode)
        for n in range(nmax + 1):
            ref = series.laguerre_closed_form(n, lam)
            rows.append((f"u1-lambda*u2 @ {lam}", 0, n, a(n) - b.values[n] * lam_m, scalar.convert(ref, mode)))
    return rows


DEMOS = {"delta2": _demo_delta2, "laguerre": _demo_laguerre}


def cmd_demo(args):
    if args.name not in DEMOS:
        raise CommandError(f"unknown demo {args.name!r}; choose from {sorted(DEMOS)}", EXIT_USAGE)
    mode = args.mode or RATIONAL
    rows, bad = [], 0
    for check, k, n, got, want in DEMOS[args.name](mode):
        diff = scalar.magnitude(got - want)
        ok = (diff == 0) if mode == RATIONAL else diff <= args.tol * max(1.0, scalar.magnitude(want))
        bad += not ok
        rows.append([check, k, n, *_num(got, mode), *_num(want, mode), "ok" if ok else "MISMATCH"])
    _emit(_render(["check", "k", "n", "computed_re", "computed_im", "expected_re", "expected_im", "status"],
                  rows, args.pretty), args.out)
    if bad:
        _note(f"{bad} mismatches")
        return EXIT_NUMERIC
    return EXIT_OK


# ----------------------------------------------------------------- entry

def build_parser():
    ap = argparse.ArgumentParser(prog="spps", description="Finite power-series solutions of Jacobi "
                                 "difference equations: solve, eigenvalues, boundedness, cross-checks.")
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="acceptance tolerance")
    common.add_argument("--mode", choices=scalar.MODES, help="override the arithmetic mode")
    common.add_argument("--out", help="write the table here instead of stdout")
    common.add_argument("--pretty", action="store_true", help="aligned human-readable table")
    for name, helptext in (("solve", "evaluate u1, u2 at the file's lambdas"),
                           ("eigen", "eigenvalues of the two-point problem"),
                           ("bounded", "boundedness diagnostics and certificates"),
                           ("verify", "cross-check against the direct recurrence and shooting")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--file", required=True, help="problem file (JSON)")
        if name == "eigen":
            p.add_argument("--eigenfunctions", help="also write eigenfunction values to this CSV")
    p = sub.add_parser("demo", parents=[common], help="built-in closed-form regressions")
    p.add_argument("name", nargs="?", default="delta2", help="delta2 or laguerre")
    p.add_argument("--file", help=argparse.SUPPRESS)
    return ap


COMMANDS = {"solve": cmd_solve, "eigen": cmd_eigen, "bounded": cmd_bounded, "verify": cmd_verify}


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        if args.command == "demo":
            return cmd_demo(args)
        pf = load(args.file, args.mode)
        return COMMANDS[args.command](pf, args)
    except ProblemError as exc:
        _note(f"{args.file}: {exc}")
        return EXIT_USAGE
    except OSError as exc:
        _note(str(exc))
        return EXIT_USAGE
    except CommandError as exc:
        _note(str(exc))
        return exc.code


if __name__ == "__main__":
    sys.exit(main())

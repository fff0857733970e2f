"""Command line front end.

Exit codes: 0 success or clean pass, 1 a mathematical check failed, 2 usage
error, unreadable input, or an unmet precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from fractions import Fraction
from typing import List, Optional

from . import bounds
from .document import dump, load, serialize
from .errors import TangentFlowError
from .exp_log import Diffeo, compose, exp_field, log_diffeo, scale_conjugate
from .majorant import GevreyParams, find_gevrey_radius, gevrey_dominated, gevrey_fit
from .series import Series, truncate
from .vector_field import VectorField

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


class UsageError(TangentFlowError):
    pass


class Outcome:
    """What a subcommand produced: exit code, machine result, text lines, reports."""

    def __init__(self, code=EXIT_OK, result=None, lines=None, reports=None, message=None):
        self.code = code
        self.result = result or {}
        self.lines = lines or []
        self.reports = reports or []
        self.message = message

    @property
    def status(self):
        return {EXIT_OK: "pass", EXIT_FAIL: "fail"}.get(self.code, "error")


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _components(obj):
    if isinstance(obj, Series):
        return [obj]
    if isinstance(obj, VectorField):
        return list(obj.components)
    return list(obj.displacement)


def _expect(obj, kind, flag="--in"):
    if not isinstance(obj, kind):
        name = {VectorField: "field", Diffeo: "diffeo", Series: "series"}[kind]
        raise UsageError(f"{flag} must be a {name} document, got {type(obj).__name__}")
    return obj


def _write(obj, path) -> List[str]:
    if path in (None, "-"):
        return [serialize(obj).rstrip("\n")]
    dump(obj, path)
    return [f"wrote {path}"]


def _report_outcome(report: bounds.BoundsReport, extra_lines=()) -> Outcome:
    code = {"passed": EXIT_OK, "failed": EXIT_FAIL}.get(report.status, EXIT_ERROR)
    lines = [f"{report.name}: {report.status.upper()}"]
    if report.precondition:
        lines.append(f"  precondition: {report.precondition}")
    d = report.to_dict()
    for key, val in d["margins"].items():
        lines.append(f"  {key}: {val}")
    for key, val in d["notes"].items():
        if isinstance(val, list) and len(val) > 8:
            val = val[:8] + ["..."]
        lines.append(f"  {key}: {val}")
    for v in d["violations"][:20]:
        lines.append(f"  violation: {v}")
    if len(d["violations"]) > 20:
        lines.append(f"  ... {len(d['violations']) - 20} more violations")
    lines.extend(extra_lines)
    return Outcome(code, lines=lines, reports=[d])


# -- handlers -----------------------------------------------------------------


def cmd_exp(args):
    X = _expect(load(args.input), VectorField)
    F = exp_field(X, args.trunc)
    return Outcome(result={"trunc": args.trunc, "m": F.m, "n": F.n},
                   lines=_write(F, args.out))


def cmd_log(args):
    F = _expect(load(args.input), Diffeo)
    X = log_diffeo(F, args.trunc)
    return Outcome(result={"trunc": args.trunc, "m": X.m, "n": X.n},
                   lines=_write(X, args.out))


def cmd_roundtrip(args):
    obj = load(args.input)
    N = args.trunc
    if isinstance(obj, VectorField):
        back = log_diffeo(exp_field(obj, N), N)
        want = VectorField([truncate(c, N) for c in obj.components], obj.n)
        route = "log(exp(X))"
    elif isinstance(obj, Diffeo):
        back = exp_field(log_diffeo(obj, N), N)
        want = Diffeo([truncate(c, N) for c in obj.displacement], obj.n_minus_1)
        route = "exp(log(F))"
    else:
        raise UsageError("roundtrip needs a field or diffeo document")
    ok = back == want
    return Outcome(EXIT_OK if ok else EXIT_FAIL, result={"route": route, "trunc": N, "equal": ok},
                   lines=[f"{route} == input to degree {N}: {ok}"])


def cmd_compose(args):
    F = _expect(load(args.f), Diffeo, "--f")
    G = _expect(load(args.g), Diffeo, "--g")
    H = compose(F, G)
    return Outcome(result={"trunc": H.trunc, "n": H.n}, lines=_write(H, args.out))


def cmd_conjugate(args):
    obj = load(args.input)
    if isinstance(obj, Series):
        raise UsageError("conjugate needs a field or diffeo document")
    out = scale_conjugate(obj, args.lam)
    return Outcome(result={"lambda": str(args.lam)}, lines=_write(out, args.out))


def cmd_gevrey_fit(args):
    obj = load(args.input)
    fits, lines = [], []
    for i, comp in enumerate(_components(obj)):
        r = gevrey_fit(comp, args.qmin, args.qmax)
        fits.append({"component": i + 1, "s_hat": r.s_hat, "a_hat": r.a_hat,
                     "residual": r.residual, "degrees_used": [r.degrees_used[0], r.degrees_used[-1]],
                     "count": len(r.degrees_used)})
        lines.append(f"component {i + 1}: s_hat={r.s_hat:.6f} a_hat={r.a_hat:.6g} "
                     f"residual={r.residual:.4g} degrees={r.degrees_used[0]}..{r.degrees_used[-1]}")
    return Outcome(result={"fits": fits}, lines=lines)


def _n_for(obj, n):
    if n is not None:
        return n
    if isinstance(obj, Series):
        raise UsageError("--n is required for series documents")
    return obj.n


def cmd_gevrey_check(args):
    obj = load(args.input)
    n = _n_for(obj, args.n)
    P = GevreyParams(args.s, args.a, obj.m, n)
    verdicts = [gevrey_dominated(c, P) for c in _components(obj)]
    ok = all(verdicts)
    lines = [f"component {i + 1}: {'dominated' if v else 'NOT dominated'}"
             for i, v in enumerate(verdicts)]
    return Outcome(EXIT_OK if ok else EXIT_FAIL,
                   result={"s": str(P.s), "a": str(P.a), "n": n, "dominated": verdicts},
                   lines=lines)


def cmd_gevrey_radius(args):
    obj = load(args.input)
    n = _n_for(obj, args.n)
    radii = [find_gevrey_radius(c, args.s, n) for c in _components(obj)]
    if any(r is None for r in radii):
        return Outcome(EXIT_FAIL, result={"radius": None},
                       lines=[f"terms below degree n={n}: no radius exists"])
    a = max(radii)
    return Outcome(result={"radius": str(a), "radius_float": float(a),
                           "components": [str(r) for r in radii]},
                   lines=[f"radius a = {a} (~{float(a):.10g})"])


def _prec(args):
    return bounds.PrecisionConfig(significant_digits=args.digits)


def cmd_bounds_theta(args):
    v = bounds.theta(args.y, args.m, args.n, _prec(args))
    return Outcome(result={"theta": str(v)}, lines=[f"Theta({args.y}) = {v}"])


def cmd_bounds_cmn(args):
    v = bounds.c_mn(args.m, args.n)
    return Outcome(result={"c_mn": str(v)}, lines=[f"C_(m,n) = {v}"])


def cmd_bounds_bq(args):
    v = bounds.b_q(args.m, args.n, args.s, args.q, _prec(args))
    b = bounds.bq_bound(args.m, args.n, args.s, _prec(args))
    ok = v < b
    return Outcome(EXIT_OK if ok else EXIT_FAIL, result={"b_q": str(v), "bound": str(b)},
                   lines=[f"b_{args.q} = {v}", f"bound = {b}", f"b_q < bound: {ok}"])


def cmd_bounds_aconst(args):
    v = bounds.a_const(args.m, args.n, args.s, _prec(args))
    return Outcome(result={"A": str(v)}, lines=[f"A = {v}"])


def cmd_bounds_bq_sweep(args):
    return _report_outcome(bounds.check_bq_bounded(args.m, args.n, args.s, args.Q, _prec(args)))


def cmd_bounds_aseq(args):
    cfg = bounds.RadiosConfig(t=args.t, r=args.r, m=args.m, a_start=args.a_start,
                              K=args.K, q_cap=args.q_cap)
    values, report = bounds.a_seq(cfg, _prec(args))
    out = _report_outcome(report)
    out.result = {"values": [str(v) for v in values]}
    return out


def cmd_verify_potencias(args):
    X = _expect(load(args.input), VectorField)
    return _report_outcome(bounds.check_potencias(X, args.s, args.a, args.K, args.N, _prec(args)))


def cmd_verify_theorem(args):
    F = _expect(load(args.input), Diffeo)
    return _report_outcome(bounds.check_theorem_bound(F, args.s, args.a, args.N, _prec(args)))


def cmd_verify_biendefinido(args):
    X = _expect(load(args.input), VectorField)
    t = args.s * (X.n - 1)
    cfg = bounds.RadiosConfig(t=t, r=args.r, m=X.m, a_start=args.a, K=args.K, q_cap=args.q_cap)
    return _report_outcome(bounds.check_biendefinido(X, args.s, args.a, cfg, args.N, _prec(args)))


# -- parser --------------------------------------------------------------------


def _common(p):
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.add_argument("--seed", type=int, default=None,
                   help="accepted for pipeline compatibility; all computation is deterministic")
    p.add_argument("--digits", type=int, default=50, help="significant digits for real-valued checks")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tangentflow",
        description="Exp/Log of formal vector fields and verification of Gevrey majorant bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = _common(sub.add_parser("exp", help="Exp of a field document"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trunc", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_exp)

    p = _common(sub.add_parser("log", help="infinitesimal generator of a diffeo document"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trunc", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_log)

    p = _common(sub.add_parser("roundtrip", help="check log(exp(X)) = X or exp(log(F)) = F"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--trunc", type=int, required=True)
    p.set_defaults(func=cmd_roundtrip)

    p = _common(sub.add_parser("compose", help="F o G for two diffeo documents"))
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_compose)

    p = _common(sub.add_parser("conjugate", help="conjugate by the scaling x -> lambda x"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lambda", dest="lam", type=_rational, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_conjugate)

    gev = sub.add_parser("gevrey", help="Gevrey growth tools").add_subparsers(
        dest="gevrey_command", required=True)
    p = _common(gev.add_parser("fit", help="fit log M_q ~ s log q! + q log a + c"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--qmin", type=int, required=True)
    p.add_argument("--qmax", type=int, required=True)
    p.set_defaults(func=cmd_gevrey_fit)
    p = _common(gev.add_parser("check", help="exact domination by H_{s,n}(a x)"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_gevrey_check)
    p = _common(gev.add_parser("radius", help="smallest dominating radius"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--n", type=int, default=None)
    p.set_defaults(func=cmd_gevrey_radius)

    bnd = sub.add_parser("bounds", help="evaluate the constants of the estimates").add_subparsers(
        dest="bounds_command", required=True)
    p = _common(bnd.add_parser("theta"))
    p.add_argument("--y", type=_rational, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bounds_theta)
    p = _common(bnd.add_parser("cmn"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_bounds_cmn)
    p = _common(bnd.add_parser("bq"))
    for flag in ("--m", "--n", "--q"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.set_defaults(func=cmd_bounds_bq)
    p = _common(bnd.add_parser("aconst"))
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.set_defaults(func=cmd_bounds_aconst)
    p = _common(bnd.add_parser("bq-sweep"))
    for flag in ("--m", "--n", "--Q"):
        p.add_argument(flag, type=int, required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.set_defaults(func=cmd_bounds_bq_sweep)
    p = _common(bnd.add_parser("aseq"))
    p.add_argument("--t", type=_rational, required=True)
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--a-start", type=_rational, default=Fraction(1))
    p.add_argument("--K", type=int, default=200)
    p.add_argument("--q-cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_bounds_aseq)

    ver = sub.add_parser("verify", help="verify the majorant estimates on a document").add_subparsers(
        dest="verify_command", required=True)
    p = _common(ver.add_parser("potencias", help="iterated-power bound"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_verify_potencias)
    p = _common(ver.add_parser("theorem", help="generator bound under the smallness condition"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_verify_theorem)
    p = _common(ver.add_parser("biendefinido", help="Exp bound below the critical exponent"))
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--s", type=_rational, required=True)
    p.add_argument("--a", type=_rational, required=True)
    p.add_argument("--r", type=_rational, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--q-cap", type=int, default=10 ** 6)
    p.set_defaults(func=cmd_verify_biendefinido)
    return parser


def report_schema() -> dict:
    """JSON schema for ``--json`` output."""
    return json.loads(resources.files("tangentflow").joinpath("report_schema.json").read_text())


def _command_name(args) -> str:
    parts = [args.command]
    for attr in ("gevrey_command", "bounds_command", "verify_command"):
        if getattr(args, attr, None):
            parts.append(getattr(args, attr))
    return " ".join(parts)


def main(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        outcome = args.func(args)
    except (TangentFlowError, ValueError, OSError) as exc:
        outcome = Outcome(EXIT_ERROR, message=f"{type(exc).__name__}: {exc}")
    if args.json:
        payload = {
            "command": _command_name(args),
            "status": outcome.status,
            "exit_code": outcome.code,
            "result": outcome.result,
            "reports": outcome.reports,
        }
        if outcome.message:
            payload["message"] = outcome.message
        print(json.dumps(payload, indent=2), file=stdout)
    else:
        for line in outcome.lines:
            print(line, file=stdout)
        if outcome.message:
            print(f"error: {outcome.message}", file=sys.stderr)
    return outcome.code


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()

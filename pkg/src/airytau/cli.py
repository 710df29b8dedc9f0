"""Command-line entry point: ``airytau <group> <command> [options]``.

Scalars and configurations go to stdout as JSON, grids as CSV.  Complex
numbers are written as ``[re, im]``; with ``--decimal`` each part is a
decimal string carrying the full requested digits, otherwise a double
(which keeps only about 16 digits).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
import time
import warnings
from importlib import metadata

import mpmath
from mpmath import mp

from . import __version__, acceptance
from .airy import ContourConfig, airy_jet, verify_parametrix_jumps
from .errors import (AirytauError, InvalidPartition, NumericalFailure, SchemaError,
                     ValidationError)
from .kontsevich import SpectrumPartition, log_difference, log_Zn
from .lenard import lenard
from .numkernel import GUARD, TIERS, default_digits
from .pade import bound_report, pade_remainder, pade_zeros
from .painleve import build_config, config_from_assignment, ode_residual, stokes_gap

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL, EXIT_FAIL, EXIT_USAGE = 0, 2, 3, 1, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n\n{self.format_help()}")


# ------------------------------------------------------------------ numbers

class Formatter:
    def __init__(self, digits: int, decimal: bool):
        self.digits = digits
        self.decimal = decimal

    def real(self, x):
        if not self.decimal:
            return float(x)
        with mp.workdps(self.digits + GUARD):
            x = mpmath.mpf(x)
            return mpmath.nstr(x, self.digits, min_fixed=-mpmath.inf, max_fixed=mpmath.inf) if x else "0"

    def cplx(self, z):
        with mp.workdps(self.digits + GUARD):
            z = mpmath.mpc(z)
            return [self.real(z.real), self.real(z.imag)]


def _parse_real(value, pointer: str):
    if isinstance(value, bool) or not isinstance(value, (int, float, str)):
        raise SchemaError("expected a number or decimal string", pointer)
    try:
        return mpmath.mpf(value)
    except (ValueError, TypeError):
        raise SchemaError(f"{value!r} is not a decimal number", pointer) from None


def _parse_pair(value, pointer: str):
    if not isinstance(value, list) or len(value) != 2:
        raise SchemaError("expected [re, im]", pointer)
    return mpmath.mpc(_parse_real(value[0], pointer + "/0"), _parse_real(value[1], pointer + "/1"))


def parse_partition(doc, digits: int | None = None) -> SpectrumPartition:
    """Validate a partition document and build the ``SpectrumPartition``."""
    if not isinstance(doc, dict):
        raise SchemaError("expected an object", "")
    unknown = set(doc) - {"digits", "x", "y0", "y1", "y2"}
    if unknown:
        raise SchemaError(f"unknown field {sorted(unknown)[0]!r}", "/" + sorted(unknown)[0])
    d = doc.get("digits", default_digits()) if digits is None else digits
    if d not in TIERS or isinstance(d, bool):
        raise SchemaError(f"digits must be one of {TIERS}", "/digits")
    with mp.workdps(d + GUARD):
        if "x" not in doc:
            raise SchemaError("missing field", "/x")
        x = _parse_pair(doc["x"], "/x")
        blocks = []
        for nu, name in enumerate(("y0", "y1", "y2")):
            raw = doc.get(name, [])
            if not isinstance(raw, list):
                raise SchemaError("expected a list of [re, im] pairs", f"/{name}")
            block = []
            for i, item in enumerate(raw):
                ptr = f"/{name}/{i}"
                y = _parse_pair(item, ptr)
                try:
                    SpectrumPartition(0, (y,), digits=d) if nu == 0 else \
                        SpectrumPartition(0, (), **{name: (y,)}, digits=d)
                except InvalidPartition as exc:
                    raise SchemaError(str(exc), ptr) from None
                block.append(y)
            blocks.append(tuple(block))
        try:
            return SpectrumPartition(x, *blocks, digits=d)
        except InvalidPartition as exc:
            raise SchemaError(str(exc), "") from None


def load_partition(path: str, digits: int | None = None) -> SpectrumPartition:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}", "") from None
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    return parse_partition(doc, digits)


def _labels(text: str) -> tuple:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected k_plus,k_zero,k_minus, got {text!r}") from None
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated integers")
    return parts


def _grid(text: str) -> list:
    try:
        a, b, step = (mpmath.mpf(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:step, got {text!r}") from None
    if step <= 0 or b < a:
        raise argparse.ArgumentTypeError("grid needs step > 0 and start <= stop")
    n = int(mpmath.nint((b - a) / step))
    return [float(a + k * step) for k in range(n + 1)]


def _t(text: str):
    # "0.25" or "0.25,0.01" for a complex t
    parts = text.split(",")
    if len(parts) == 1:
        return mpmath.mpf(parts[0])
    return mpmath.mpc(*(mpmath.mpf(p) for p in parts))


# ------------------------------------------------------------------ commands

def cmd_airy_eval(args, fmt):
    with mp.workdps(args.digits + GUARD):
        z = mpmath.mpc(mpmath.mpf(args.re), mpmath.mpf(args.im))
    jet = airy_jet(z, args.nu, args.deriv, args.digits)
    return {"values": [fmt.cplx(v) for v in jet.values]}


def cmd_airy_verify_jumps(args, fmt):
    kw = {k: getattr(args, k) for k in ("theta0", "theta_plus", "theta_minus") if getattr(args, k) is not None}
    rays = ContourConfig(**kw)
    res = verify_parametrix_jumps(args.rho, rays, args.digits)
    return {"max_residual": fmt.real(res["max"]),
            "per_ray": {k: fmt.real(v) for k, v in res.items() if k != "max"}}


def cmd_pade_zeros(args, fmt):
    approx = pade_zeros(args.r, args.digits)
    report = [{"zero": fmt.cplx(row["zero"]), "annulus": row["annulus"],
               "real_part": row["real_part"], "argument": row["argument"]}
              for row in bound_report(args.r, approx.zeros, args.digits)]
    if args.report:
        return {"zeros": [fmt.cplx(a) for a in approx.zeros], "bound_check": report}
    print(json.dumps({"bound_check": "pass", "checked": len(report)}), file=args.stderr)
    return [fmt.cplx(a) for a in approx.zeros]


def cmd_pade_remainder(args, fmt):
    res = pade_remainder(args.r, (args.re, args.im), args.digits, args.theta0)
    return {"direct": fmt.cplx(res.direct), "integral": fmt.cplx(res.integral),
            "bound": fmt.real(res.bound)}


def cmd_zn_eval(args, fmt):
    p = load_partition(args.input, args.digits_given)
    fmt.digits = p.digits
    res = log_Zn(p)
    return {"log_z": fmt.cplx(res.log_z), "n": res.n, "digits_lost": res.digits_lost_estimate}


def cmd_zn_gap(args, fmt):
    a = load_partition(args.input, args.digits_given)
    b = load_partition(args.against, args.digits_given)
    d = max(a.digits, b.digits)
    fmt.digits = d
    za, zb = log_Zn(a, d).log_z, log_Zn(b, d).log_z
    with mp.workdps(d + GUARD):
        return {"gap": fmt.real(log_difference(za, zb))}


def cmd_lenard_show(args, fmt):
    P = lenard(args.n)
    if args.latex:
        return P.to_latex()
    if args.json:
        return {"n": args.n, "terms": [{"monomial": list(m), "coefficient": str(c)} for m, c in P]}
    return str(P)


def _config_json(cfg, fmt):
    part = cfg.partition(0)
    return {
        "N": cfg.N, "r": cfg.r, "t": fmt.cplx(cfg.t), "n": cfg.n,
        "labels": {"k_plus": cfg.k_plus, "k_zero": cfg.k_zero, "k_minus": cfg.k_minus},
        "ray_labels": list(cfg.ray_labels) if cfg.ray_labels else None,
        "assignment": {str(k): nu for k, nu in cfg.assignment},
        "partition": {"digits": cfg.digits, "x": fmt.cplx(0),
                      "y0": [fmt.cplx(y) for y in part.y0],
                      "y1": [fmt.cplx(y) for y in part.y1],
                      "y2": [fmt.cplx(y) for y in part.y2]},
    }


def _p1_config(args):
    if args.binning is not None:
        if len(args.binning) != 2 * args.N + 1:
            raise ValidationError(f"--binning needs {2 * args.N + 1} entries (kappa = -N..N)")
        assignment = {k - args.N: nu for k, nu in enumerate(args.binning)}
        return config_from_assignment(args.N, args.r, args.t, assignment, args.digits)
    return build_config(args.N, args.r, args.t, args.kplus, args.kzero, args.kminus, args.digits)


def _binning(text: str) -> tuple:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated sector indices, got {text!r}") from None
    if any(p not in (0, 1, 2) for p in parts):
        raise argparse.ArgumentTypeError("sector indices must be 0, 1 or 2")
    return parts


def cmd_p1_config(args, fmt):
    return _config_json(_p1_config(args), fmt)


def cmd_p1_residual(args, fmt):
    cfg = _p1_config(args)
    rep = ode_residual(cfg, args.grid, args.h, args.digits, args.method)
    rows = list(zip(rep.x_grid, rep.u_values, rep.residuals, rep.fd_errors))
    if args.json:
        return {"method": rep.method, "h": rep.fd_step,
                "rows": [{"x": x, "u": fmt.cplx(u), "residual": fmt.real(res), "fd_error": err}
                         for x, u, res, err in rows]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    # u is real on the real axis up to rounding; its imaginary part goes last
    w.writerow(["x", "u", "residual", "fd_error", "u_imag"])
    for x, u, res, err in rows:
        u = mpmath.mpc(u)
        w.writerow([repr(x), fmt.real(u.real), fmt.real(res), repr(err), fmt.real(u.imag)])
    return _Raw(buf.getvalue())


def cmd_p1_stokes_gap(args, fmt):
    gap = stokes_gap(args.N, args.r, args.t, args.a, args.b, args.digits, args.x)
    return {"gap": fmt.real(gap), "labels_a": list(args.a), "labels_b": list(args.b)}


def cmd_suite_acceptance(args, fmt):
    checks = []
    for fn in acceptance.ALL:
        n = int(fn.__name__.split("_")[1])
        if args.only and n not in args.only:
            continue
        check = fn()
        checks.append(check)
        if not args.json:
            print(check.line(), file=args.stdout, flush=True)
    ok = all(c.passed for c in checks)
    if args.json:
        return _Status({"passed": ok, "criteria": [
            {"criterion": c.number, "title": c.title, "passed": c.passed,
             "detail": c.detail, "seconds": round(c.seconds, 3)} for c in checks]}, ok)
    passed = sum(c.passed for c in checks)
    return _Status(_Raw(f"{passed}/{len(checks)} criteria passed\n"), ok)


class _Raw(str):
    """Output written verbatim instead of JSON-encoded."""


class _Status:
    def __init__(self, payload, ok: bool):
        self.payload, self.ok = payload, ok


# ------------------------------------------------------------------ parser

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    # SUPPRESS keeps a subcommand's defaults from clobbering flags given before it
    common.add_argument("--digits", type=int, choices=TIERS, default=argparse.SUPPRESS,
                        help="target accuracy tier (default: $AIRYTAU_DIGITS or 32)")
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="JSON output where CSV or text is the default")
    common.add_argument("--decimal", action="store_true", default=argparse.SUPPRESS,
                        help="write real numbers as full-precision decimal strings")
    common.add_argument("--manifest", metavar="PATH", default=argparse.SUPPRESS,
                        help="write a run manifest to PATH")

    p = _Parser(prog="airytau", description=__doc__.splitlines()[0], parents=[common])
    p.add_argument("--version", action="version", version=f"airytau {__version__}")
    groups = p.add_subparsers(dest="group", metavar="{airy,pade,zn,lenard,p1,suite}", parser_class=_Parser)

    def sub(group, name, func, help_):
        sp = group.add_parser(name, help=help_, parents=[common])
        sp.set_defaults(func=func)
        return sp

    g = groups.add_parser("airy", help="Airy functions and the local parametrix").add_subparsers(
        dest="command", parser_class=_Parser)
    s = sub(g, "eval", cmd_airy_eval, "derivative jet of Ai(omega^nu z)")
    s.add_argument("--re", default="0")
    s.add_argument("--im", default="0")
    s.add_argument("--nu", type=int, choices=(0, 1, 2), default=0)
    s.add_argument("--deriv", type=int, default=0)
    s = sub(g, "verify-jumps", cmd_airy_verify_jumps, "parametrix jump residuals on |zeta| = rho")
    s.add_argument("--rho", type=float, default=1.0)
    s.add_argument("--theta0", type=float, default=None)
    s.add_argument("--theta-plus", type=float, default=None)
    s.add_argument("--theta-minus", type=float, default=None)

    g = groups.add_parser("pade", help="diagonal Pade approximants of exp(-z)").add_subparsers(
        dest="command", parser_class=_Parser)
    s = sub(g, "zeros", cmd_pade_zeros, "zeros of P_r with the bound check")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--report", action="store_true", help="include the per-zero bound check in stdout")
    s = sub(g, "remainder", cmd_pade_remainder, "remainder e^-z - P_r(z)/P_r(-z)")
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--re", default="1")
    s.add_argument("--im", default="0")
    s.add_argument("--theta0", type=float, default=None)

    g = groups.add_parser("zn", help="generalized Kontsevich integral").add_subparsers(
        dest="command", parser_class=_Parser)
    s = sub(g, "eval", cmd_zn_eval, "log Z_n for a partition file")
    s.add_argument("--input", required=True)
    s = sub(g, "gap", cmd_zn_gap, "|log Z_n(a) - log Z_n(b)|")
    s.add_argument("--input", required=True)
    s.add_argument("--against", required=True)

    g = groups.add_parser("lenard", help="Lenard-Magri polynomials").add_subparsers(
        dest="command", parser_class=_Parser)
    s = sub(g, "show", cmd_lenard_show, "print L_n")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--latex", action="store_true")

    g = groups.add_parser("p1", help="Painleve I hierarchy configurations").add_subparsers(
        dest="command", parser_class=_Parser)
    for name, func, help_ in (("config", cmd_p1_config, "partition for given labels"),
                              ("residual", cmd_p1_residual, "ODE residual along a grid (CSV)")):
        s = sub(g, name, func, help_)
        s.add_argument("--N", type=int, required=True)
        s.add_argument("--r", type=int, required=True)
        s.add_argument("--t", type=_t, default=mpmath.mpf("0.25"))
        s.add_argument("--kplus", type=int, default=1)
        s.add_argument("--kzero", type=int, default=0)
        s.add_argument("--kminus", type=int, default=-1)
        s.add_argument("--binning", type=_binning, default=None,
                       help="explicit sector per group, kappa = -N..N (overrides the labels)")
        if name == "residual":
            s.add_argument("--grid", type=_grid, default=_grid("-1:1:0.5"))
            s.add_argument("--h", type=float, default=2.0 ** -6)
            s.add_argument("--method", choices=("fd", "taylor"), default="fd")
    s = sub(g, "stokes-gap", cmd_p1_stokes_gap, "log Z_n gap between two label triples")
    s.add_argument("--N", type=int, required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--t", type=_t, default=mpmath.mpf("0.25"))
    s.add_argument("--a", type=_labels, default=(1, 0, -1), help="k_plus,k_zero,k_minus")
    s.add_argument("--b", type=_labels, default=(1, 0, 0), help="k_plus,k_zero,k_minus")
    s.add_argument("--x", type=float, default=0.0)

    g = groups.add_parser("suite", help="acceptance checks").add_subparsers(
        dest="command", parser_class=_Parser)
    s = sub(g, "acceptance", cmd_suite_acceptance, "run every acceptance criterion")
    s.add_argument("--only", type=int, nargs="*", help="criterion numbers to run")
    return p


def _versions() -> dict:
    out = {"airytau": __version__, "python": platform.python_version()}
    try:
        out["mpmath"] = metadata.version("mpmath")
    except metadata.PackageNotFoundError:
        out["mpmath"] = mpmath.__version__
    return out


def _encode(payload) -> str:
    if isinstance(payload, _Raw):
        return str(payload)
    return json.dumps(payload, sort_keys=False) + "\n"


_VALUE_OPTS = {"--grid", "--re", "--im", "--t", "--x", "--a", "--b", "--kplus", "--kzero", "--kminus",
               "--theta0", "--theta-plus", "--theta-minus"}


def _glue_values(argv: list) -> list:
    """Turn ``--grid -1:1:0.5`` into ``--grid=-1:1:0.5`` so leading minus signs survive argparse."""
    out, i = [], 0
    while i < len(argv):
        if argv[i] in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def dispatch(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_values(argv))
        if not getattr(args, "func", None):
            raise UsageError(parser.format_help())
    except UsageError as exc:
        print(str(exc), file=stderr)
        return EXIT_USAGE

    code = EXIT_OK
    t0 = time.perf_counter()
    try:
        for name, default in (("json", False), ("decimal", False), ("manifest", None), ("digits", None)):
            if not hasattr(args, name):
                setattr(args, name, default)
        args.stdout, args.stderr = stdout, stderr
        args.digits_given = args.digits
        if args.digits is None:
            args.digits = default_digits()
        fmt = Formatter(args.digits, args.decimal)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            out = args.func(args, fmt)
        for w in caught:
            print(f"warning: {w.category.__name__}: {w.message}", file=stderr)
    except ValidationError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_VALIDATION
    except NumericalFailure as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERICAL
    except AirytauError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return EXIT_NUMERICAL

    if isinstance(out, _Status):
        code = EXIT_OK if out.ok else EXIT_FAIL
        out = out.payload
    text = _encode(out) if (args.json or not isinstance(out, str) or isinstance(out, _Raw)) else out + "\n"
    stdout.write(text)
    if args.manifest:
        params = {k: v for k, v in vars(args).items()
                  if k not in {"func", "manifest", "digits_given", "stdout", "stderr"}}
        manifest = {
            "command": argv,
            "parameters": json.loads(json.dumps(params, default=str)),
            "digits": args.digits,
            "versions": _versions(),
            "wall_time": round(time.perf_counter() - t0, 6),
            "outputs": text,
            "exit_code": code,
        }
        with open(args.manifest, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")
    return code


def main(argv=None):
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()

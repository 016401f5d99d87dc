"""Command-line front end.

Exit codes: 0 success, 2 usage error, 3 no root in the scan window,
4 no crossing of ``Lambda = 0``, 5 verification failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Any, TextIO

import numpy as np

from .characteristics import RED, TraceResult, integrate, trace_to_eigenvalue
from .connection import DEFAULT_K_MAX, DEFAULT_TOL, theta_frobenius, theta_limit
from .errors import (
    Blowup,
    DomainError,
    MaxIterations,
    NoConvergence,
    NoCrossing,
    NoRootInWindow,
    TruncationUnstable,
)
from .oracle import OracleSpec, contains, oracle_eigenvalues
from .params import ModeOrder, ParamVec
from .rootfind import find_surface_roots, scan_grid, theta_on_surface
from .verify import DEFAULT_SEED, SUITES, run_suite

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_ROOT = 3
EXIT_NO_CROSSING = 4
EXIT_VERIFY_FAILED = 5

ORACLE_TOL = 1e-6


class UsageError(Exception):
    pass


# -- output ------------------------------------------------------------------


def fmt_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def _json_value(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        # JSON has no literal for non-finite numbers
        return fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return '"' + v.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json_value(x) for x in v) + "]"
    if v is None:
        return "null"
    raise TypeError(f"cannot serialize {type(v).__name__}")


def to_json(obj: dict[str, Any]) -> str:
    """One flat JSON object, keys in insertion order, floats at 17 digits."""
    body = ",\n".join(f'  "{k}": {_json_value(v)}' for k, v in obj.items())
    return "{\n" + body + "\n}\n"


def to_csv(header: list[str], rows: list[list[float]]) -> str:
    lines = [",".join(header)]
    lines += [",".join(fmt_float(x) for x in r) for r in rows]
    return "\n".join(lines) + "\n"


def _warn(msg: str) -> None:
    print(f"warning: {msg}", file=sys.stderr)


# -- commands ----------------------------------------------------------------


def _mode(args) -> ModeOrder:
    if not (math.isfinite(args.mu) and args.mu >= 0):
        raise UsageError("--mu must be a finite number >= 0")
    return ModeOrder(args.mu)


def _check_window(lo: float, hi: float, step: float) -> None:
    if not lo < hi:
        raise UsageError("need --lambda-min < --lambda-max")
    if not step > 0:
        raise UsageError("--step must be positive")


def _check_series(args) -> None:
    if not args.tol > 0:
        raise UsageError("--tol must be positive")
    if args.k_max < 10:
        raise UsageError("--k-max must be at least 10")


def cmd_theta(args) -> tuple[int, str]:
    mode = _mode(args)
    _check_series(args)
    u = ParamVec(args.u1, args.u2, args.u3)
    fn = theta_frobenius if args.method == "frobenius" else theta_limit
    try:
        r = fn(mode, u, args.lam, tol=args.tol, k_max=args.k_max, richardson=args.richardson)
    except NoConvergence as exc:
        _warn(str(exc))
        r = exc.best
    out = {
        "theta": r.theta,
        "k_used": r.k_used,
        "tail_estimate": r.tail_estimate,
        "converged": r.converged,
        "method": args.method,
    }
    return EXIT_OK, to_json(out)


def scan_table(mode: ModeOrder, a: float, b: float, lo: float, hi: float, step: float, tol: float, k_max: int):
    rows = []
    for lam in scan_grid(lo, hi, step):
        lam = float(lam)
        try:
            th = theta_on_surface(mode, a, b, lam, tol=tol, k_max=k_max)
        except NoConvergence as exc:
            _warn(f"no convergence at lambda={fmt_float(lam)}: {exc}")
            th = math.nan
        rows.append([lam, th])
    return rows


def cmd_theta_scan(args) -> tuple[int, str]:
    mode = _mode(args)
    _check_window(args.lambda_min, args.lambda_max, args.step)
    _check_series(args)
    rows = scan_table(mode, args.a, args.b, args.lambda_min, args.lambda_max, args.step, args.tol, args.k_max)
    if args.format == "json":
        return EXIT_OK, to_json({"lambda": [r[0] for r in rows], "theta": [r[1] for r in rows]})
    return EXIT_OK, to_csv(["lambda", "theta"], rows)


def _roots(args, mode):
    _check_window(args.lambda_min, args.lambda_max, args.step)
    _check_series(args)
    try:
        roots = find_surface_roots(
            mode, args.a, args.b, args.lambda_min, args.lambda_max, args.step, tol=args.tol, k_max=args.k_max
        )
    except MaxIterations as exc:
        _warn(str(exc))
        roots = []
    if not roots:
        raise NoRootInWindow(f"no sign change of Theta on [{args.lambda_min}, {args.lambda_max}]")
    return sorted(roots, key=lambda r: r.root)


def cmd_root(args) -> tuple[int, str]:
    mode = _mode(args)
    roots = _roots(args, mode)
    out = {
        "roots": [r.root for r in roots],
        "residuals": [r.residual for r in roots],
        "iterations": [r.iterations for r in roots],
    }
    return EXIT_OK, to_json(out)


def _check_trace(args) -> None:
    if not args.h > 0:
        raise UsageError("--h must be positive")
    if not args.t_max > 0:
        raise UsageError("--t-max must be positive")


def cmd_trace(args) -> tuple[int, str]:
    """Reduced characteristic over ``[0, t_max]`` (or ``[-t_max, 0]``) as CSV.

    The curve runs in the direction of the first crossing and past it, so
    the lambda column changes sign; it is cut short if the curve escapes.
    """
    mode = _mode(args)
    _check_trace(args)
    r = trace_to_eigenvalue(
        mode, args.a, args.b, args.lambda0, h=args.h, t_max=args.t_max, validate_every=args.validate_every
    )
    init = r.samples[0]
    span = args.t_max if r.t0 >= 0 else -args.t_max
    curve = integrate(mode, RED, init, args.h, span, stop_on_blowup=True)
    if abs(curve[-1].t) < args.t_max:
        _warn(f"characteristic escapes near t={fmt_float(curve[-1].t)}; output truncated")
    rows = [[s.t, s.u1, s.u2, s.u3, s.lam, s.psi] for s in curve]
    header = ["t", "u1", "u2", "u3", "lambda", "psi"]
    if args.format == "json":
        out = {k: [row[i] for row in rows] for i, k in enumerate(header)}
        out.update(t0=r.t0, gamma2=r.gamma2, eigenvalue=r.lambda_, psi_drift_max=r.psi_drift_max)
        return EXIT_OK, to_json(out)
    return EXIT_OK, to_csv(header, rows)


def oracle_check(mu: float, gamma2: float, value: float, tol: float = ORACLE_TOL) -> bool:
    """Whether ``value`` is in the Legendre-matrix spectrum at ``(mu, gamma2, beta=0)``."""
    n_modes = 10
    # the mode index is unknown, so ask for every mode up to a little above value
    while True:
        try:
            res = oracle_eigenvalues(OracleSpec(mu, gamma2, 0.0, N=max(80, n_modes + 40), n_modes=n_modes))
        except TruncationUnstable:
            return False
        if res.lambdas[-1] > value + 1.0 or n_modes >= 160:
            return contains(res.lambdas, value, tol)
        n_modes *= 2


def eigen_pipeline(
    mode: ModeOrder,
    a: float,
    b: float,
    lambda_min: float = -3.0,
    lambda_max: float = 1.0,
    step: float = 0.05,
    h: float = 1e-3,
    t_max: float = 1.0,
    tol: float = DEFAULT_TOL,
    k_max: int = DEFAULT_K_MAX,
) -> dict[str, Any]:
    """Scan, refine, trace and cross-check.

    Every refined root is traced in ascending order.  The first trace whose
    eigenvalue the Legendre oracle confirms is reported; if none is
    confirmed, the first completed trace is reported with
    ``oracle_match = false``.

    Raises
    ------
    NoRootInWindow
        If the scan finds no sign change.
    NoCrossing
        If no root leads to a completed trace.
    """
    try:
        roots = find_surface_roots(mode, a, b, lambda_min, lambda_max, step, tol=tol, k_max=k_max)
    except MaxIterations as exc:
        _warn(str(exc))
        roots = []
    if not roots:
        raise NoRootInWindow(f"no sign change of Theta on [{lambda_min}, {lambda_max}]")
    roots = sorted(roots, key=lambda r: r.root)
    chosen: tuple[Any, TraceResult, bool] | None = None
    for r in roots:
        try:
            tr = trace_to_eigenvalue(mode, a, b, r.root, h=h, t_max=t_max)
        except (NoCrossing, Blowup) as exc:
            _warn(f"root {fmt_float(r.root)}: {exc}")
            continue
        match = oracle_check(mode.mu, tr.gamma2, tr.lambda_)
        if match:
            chosen = (r, tr, True)
            break
        if chosen is None:
            chosen = (r, tr, False)
    if chosen is None:
        raise NoCrossing(t_max)
    r, tr, match = chosen
    return {
        "lambda0": r.root,
        "t0": tr.t0,
        "gamma2": tr.gamma2,
        "lambda": tr.lambda_,
        "psi_drift_max": tr.psi_drift_max,
        "theta_residual_at_root": abs(r.residual),
        "oracle_match": match,
        "all_roots": [x.root for x in roots],
    }


def cmd_eigen(args) -> tuple[int, str]:
    mode = _mode(args)
    _check_window(args.lambda_min, args.lambda_max, args.step)
    _check_series(args)
    _check_trace(args)
    out = eigen_pipeline(
        mode, args.a, args.b, args.lambda_min, args.lambda_max, args.step, args.h, args.t_max, args.tol, args.k_max
    )
    return EXIT_OK, to_json(out)


def cmd_oracle(args) -> tuple[int, str]:
    _mode(args)
    if args.modes < 1:
        raise UsageError("--modes must be positive")
    if args.N < args.modes + 10:
        raise UsageError("--N must be at least --modes + 10")
    try:
        res = oracle_eigenvalues(OracleSpec(args.mu, args.gamma2, args.beta, args.N, args.modes))
        stable = True
    except TruncationUnstable as exc:
        _warn(str(exc))
        res, stable = exc.result, False
    out = {"lambdas": list(res.lambdas), "truncation_drift": res.truncation_drift, "stable": stable}
    return EXIT_OK, to_json(out)


def cmd_verify(args) -> tuple[int, str]:
    checks = run_suite(args.suite, seed=args.seed)
    passed = all(c.passed for c in checks)
    out: dict[str, Any] = {"suite": args.suite, "seed": args.seed, "passed": passed}
    for c in checks:
        out[f"{c.name}.passed"] = bool(c.passed)
        out[f"{c.name}.value"] = float(c.value)
        out[f"{c.name}.threshold"] = float(c.threshold)
    return (EXIT_OK if passed else EXIT_VERIFY_FAILED), to_json(out)


# -- parser ------------------------------------------------------------------


def _add_series(p):
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="series tail tolerance")
    p.add_argument("--k-max", type=int, default=DEFAULT_K_MAX, help="maximum series terms")


def _add_window(p):
    p.add_argument("--lambda-min", type=float, default=-3.0)
    p.add_argument("--lambda-max", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.05)


def _add_surface(p):
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--a", type=float, required=True, help="initial u1")
    p.add_argument("--b", type=float, required=True, help="initial u2")


def _add_trace(p):
    p.add_argument("--h", type=float, default=1e-3, help="Runge-Kutta step")
    p.add_argument("--t-max", type=float, default=1.0, help="search span in t, each direction")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spheroidal-pde",
        description="Spheroidal eigenvalues from connection coefficients and characteristics.",
    )
    parser.add_argument("--output", "-o", help="write to this file instead of standard output")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta", help="connection coefficient Theta(Lambda, u)")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--u1", type=float, required=True)
    p.add_argument("--u2", type=float, required=True)
    p.add_argument("--u3", type=float, required=True)
    p.add_argument("--lam", type=float, required=True, help="Lambda")
    p.add_argument("--method", choices=["series", "frobenius"], default="series")
    p.add_argument("--richardson", action="store_true", help="extrapolate the reported value")
    _add_series(p)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("theta-scan", help="Theta on the Psi = 0 surface over a Lambda grid")
    _add_surface(p)
    _add_window(p)
    _add_series(p)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_theta_scan)

    p = sub.add_parser("root", help="all zeros of Theta on the Psi = 0 surface in a window")
    _add_surface(p)
    _add_window(p)
    _add_series(p)
    p.set_defaults(func=cmd_root)

    p = sub.add_parser("trace", help="follow the reduced characteristic to Lambda = 0")
    _add_surface(p)
    p.add_argument("--lambda0", type=float, required=True, help="zero of Theta at (a, b)")
    _add_trace(p)
    p.add_argument("--validate-every", type=int, default=0, help="check |Theta| every N steps (0: off)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("eigen", help="scan, refine, trace and cross-check against the oracle")
    _add_surface(p)
    _add_window(p)
    _add_trace(p)
    _add_series(p)
    p.set_defaults(func=cmd_eigen)

    p = sub.add_parser("oracle", help="eigenvalues from the Legendre-matrix expansion")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--gamma2", type=float, required=True)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--N", type=int, default=80, help="truncation size")
    p.add_argument("--modes", type=int, default=5)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_verify)
    return parser


def _emit(text: str, path: str | None, stream: TextIO) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        stream.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        code, text = args.func(args)
    except (UsageError, DomainError) as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoRootInWindow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ROOT
    except NoCrossing as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CROSSING
    _emit(text, args.output, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())

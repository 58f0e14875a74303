"""Command line entry point.

Exit status: 0 on success, 1 when a verification fails, 2 on usage or
validation errors.
"""

from __future__ import annotations

import argparse
import logging
import sys

import numpy as np

from .berwald import CatalogParams, catalog_norm
from .errors import DomainError, FinslerError, ValidationError
from .flow_oracles import flag_curvature
from .harness import RunConfig, batch_verify, curve_csv, dumps_report, report_ok, validate_report
from .invariants import run_invariants
from .lie_spray import CANONICAL
from .solvers import SeedM, solve_cfc, solve_landsberg

CSV_POINTS = 101
CURVATURE_POINTS = 21
CURVATURE_TOL = 1e-4


def _positive(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="conicfinsler", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="integrate a profile ODE and write CSV")
    kind = solve.add_subparsers(dest="kind", required=True)
    for name in ("landsberg", "cfc"):
        s = kind.add_parser(name)
        s.add_argument("--seed", required=True, help="a0,a1,a2,a3")
        s.add_argument("--t", type=_positive, default=0.15, help="half width of the angle interval")
        s.add_argument("--tol", type=_positive, default=1e-10 if name == "landsberg" else 1e-12)
        s.add_argument("--out", help="CSV path (default: stdout)")
        if name == "cfc":
            s.add_argument("--c", type=float, required=True, help="flag curvature")

    cat = sub.add_parser("catalog", help="profile of a closed-form Berwald family")
    cat.add_argument("--case", type=int, required=True, choices=(1, 2, 3))
    cat.add_argument("--lambda", dest="lam", type=float, required=True)
    cat.add_argument("--mu", type=float, default=0.5)
    cat.add_argument("--out", help="CSV path (default: stdout)")

    ver = sub.add_parser("verify", help="batch verification")
    what = ver.add_subparsers(dest="what", required=True)
    td = what.add_parser("theorem-d", help="Landsberg solutions coincide with matched Berwald profiles")
    td.add_argument("--n", type=int, default=100)
    td.add_argument("--rng", type=int, default=42)
    td.add_argument("--tol-compare", type=_positive, default=1e-7)
    td.add_argument("--jobs", type=int, default=1)
    td.add_argument("--report", help="JSON path (default: stdout)")

    cur = sub.add_parser("curvature", help="flag curvature profile of a solved curve")
    cur.add_argument("--seed", required=True, help="a0,a1,a2,a3")
    cur.add_argument("--c", type=float, help="solve for constant curvature c instead of Landsberg")
    cur.add_argument("--t", type=_positive, default=0.1)

    sub.add_parser("invariants", help="run the property suite")
    return p


def _emit(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _grid(domain, half_width, n):
    lo, hi = max(domain[0], -half_width), min(domain[1], half_width)
    return np.linspace(lo, hi, n)


def _cmd_solve(args) -> int:
    seed = SeedM.parse(args.seed)
    span = (-args.t, args.t)
    if args.kind == "landsberg":
        curve = solve_landsberg(seed, span, args.tol)
    else:
        curve = solve_cfc(seed, args.c, span, args.tol)
    _emit(curve_csv(curve, _grid(curve.domain, args.t, CSV_POINTS)), args.out)
    return 0


def _cmd_catalog(args) -> int:
    curve = catalog_norm(CatalogParams(args.case, args.lam, args.mu))
    _emit(curve_csv(curve, np.linspace(*curve.domain, CSV_POINTS)), args.out)
    return 0


def _cmd_verify(args) -> int:
    if args.n < 0:
        raise ValidationError("--n must be non-negative")
    cfg = RunConfig(rng_seed=args.rng, n_cases=args.n, tol_compare=args.tol_compare)
    report = batch_verify(cfg, jobs=max(1, args.jobs))
    validate_report(report)
    _emit(dumps_report(report), args.report)
    s = report["summary"]
    print(
        f"pass={s['pass']} fail={s['fail']} truncated={s['truncated']} "
        f"max_sup_error={s['max_sup_error']:.3e}",
        file=sys.stderr,
    )
    return 0 if report_ok(report) else 1


def _cmd_curvature(args) -> int:
    seed = SeedM.parse(args.seed)
    span = (-1.5 * args.t, 1.5 * args.t)
    curve = solve_landsberg(seed, span) if args.c is None else solve_cfc(seed, args.c, span)
    lines = ["t,K"]
    worst = 0.0
    for t in _grid(curve.domain, args.t, CURVATURE_POINTS):
        try:
            K = flag_curvature(CANONICAL, curve, curve.jet_at(float(t)))
        except FinslerError:
            continue
        lines.append(f"{float(t)!r},{K!r}")
        if args.c is not None:
            worst = max(worst, abs(K - args.c))
    sys.stdout.write("\n".join(lines) + "\n")
    return 0 if worst <= CURVATURE_TOL else 1


def _cmd_invariants(_args) -> int:
    checks = run_invariants()
    for c in checks:
        print(c.line())
    return 0 if all(c.passed for c in checks) else 1


COMMANDS = {
    "solve": _cmd_solve,
    "catalog": _cmd_catalog,
    "verify": _cmd_verify,
    "curvature": _cmd_curvature,
    "invariants": _cmd_invariants,
}


def cli_main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()

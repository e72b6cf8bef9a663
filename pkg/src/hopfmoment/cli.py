"""Command-line runner: ``hopfmoment {verify,poincare,focal,sample}``.

Exit codes are 0 (every case within bound), 1 (some case failed, or a table
mismatch) and 2 (usage error).
"""
from __future__ import annotations

import argparse
import csv
import difflib
import io
import re
import sys

from . import config
from .moment import Kind, LevelSet, orbit_sample, write_samples_csv
from .report import Report

SUITES = ("moment", "sasakian", "three-sasakian", "complex-structure", "curvature-conditions",
          "minimality", "metric-compare", "eta-einstein")
SPACES = {"sphere": Kind.SPHERE, "v2": Kind.MU0, "v4": Kind.NU0}

# allowed spaces (first is the default) and default n per suite
_SUITE_SPACES = {
    "moment": ("v2", "v4"),
    "sasakian": ("v2", "sphere", "v4"),
    "three-sasakian": ("v4", "sphere"),
    "complex-structure": ("v2", "v4"),
    "curvature-conditions": ("v2", "v4"),
    "minimality": ("v2",),
    "metric-compare": ("v2",),
    "eta-einstein": ("v2", "sphere"),
}
_DEFAULT_N = {"three-sasakian": 4, "metric-compare": 3, "moment": 3}
_SLOW = {"eta-einstein"}


def parse_range(text: str) -> list[int]:
    """``"3..8"``, ``"3-8"`` or ``"5"`` to a list of integers."""
    m = re.fullmatch(r"\s*(\d+)\s*(?:(?:\.\.|-)\s*(\d+))?\s*", text)
    if not m:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    lo = int(m.group(1))
    hi = int(m.group(2)) if m.group(2) else lo
    if hi < lo:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return list(range(lo, hi + 1))


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _eps(text: str) -> float:
    v = float(text)
    if not 0 < v < 1:
        raise argparse.ArgumentTypeError("eps must lie in (0, 1)")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hopfmoment", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--samples", type=_positive)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--no-timing", action="store_true", help="omit wall_time from JSON")

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=SUITES)
    v.add_argument("--n", type=int)
    v.add_argument("--space", choices=tuple(SPACES))
    v.add_argument("--eps", type=_eps)
    v.add_argument("--tol", type=float)
    v.add_argument("--grid", type=_positive, help="unused by verify; accepted for uniformity")
    v.add_argument("--slow", action="store_true", help="enable Ricci-based suites")

    pc = sub.add_parser("poincare", parents=[common], help="Poincare polynomials of mu^{-1}(0)")
    pc.add_argument("--n", "--range", dest="nrange", type=parse_range, default=parse_range("3..8"),
                    help="n values: 3..8, 3-8 or 5")
    pc.add_argument("--check-table", action="store_true")

    f = sub.add_parser("focal", parents=[common], help="focal points of CP^n in HP^n")
    f.add_argument("--n", type=int, default=1)
    f.add_argument("--grid", type=_positive, default=config.FOCAL_GRID)
    f.add_argument("--refine", type=float, default=config.FOCAL_REFINE_TOL)
    f.add_argument("--csv", dest="csv_path", help="write focal points here")

    s = sub.add_parser("sample", parents=[common], help="dump orbit samples as CSV")
    s.add_argument("--n", type=int)
    s.add_argument("--space", choices=("v2", "v4"), default="v2")
    s.add_argument("--csv", dest="csv_path", help="output file (default stdout)")
    return p


def _emit(rep: Report, fmt: str, timing: bool, out) -> None:
    if fmt == "json":
        out.write(rep.to_json(timing) + "\n")
    elif fmt == "text":
        out.write(rep.to_text() + "\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["suite", "space", "n", "case", "max_residual", "bound", "pass"])
        for c in rep.cases:
            w.writerow([rep.suite, rep.space, rep.n, c.name, repr(c.max_residual), repr(c.bound), c.passed])


def _check_n(parser, kind: Kind, n: int) -> None:
    if n < 1:
        parser.error("--n must be >= 1")
    if kind is Kind.NU0 and n < 3:
        parser.error("the v4 space needs --n >= 3")


def run_verify(args, parser) -> Report:
    from . import structures as S
    from . import suites

    allowed = _SUITE_SPACES[args.suite]
    space = args.space or allowed[0]
    if space not in allowed:
        parser.error(f"suite {args.suite} does not run on --space {space}")
    if args.suite in _SLOW and not args.slow:
        parser.error(f"suite {args.suite} is slow; pass --slow")
    n = args.n if args.n is not None else _DEFAULT_N.get(args.suite, 2)
    kind = SPACES[space]
    _check_n(parser, kind, n)
    L = LevelSet(kind, n)
    seed, samples, eps = args.seed, args.samples, args.eps

    def kw(default_samples, **extra):
        d = dict(samples=samples or default_samples, seed=seed)
        d.update({k: v for k, v in extra.items() if v is not None})
        return d

    if args.suite == "moment":
        kinds = (kind,) if args.space else None
        rep = suites.moment_verify(n, tol=args.tol or config.ORBIT_TOL, kinds=kinds, **kw(1000))
        if kind is Kind.MU0:
            split = suites.split_verify(n, **kw(1000))
            for c in split.cases:
                rep.add(f"split.{c.name}", c.max_residual, c.bound)
            rep.wall_time += split.wall_time
        return rep
    if args.suite == "sasakian":
        return S.sasaki_verify(L, **kw(5, eps=eps))
    if args.suite == "three-sasakian":
        return S.three_sasaki_verify(L, **kw(10, eps=eps))
    if args.suite == "complex-structure":
        return S.complex_structure_verify(L, **kw(20, eps_list=(eps,) if eps else None))
    if args.suite == "curvature-conditions":
        return S.curvature_conditions(L, **kw(5, eps=eps))
    if args.suite == "minimality":
        return suites.minimality_verify(n, **kw(20, eps=eps or config.CURVATURE_EPS))
    if args.suite == "metric-compare":
        return suites.metric_compare_verify(n, **kw(20))
    return S.eta_einstein_report(L, **kw(5, eps=eps or config.RICCI_EPS))


def table_text(ns: list[int]) -> str:
    from .cohomfam import poincare_mu0
    return "\n".join(f"n={n} | {poincare_mu0(n)}" for n in ns)


def run_poincare(args, parser, out) -> int:
    from .cohomfam import MU0_TABLE, poincare_mu0
    from .suites import poincare_report

    ns = args.nrange
    if min(ns) < 2:
        parser.error("Poincare polynomials of mu^{-1}(0) need n >= 2")
    rep = poincare_report(ns, check_table=args.check_table)
    if args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["n", "polynomial"])
        for n in ns:
            w.writerow([n, str(poincare_mu0(n))])
    elif args.format == "text":
        out.write(table_text(ns) + "\n")
    else:
        _emit(rep, "json", not args.no_timing, out)
    if args.check_table:
        ref = "\n".join(f"n={n} | {MU0_TABLE[n]}" for n in MU0_TABLE)
        got = table_text(sorted(MU0_TABLE))
        if ref != got:
            sys.stderr.writelines(difflib.unified_diff(ref.splitlines(True), got.splitlines(True),
                                                       "reference", "computed"))
            return 1
    return 0 if rep.passed else 1


def run_focal(args, parser, out) -> int:
    from .suites import focal_verify

    n = args.n
    if n < 1:
        parser.error("--n must be >= 1")
    rep, rows = focal_verify(n, grid=args.grid, samples=args.samples or 1, seed=args.seed, refine=args.refine)
    if args.csv_path or args.format == "csv":
        buf = io.StringIO()
        head = ["sample", "t"] + [f"x{k}" for k in range(4 * (n + 1))] + ["abs_mu"]
        w = csv.DictWriter(buf, fieldnames=head, lineterminator="\n")
        w.writeheader()
        w.writerows(rows)
        if args.csv_path:
            with open(args.csv_path, "w", newline="") as fh:
                fh.write(buf.getvalue())
        if args.format == "csv":
            out.write(buf.getvalue())
    if args.format != "csv":
        _emit(rep, args.format, not args.no_timing, out)
    return 0 if rep.passed else 1


def run_sample(args, parser, out) -> int:
    kind = SPACES[args.space]
    n = 2 if args.n is None else args.n
    if kind is Kind.NU0 and args.n is None:
        n = 3
    _check_n(parser, kind, n)
    L = LevelSet(kind, n)
    pts = [orbit_sample(L, seed=args.seed + k) for k in range(args.samples or 10)]
    if args.csv_path:
        write_samples_csv(args.csv_path, L, pts)
    else:
        write_samples_csv(out, L, pts)
    return 0


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify":
        rep = run_verify(args, parser)
        _emit(rep, args.format, not args.no_timing, out)
        return 0 if rep.passed else 1
    if args.command == "poincare":
        return run_poincare(args, parser, out)
    if args.command == "focal":
        return run_focal(args, parser, out)
    return run_sample(args, parser, out)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: function I/O, experiments, property suites,
schedule inspection.

Exit codes: 0 success, 1 property-suite failure, 2 parse/usage error,
3 geometry failure (grid reflection escapes the array), 4 invariant
violation during a convergence run.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor

from . import analysis, generators, grid2d, lattice, step1d
from .errors import ParseError
from .grid2d import Axis, GridFitError, HyperplaneKind, LatticeHyperplane
from .halfspace import Halfspace, Schedule
from .lattice import site_of_rank

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_GEOMETRY = 3
EXIT_INVARIANT = 4

ENGINES = ("step1d", "lattice", "grid2d")


def _sniff_engine(path: str) -> str:
    """Infer the engine from the file's first line."""
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline().strip()
    if first == step1d.CSV_HEADER:
        return "step1d"
    if first == lattice.CSV_HEADER:
        return "lattice"
    parts = first.split(",")
    if len(parts) == 2:
        try:
            int(parts[0])
            float(parts[1])
            return "grid2d"
        except ValueError:
            pass
    raise ParseError(f"cannot infer engine from header {first!r}")


_IO = {
    "step1d": (step1d.read_csv, step1d.write_csv),
    "lattice": (lattice.read_csv, lattice.write_csv),
    "grid2d": (grid2d.read_csv, grid2d.write_csv),
}


def _load(args):
    engine = args.engine or _sniff_engine(args.input)
    reader, _ = _IO[engine]
    return engine, reader(args.input)


def _write(engine, obj, path):
    _IO[engine][1](obj, path)


def _parse_geometry(engine: str, text: str):
    if engine == "step1d":
        return Halfspace.parse(text, dimension=1)
    if engine == "grid2d":
        return LatticeHyperplane.parse(text)
    fields = dict(part.split("=", 1) for part in text.strip().split(","))
    try:
        return int(fields["c"])
    except (KeyError, ValueError) as exc:
        raise ParseError(f"bad involution encoding {text!r} (want c=<int>)") from exc


def cmd_polarize(args) -> int:
    engine, u = _load(args)
    geom = _parse_geometry(engine, args.by)
    if engine == "step1d":
        out = step1d.polarize(u, geom)
    elif engine == "lattice":
        out = lattice.polarize_involution(u, geom)
    else:
        out = grid2d.polarize_grid_exact(u, geom)
    _write(engine, out, args.output)
    return EXIT_OK


def cmd_rearrange(args) -> int:
    engine, u = _load(args)
    out = {"step1d": step1d.rearrange,
           "lattice": lattice.rearrange_lattice,
           "grid2d": grid2d.rearrange_grid}[engine](u)
    _write(engine, out, args.output)
    return EXIT_OK


def cmd_converge(args) -> int:
    engine, u = _load(args)
    weight = analysis.RadialWeight.parse(args.weight)
    if engine == "step1d":
        schedule = Schedule(dimension=1, rho=args.rho)
        series = analysis.converge_scheme(
            u, schedule, n_max=args.n_max, p=args.p, weight=weight,
            eps=args.eps, order=args.order)
    elif engine == "lattice":
        centers = [site_of_rank(r) for r in range(args.n_max)]
        series = lattice.schedule_scheme_lattice(
            u, centers, n_max=args.n_max, p=args.p, eps=args.eps)
    else:
        steps = [Axis.X, Axis.Y,
                 LatticeHyperplane(HyperplaneKind.DIAG_UP, 0),
                 LatticeHyperplane(HyperplaneKind.DIAG_DOWN, 0)]
        series = grid2d.mixed_schedule(u, steps, n_max=args.n_max,
                                       p=args.p, eps=args.eps)
    series.write_csv(args.output)
    return EXIT_OK


# -- property suites -------------------------------------------------------


def _case_cavalieri(rng):
    u = generators.random_step_function(rng)
    for p in (1.0, 2.0, 3.0):
        if analysis.cavalieri_gap(u, p) >= 1e-12:
            return f"cavalieri gap at p={p}:\n{step1d.dumps(u)}"
    return None


def _case_hardy_littlewood(rng):
    u = generators.random_step_function(rng)
    v = generators.random_step_function(rng)
    if analysis.hardy_littlewood_gap(u, v) < -1e-12:
        return f"hardy-littlewood gap negative:\n{step1d.dumps(u)}{step1d.dumps(v)}"
    return None


def _case_contraction(rng):
    u = generators.random_step_function(rng)
    v = generators.random_step_function(rng)
    for p in (1.0, 2.0, 3.0):
        if analysis.contraction_gap(u, v, p) < -1e-12:
            return f"contraction gap negative at p={p}:\n{step1d.dumps(u)}{step1d.dumps(v)}"
    return None


def _case_polarization(rng):
    u = generators.random_step_function(rng)
    h = generators.random_halfspace_1d(rng)
    w = analysis.RadialWeight.gaussian()
    if analysis.polarization_gap(u, h, w) < -1e-12:
        return f"polarization gap negative for {h.encode()}:\n{step1d.dumps(u)}"
    return None


def _case_lattice_fixed_point(rng):
    u = generators.random_lattice_function(rng)
    fixed, _ = lattice.two_involution_scheme(u)
    if fixed != lattice.rearrange_lattice(u):
        return f"fixed point differs from rearrangement:\n{lattice.dumps(u)}"
    return None


SUITES = {
    "cavalieri": _case_cavalieri,
    "hardy-littlewood": _case_hardy_littlewood,
    "contraction": _case_contraction,
    "polarization": _case_polarization,
    "lattice-fixed-point": _case_lattice_fixed_point,
}


def _run_suite(name, cases, seed, workers):
    """Per-case seeds are seed + index, so results are order-independent."""
    check = SUITES[name]

    def one(i):
        return check(random.Random(seed + i))

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(one, range(cases)))
    else:
        results = [one(i) for i in range(cases)]
    return [(i, r) for i, r in enumerate(results) if r is not None]


def cmd_check(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    workers = max(1, int(os.environ.get("REARRANGE_LAB_THREADS", "1")))
    failed = False
    for name in names:
        failures = _run_suite(name, args.cases, args.seed, workers)
        status = "pass" if not failures else f"FAIL ({len(failures)} cases)"
        print(f"{name}: {args.cases} cases, {status}")
        for i, report in failures[:10]:
            print(f"  case {i} (seed {args.seed + i}): {report}")
        failed = failed or bool(failures)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_schedule(args) -> int:
    if args.count < 1:
        raise ParseError("count must be >= 1")
    schedule = Schedule(dimension=args.dim, rho=args.rho)
    for n in range(1, args.count + 1):
        print(schedule.nth(n).encode())
    return EXIT_OK


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="rearrange-lab",
        description="Polarization and symmetric-rearrangement experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def io_flags(p, output=True):
        p.add_argument("--input", required=True, help="input function CSV")
        if output:
            p.add_argument("--output", required=True, help="output CSV path")
        p.add_argument("--engine", choices=ENGINES,
                       help="override header-based engine inference")

    p = sub.add_parser("polarize", help="polarize a function across a "
                       "halfspace (step1d), involution (lattice), or "
                       "lattice hyperplane (grid2d)")
    io_flags(p)
    p.add_argument("--by", required=True,
                   help="nu=..,d=.. | c=.. | dir=X,s=..")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("rearrange", help="symmetric decreasing rearrangement")
    io_flags(p)
    p.set_defaults(func=cmd_rearrange)

    p = sub.add_parser("converge", help="run the triangular iterated-"
                       "polarization scheme and write the series CSV")
    io_flags(p)
    p.add_argument("--p", type=float, default=1.0)
    p.add_argument("--rho", type=float, default=1.0,
                   help="schedule offset bound")
    p.add_argument("--n-max", type=int, default=60)
    p.add_argument("--eps", type=float, default=0.01,
                   help="level for the deviation-measure column")
    p.add_argument("--weight", default="triangular:16",
                   help="gaussian | triangular:R")
    p.add_argument("--order", choices=("forward", "reversed"),
                   default="forward")
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("check", help="run a seeded property suite")
    p.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    p.add_argument("--cases", type=int, default=1000)
    p.add_argument("--seed", type=int, default=42)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("schedule", help="print a schedule prefix")
    p.add_argument("--dim", type=int, choices=(1, 2), default=1)
    p.add_argument("--rho", type=float, default=1.0)
    p.add_argument("--count", type=int, required=True)
    p.set_defaults(func=cmd_schedule)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (ParseError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except GridFitError as exc:
        print(f"geometry error: {exc}", file=sys.stderr)
        return EXIT_GEOMETRY
    except analysis.InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

::

    subfn bernstein-eval --alpha 0.5 --lambda 4
    subfn density --alpha 0.5 --t 1 --s 0.5 1 2
    subfn subordinate --semigroup heat1d --alpha 0.5 --t 1 --input cos.csv
    subfn f-of-a --semigroup matrix --matrix A.csv --input x.csv --alpha 0.5
    subfn resolvent --semigroup matrix --matrix A.csv --input x.csv --lambda 2
    subfn verify --suite fast

Exit status: 0 success, 1 verification failure, 2 usage error,
3 parse or validation error, 4 convergence failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from . import acceptance
from .bernstein import evaluate, stable_triplet, triplet_from_json
from .calculus import (SubordinatedSemigroup, SubordinationPlan, f_of_A_apply,
                       resolvent_apply, subordinate_apply)
from .errors import ConvergenceError, ParseError, SubfnError
from .quadrature import QuadratureConfig
from .semigroup import (HeatSemigroup, MatrixSemigroup, read_matrix_csv,
                        read_state_csv, write_state_csv)
from .subordinator import (ContourConfig, DriftKilling, KilledStable, Stable,
                           stable_density_contour)

EXIT_VERIFY, EXIT_USAGE, EXIT_INPUT, EXIT_CONVERGENCE = 1, 2, 3, 4


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w", newline="") as fh:
            fh.write(text)


def _table(header, rows):
    buf = io.StringIO()
    buf.write(header + "\n")
    for row in rows:
        buf.write(",".join(f"{v:.17g}" for v in row) + "\n")
    return buf.getvalue()


def _read_column(path, name):
    with open(path) as fh:
        rows = [r for r in csv.reader(fh) if r]
    if not rows:
        raise ParseError(f"{path} is empty")
    header = [c.strip() for c in rows[0]]
    if name not in header:
        raise ParseError(f"{path} has no column {name!r}")
    k = header.index(name)
    try:
        return np.array([float(r[k]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad row in {path}: {exc}") from exc


def _triplet(args):
    if args.triplet is not None:
        with open(args.triplet) as fh:
            return triplet_from_json(fh.read())
    return _family(args).bernstein()


def _family(args):
    if args.alpha is not None:
        if args.drift:
            raise ParseError("--drift cannot be combined with --alpha")
        return KilledStable(args.killing, args.alpha) if args.killing else Stable(args.alpha)
    if args.drift or args.killing:
        return DriftKilling(args.killing, args.drift)
    raise ParseError("give --alpha, or --drift/--killing")


def _quadrature(args):
    return QuadratureConfig(panels=args.panels, nodes_per_panel=args.nodes)


def _contour(args):
    return ContourConfig(theta=args.theta, r_factor=args.r_factor,
                         panels=args.contour_panels, nodes=args.contour_nodes)


def _semigroup_and_state(args):
    if args.semigroup == "matrix":
        if args.matrix is None:
            raise ParseError("--semigroup matrix needs --matrix")
        T = MatrixSemigroup(read_matrix_csv(args.matrix))
        x = read_state_csv(args.input)
        if x.kind != "finite":
            raise ParseError("matrix semigroups act on 'i,value' vectors")
        return T, x
    T = HeatSemigroup(1 if args.semigroup == "heat1d" else 2)
    x = read_state_csv(args.input, extension=args.extension)
    expected = "grid1d" if args.semigroup == "heat1d" else "grid2d"
    if x.kind != expected:
        raise ParseError(f"--semigroup {args.semigroup} needs a {expected} input file")
    return T, x


def _plan(args):
    return SubordinationPlan(_family(args), eps_tail=args.eps_tail,
                             n_atoms=args.atoms, contour=_contour(args))


def cmd_bernstein_eval(args):
    f = _triplet(args)
    lam = np.asarray(args.lam, float)
    values = evaluate(f, lam, _quadrature(args))
    _emit(_table("lambda,f_lambda", zip(lam, np.atleast_1d(values))), args.output)
    return 0


def cmd_density(args):
    if args.grid is not None:
        s = _read_column(args.grid, "s")
    elif args.s:
        s = np.asarray(args.s, float)
    else:
        raise ParseError("give --s values or --grid")
    g = stable_density_contour(args.alpha, args.t, s, _contour(args))
    _emit(_table("s,g", zip(s, np.atleast_1d(g))), args.output)
    return 0


def cmd_subordinate(args):
    T, x = _semigroup_and_state(args)
    y = subordinate_apply(T, _plan(args), args.t, x)
    _emit(write_state_csv(y), args.output)
    return 0


def cmd_f_of_a(args):
    T, x = _semigroup_and_state(args)
    y = f_of_A_apply(T, _triplet(args), x, _quadrature(args))
    _emit(write_state_csv(y), args.output)
    return 0


def cmd_resolvent(args):
    T, x = _semigroup_and_state(args)
    if args.alpha is not None or args.drift or args.killing:
        T = SubordinatedSemigroup(T, _plan(args))
    y = resolvent_apply(T, args.lam, x, _quadrature(args))
    _emit(write_state_csv(y), args.output)
    return 0


def cmd_verify(args):
    results = acceptance.run_suite(args.suite)
    print(acceptance.format_table(results))
    return 0 if all(r.passed for r in results) else EXIT_VERIFY


def _add_quadrature(p):
    q = QuadratureConfig()
    p.add_argument("--panels", type=int, default=q.panels,
                   help="Gauss-Legendre panels per segment (default %(default)s)")
    p.add_argument("--nodes", type=int, default=q.nodes_per_panel,
                   help="nodes per panel (default %(default)s)")


def _add_contour(p):
    c = ContourConfig()
    p.add_argument("--theta", type=float, default=None,
                   help="contour angle in (pi/2, pi); default depends on alpha")
    p.add_argument("--r-factor", type=float, default=c.r_factor)
    p.add_argument("--contour-panels", type=int, default=c.panels)
    p.add_argument("--contour-nodes", type=int, default=c.nodes)


def _add_family(p, triplet=False):
    p.add_argument("--alpha", type=float, help="stable index in (0, 1)")
    p.add_argument("--killing", type=float, default=0.0, help="killing rate a")
    p.add_argument("--drift", type=float, default=0.0, help="drift b (without --alpha)")
    if triplet:
        p.add_argument("--triplet", help="JSON file with a Levy triplet")


def _add_state(p):
    p.add_argument("--semigroup", required=True, choices=("matrix", "heat1d", "heat2d"))
    p.add_argument("--matrix", help="CSV matrix A with T_t = exp(-t A)")
    p.add_argument("--input", required=True, help="state CSV")
    p.add_argument("--extension", default="periodic",
                   choices=("periodic", "constant_edge"),
                   help="boundary extension for grid inputs (default periodic)")
    p.add_argument("--output", help="output CSV (default stdout)")


def _add_plan(p):
    p.add_argument("--eps-tail", type=float, default=1e-10)
    p.add_argument("--atoms", type=int, default=2000)
    _add_contour(p)


def build_parser():
    parser = argparse.ArgumentParser(prog="subfn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bernstein-eval", help="evaluate f(lambda)")
    _add_family(p, triplet=True)
    p.add_argument("--lambda", dest="lam", type=float, nargs="+", required=True)
    p.add_argument("--output")
    _add_quadrature(p)
    p.set_defaults(func=cmd_bernstein_eval)

    p = sub.add_parser("density", help="tabulate the stable density g_t(s)")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--s", type=float, nargs="+")
    p.add_argument("--grid", help="CSV file with an 's' column")
    p.add_argument("--output")
    _add_contour(p)
    p.set_defaults(func=cmd_density)

    p = sub.add_parser("subordinate", help="apply S_t to a state")
    _add_state(p)
    _add_family(p)
    p.add_argument("--t", type=float, required=True)
    _add_plan(p)
    p.set_defaults(func=cmd_subordinate)

    p = sub.add_parser("f-of-a", help="apply f(A) to a state")
    _add_state(p)
    _add_family(p, triplet=True)
    _add_quadrature(p)
    p.set_defaults(func=cmd_f_of_a)

    p = sub.add_parser("resolvent", help="apply (lambda + A)^-1, or that of S with a family")
    _add_state(p)
    _add_family(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    _add_quadrature(p)
    _add_plan(p)
    p.set_defaults(func=cmd_resolvent)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--suite", choices=("fast", "full"), default="full")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else 0
    try:
        return args.func(args)
    except ConvergenceError as exc:
        print(f"subfn: convergence failure: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (SubfnError, ValueError, OSError) as exc:
        print(f"subfn: {exc}", file=sys.stderr)
        return EXIT_INPUT


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()

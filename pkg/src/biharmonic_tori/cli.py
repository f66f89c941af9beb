"""Command-line front end.

Exit status: 0 on success, 1 when a datum fails validation or verification,
2 on usage or domain errors.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import sys
from fractions import Fraction
from typing import IO, Iterator, Sequence

from . import __version__
from .errors import DomainError
from .evaluator import Tolerances, verify, write_sample_csv
from .exactnum import format_rational, parse_rational
from .lattices import Lattice2, period_lattice, s5_lattice, s5_lattice_rho0
from .moduli import (
    enumerate_square,
    rect_data,
    rect_feasible,
    s5_exact_data,
    s5_exists,
    square_data,
    square_feasible,
)
from .numtheory import r2, two_square_reps
from .spectral import ImmersionData, s5_family, validate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 here as well
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return value


def _int_pair(text: str) -> tuple[int, int]:
    try:
        a, b = (int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two integers 'a,b', got {text!r}") from None
    return a, b


@contextlib.contextmanager
def _output(path: str | None) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _read_data(path: str) -> ImmersionData:
    try:
        text = sys.stdin.read() if path == "-" else open(path).read()
    except OSError as exc:
        raise DomainError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return ImmersionData.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"{path}: invalid JSON ({exc.msg})") from None


def _emit(args, obj, text: str) -> None:
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(json.dumps(obj, indent=2) + "\n")
        else:
            fh.write(text.rstrip("\n") + "\n")


def _table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


# ---------------------------------------------------------------- commands


def _cmd_construct(args) -> int:
    if args.family == "s5":
        if args.a is not None or args.b is not None:
            if args.a is None or args.b is None:
                raise DomainError("--a and --b go together")
            data = s5_exact_data(args.a, args.b) if args.a != 0 else s5_family((1 - args.b) / (1 + args.b), 0.0)
        else:
            if args.h is None:
                raise DomainError("give --h (and --rho) or --a and --b")
            data = s5_family(args.h, args.rho)
    elif args.family == "rect":
        data = rect_data(args.q1, args.q2, args.n, args.omega)
    else:
        data = square_data(args.S, args.n, split=args.split, part_b=args.pq)
    with _output(args.out) as fh:
        fh.write(data.dumps(indent=2) + "\n")
    return EXIT_OK


def _cmd_check(args) -> int:
    data = _read_data(args.file)
    report = validate(data, tol=args.tol_exact)
    if args.format == "json":
        print(json.dumps(report.to_json(), indent=2), file=sys.stderr)
    else:
        print(report, file=sys.stderr)
    if not report.passed:
        return EXIT_FAIL
    with _output(args.out) as fh:
        fh.write(data.dumps(indent=2) + "\n")
    return EXIT_OK


def _cmd_verify(args) -> int:
    data = _read_data(args.file)
    tol = Tolerances(closed_form=args.tol_exact, eigen=min(args.tol_exact, 1e-13), bitension=args.tol_fd)
    if args.grid < 2:
        raise DomainError("--grid must be at least 2")
    report = verify(data, grid_n=args.grid, fd_step=args.fd_step, tolerances=tol, richardson=args.richardson)
    _emit(args, report.to_json(), str(report))
    return EXIT_OK if report.passed else EXIT_FAIL


def _lattice_json(lat: Lattice2) -> dict:
    return {"generators": [list(map(float, lat.matrix()[i])) for i in range(lat.rank)], "exact": lat.describe()}


def _cmd_lattice(args) -> int:
    if args.kind == "s5":
        if args.a is None or args.a == 0:
            lat = s5_lattice_rho0(args.b)
            obj = {"case": "rho_zero", **_lattice_json(lat), "covolume": lat.covolume()}
            text = "rho = 0\n" + "\n".join("  " + g for g in lat.describe()) + f"\ncovolume {lat.covolume():.12g}"
        else:
            res = s5_lattice(args.a, args.b)
            obj = {
                "case": "generic",
                "v1": str(res.v1),
                "v2": str(res.v2),
                "alpha": format_rational(res.alpha),
                "beta": format_rational(res.beta),
                "int_basis": res.int_basis,
                **_lattice_json(res.basis),
                "covolume": res.basis.covolume(),
                "dual_agrees": res.basis.same_as(res.dual_basis),
            }
            text = "\n".join(
                [
                    f"v1 = {res.v1}",
                    f"v2 = {res.v2}",
                    f"n*({format_rational(res.alpha)}) + m*({format_rational(res.beta)}) in Z",
                    f"basis (n, m): {res.int_basis}",
                    *("  " + g for g in res.basis.describe()),
                    f"covolume {res.basis.covolume():.12g}",
                ]
            )
    else:
        lat = period_lattice(_read_data(args.file))
        if lat is None:
            obj, text = {"rank": "<2"}, "period lattice has rank < 2"
        else:
            obj = {**_lattice_json(lat), "covolume": lat.covolume()}
            text = "\n".join(lat.describe()) + f"\ncovolume {lat.covolume():.12g}"
    _emit(args, obj, text)
    return EXIT_OK


def _cmd_feasible(args) -> int:
    if args.kind == "rect":
        res = rect_feasible(args.theta2)
        rows = [(r.q1, r.q2, format_rational(r.h), ",".join(map(str, r.admissible_n))) for r in res.reps]
        text = _table(("q1", "q2", "h", "n"), rows) if rows else "infeasible"
        _emit(args, res.to_json(), text)
    elif args.kind == "square":
        res = square_feasible(args.S)
        rows = [(s.s1, s.s2, f"({s.p1},{s.q1})", f"({s.p2},{s.q2})", format_rational(s.h), s.n_max) for s in res.splits]
        parts = [_table(("s1", "s2", "(p1,q1)", "(p2,q2)", "h", "n_max"), rows) if rows else "no splits"]
        for b in res.part_b:
            parts.append(f"p={b.p} q={b.q} h={format_rational(b.h)} n in [{b.n_min}, {b.n_max}]")
        parts.append("dimensions: " + (" ".join(map(str, res.dimensions())) or "none"))
        _emit(args, res.to_json(), "\n".join(parts))
    else:
        res = s5_exists(args.h, args.bound)
        cert = res.certificate
        text = res.status if cert is None else (
            f"{res.status}: case={cert.case} a={format_rational(cert.a)} b={format_rational(cert.b)}"
        )
        _emit(args, res.to_json(), text)
    return EXIT_OK


def _cmd_enumerate(args) -> int:
    table = enumerate_square(args.max_S)
    rows = [(r.S, len(r.splits), len(r.part_b), r.n_max, " ".join(map(str, r.dimensions()))) for r in table.rows]
    text = _table(("S", "splits", "part_b", "n_max", "dimensions"), rows)
    text += "\n\nleast S per n: " + " ".join(f"{n}:{S}" for n, S in sorted(table.witnesses.items()))
    _emit(args, table.to_json(), text)
    return EXIT_OK


def _cmd_sample(args) -> int:
    data = _read_data(args.file)
    with _output(args.out) as fh:
        write_sample_csv(data, args.nx, args.ny, fh)
    return EXIT_OK


def _cmd_r2(args) -> int:
    value = r2(args.n)
    _emit(args, {"n": args.n, "r2": value}, str(value))
    return EXIT_OK


def _cmd_reps(args) -> int:
    reps = two_square_reps(args.n)
    _emit(args, [[r.L, r.M] for r in reps], "\n".join(f"{r.L} {r.M}" for r in reps))
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--out", help="output path (default stdout)")

    parser = _Parser(prog="biharmonic-tori", description="CMC proper-biharmonic flat tori in odd spheres")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("construct", help="emit an exact datum as JSON")
    fam = p.add_subparsers(dest="family", required=True, parser_class=_Parser)
    q = fam.add_parser("s5", parents=[common])
    q.add_argument("--h", type=_rational)
    q.add_argument("--rho", type=float, default=0.0)
    q.add_argument("--a", type=_rational)
    q.add_argument("--b", type=_rational)
    q = fam.add_parser("rect", parents=[common])
    q.add_argument("--q1", type=int, required=True)
    q.add_argument("--q2", type=int, required=True)
    q.add_argument("--n", type=int, required=True, choices=(5, 7))
    q.add_argument("--omega", type=float)
    q = fam.add_parser("square", parents=[common])
    q.add_argument("--S", type=int, required=True)
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--split", type=_int_pair, help="s1,s2 for n = 3 mod 4")
    q.add_argument("--pq", type=_int_pair, help="p,q for n = 1 mod 4")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("check-data", parents=[common], help="validate the algebraic conditions")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--tol-exact", type=_positive_float, default=1e-12)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("verify", parents=[common], help="geometric residuals over a grid")
    p.add_argument("file", nargs="?", default="-")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--fd-step", type=_positive_float, default=1e-4)
    p.add_argument("--tol-exact", type=_positive_float, default=1e-12)
    p.add_argument("--tol-fd", type=_positive_float, default=1e-5)
    p.add_argument("--richardson", action="store_true", help="also report the half-step ratio")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("lattice", help="period lattices")
    kind = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    q = kind.add_parser("s5", parents=[common])
    q.add_argument("--a", type=_rational)
    q.add_argument("--b", type=_rational, required=True)
    q = kind.add_parser("data", parents=[common])
    q.add_argument("file", nargs="?", default="-")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("feasible", help="feasibility deciders")
    kind = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    q = kind.add_parser("rect", parents=[common])
    q.add_argument("--theta2", type=_rational, required=True)
    q = kind.add_parser("square", parents=[common])
    q.add_argument("--S", type=int, required=True)
    q = kind.add_parser("s5", parents=[common])
    q.add_argument("--h", type=_rational, required=True)
    q.add_argument("--bound", type=int, default=50)
    p.set_defaults(func=_cmd_feasible)

    p = sub.add_parser("enumerate", parents=[common], help="square-torus table")
    p.add_argument("--max-S", dest="max_S", type=int, required=True)
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("sample", parents=[common], help="CSV samples for plotting")
    p.add_argument("file")
    p.add_argument("--nx", type=int, default=32)
    p.add_argument("--ny", type=int, default=32)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("r2", parents=[common], help="number of two-square representations")
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_r2)

    p = sub.add_parser("reps", parents=[common], help="list two-square representations")
    p.add_argument("n", type=int)
    p.set_defaults(func=_cmd_reps)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (DomainError, ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())

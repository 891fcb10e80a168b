"""Command-line front end.

Data goes to stdout (or --out), diagnostics to stderr.  Exit codes: 0 success,
1 usage error, 2 invalid modulus, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager
from typing import Iterable, Iterator

from . import expsum, moment, toric
from .chars import Character
from .errors import (
    NotPrime,
    PoleError,
    QuadratureFailure,
    TooSmall,
    ToroidalError,
)
from .field import build_ctx, is_prime
from .lfun import l_central_all
from .torus import TorusMatrix

EXIT_OK, EXIT_USAGE, EXIT_MODULUS, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _primes_between(lo: int, hi: int) -> list[int]:
    if lo < 3 or hi < lo:
        raise UsageError("need 3 <= qmin <= qmax")
    return [p for p in range(lo, hi + 1) if is_prime(p)]


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            yield fh


def _emit(rows: Iterable[dict], fields, cfg):
    with _output(cfg.out) as fh:
        if cfg.format == "json":
            moment.write_json(rows, fh)
        else:
            moment.write_csv(rows, fh, fields)


def _row(rep, cfg) -> dict:
    row = moment.report_row(rep)
    if cfg.no_timings:
        row["seconds"] = 0.0
    return row


def cmd_moment(cfg) -> int:
    ctx = build_ctx(cfg.q)
    if cfg.method == "afe":
        rep = moment.afe_moment(ctx, cfg.a, cfg.b, cfg.X)
    else:
        rep = moment.moment_exact(ctx, cfg.a, cfg.b)
    _emit([_row(rep, cfg)], moment.CSV_FIELDS, cfg)
    return EXIT_OK


def _sweep_rows(cfg) -> Iterator[dict]:
    qs = _primes_between(cfg.qmin, cfg.qmax)
    print(f"sweep: {len(qs)} primes, {cfg.workers} worker(s)", file=sys.stderr)
    for rep in moment.sweep_iter(cfg.a, cfg.b, qs, cfg.workers, cfg.method, cfg.X):
        yield _row(rep, cfg)


def cmd_sweep(cfg) -> int:
    if cfg.format == "json":
        _emit(list(_sweep_rows(cfg)), moment.CSV_FIELDS, cfg)
    else:
        with _output(cfg.out) as fh:
            moment.write_csv(_sweep_rows(cfg), fh)
            fh.flush()
    return EXIT_OK


EXPSUM_FIELDS = ("q", "a", "b", "u", "re", "im", "abs", "closed_form")


def cmd_expsum(cfg) -> int:
    ctx = build_ctx(cfg.q)
    if cfg.all:
        us = range(1, cfg.q)
        table = expsum.t_tilde_all(ctx, cfg.a, cfg.b)
        values = {u: complex(table[u]) for u in us}
    elif cfg.u is not None:
        us = [cfg.u]
        values = {cfg.u: expsum.t_tilde(ctx, cfg.a, cfg.b, cfg.u)}
    else:
        raise UsageError("expsum needs --u or --all")
    rows = []
    for u in us:
        v = values[u]
        closed = expsum.closed_form_balanced(ctx, cfg.a, u) if cfg.a + cfg.b == 0 else float("nan")
        rows.append({"q": cfg.q, "a": cfg.a, "b": cfg.b, "u": u, "re": v.real, "im": v.imag,
                     "abs": abs(v), "closed_form": closed})
    _emit(rows, EXPSUM_FIELDS, cfg)
    return EXIT_OK


MEANSQUARE_FIELDS = ("q", "matrix", "mean_square", "predicted", "rank", "subgroup_order")


def cmd_meansquare(cfg) -> int:
    ctx = build_ctx(cfg.q)
    A = TorusMatrix.parse(cfg.matrix)
    row = {"q": cfg.q, "matrix": cfg.matrix,
           "mean_square": expsum.mean_square(ctx, A),
           "predicted": expsum.mean_square_predicted(ctx, A),
           "rank": A.rank, "subgroup_order": len(toric.subgroup_exponents(ctx, A))}
    _emit([row], MEANSQUARE_FIELDS, cfg)
    return EXIT_OK


COUNT_FIELDS = ("q", "matrix", "box", "u", "count", "normalized", "method")


def cmd_count(cfg) -> int:
    ctx = build_ctx(cfg.q)
    A = TorusMatrix.parse(cfg.matrix)
    B = toric.IntBox.parse(cfg.box)
    u = _int_list(cfg.u) if cfg.u else [1] * A.k
    res = toric.count_brute(ctx, A, u, B)
    row = {"q": cfg.q, "matrix": cfg.matrix, "box": cfg.box, "u": ",".join(map(str, u)),
           "count": res.count, "normalized": res.normalized, "method": res.method}
    _emit([row], COUNT_FIELDS, cfg)
    return EXIT_OK


ROOTTWIST_FIELDS = ("q", "f", "rho", "re", "im", "abs")


def cmd_roottwist(cfg) -> int:
    f = _int_list(cfg.f)
    if cfg.q is not None:
        qs = [cfg.q]
    elif cfg.qmin is not None and cfg.qmax is not None:
        qs = _primes_between(cfg.qmin, cfg.qmax)
    else:
        raise UsageError("roottwist needs --q or --qmin/--qmax")
    rows = []
    for q in qs:
        ctx = build_ctx(q)
        rho = moment.smallest_root(ctx, f)
        val = moment.root_twist(ctx, f)
        nan = float("nan")
        rows.append({"q": q, "f": cfg.f, "rho": "" if rho is None else rho,
                     "re": nan if val is None else val.real,
                     "im": nan if val is None else val.imag,
                     "abs": nan if val is None else abs(val)})
    _emit(rows, ROOTTWIST_FIELDS, cfg)
    return EXIT_OK


LVALUE_FIELDS = ("q", "j", "parity", "re", "im", "abs")


def cmd_lvalue(cfg) -> int:
    ctx = build_ctx(cfg.q)
    table = l_central_all(ctx)
    if cfg.all:
        js = range(ctx.n)
    elif cfg.j is not None:
        js = [cfg.j % ctx.n]
    else:
        raise UsageError("lvalue needs --j or --all")
    rows = []
    for j in js:
        v = complex(table[j])
        rows.append({"q": cfg.q, "j": j, "parity": Character(ctx, j).parity,
                     "re": v.real, "im": v.imag, "abs": abs(v)})
    _emit(rows, LVALUE_FIELDS, cfg)
    return EXIT_OK


def _default_workers() -> int:
    try:
        return max(1, int(os.environ.get("TML_WORKERS", "1")))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--workers", type=int, default=_default_workers())
    common.add_argument("--seed", type=int, default=0, help="seed for randomised corpora")
    common.add_argument("--no-timings", action="store_true",
                        help="write 0 in the seconds column so repeated runs are byte-identical")

    p = _Parser(prog="toroidal", description="Toroidal moments, torus exponential sums and toric counts.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("moment", parents=[common], help="second moment at one prime")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--method", choices=("exact", "afe"), default="exact")
    s.add_argument("--X", type=float, default=None, help="AFE length (default q)")
    s.set_defaults(func=cmd_moment)

    s = sub.add_parser("sweep", parents=[common], help="moments over the primes of a range")
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--qmin", type=int, required=True)
    s.add_argument("--qmax", type=int, required=True)
    s.add_argument("--method", choices=("exact", "afe"), default="exact")
    s.add_argument("--X", type=float, default=None)
    s.set_defaults(func=cmd_sweep)

    s = sub.add_parser("expsum", parents=[common], help="normalised sums T~_{a,b}(u)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--a", type=int, required=True)
    s.add_argument("--b", type=int, required=True)
    s.add_argument("--u", type=int, default=None)
    s.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_expsum)

    s = sub.add_parser("meansquare", parents=[common], help="mean square of T_A over F_q^k")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--matrix", required=True, help='rows split by ";", entries by ","')
    s.set_defaults(func=cmd_meansquare)

    s = sub.add_parser("count", parents=[common], help="points of a box in a coset of H_A")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--matrix", required=True)
    s.add_argument("--box", required=True, help='"lo..hi,lo..hi,..."')
    s.add_argument("--u", default=None, help="coset representative, comma separated")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("roottwist", parents=[common], help="twisted moment at a root of f")
    s.add_argument("--f", default="1,0,1", help="coefficients, leading first (default x^2+1)")
    s.add_argument("--q", type=int, default=None)
    s.add_argument("--qmin", type=int, default=None)
    s.add_argument("--qmax", type=int, default=None)
    s.set_defaults(func=cmd_roottwist)

    s = sub.add_parser("lvalue", parents=[common], help="central values L(1/2, chi_j)")
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--j", type=int, default=None)
    s.add_argument("--all", action="store_true")
    s.set_defaults(func=cmd_lvalue)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    cfg = parser.parse_args(argv)
    if cfg.workers < 1:
        parser.error("--workers must be >= 1")
    try:
        return cfg.func(cfg)
    except (NotPrime, TooSmall) as exc:
        print(f"invalid modulus: {exc}", file=sys.stderr)
        return EXIT_MODULUS
    except (QuadratureFailure, PoleError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ToroidalError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

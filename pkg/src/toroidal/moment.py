"""Second toroidal moments M_{a,b}(q) = (1/(q-1)) sum_chi L(1/2, chi^a) L(1/2, chi^b).

Two pipelines produce a :class:`MomentReport`: ``moment_exact`` reads every
central value from one batched Hurwitz table, and ``afe_moment`` goes through
the congruence/exponential-sum decomposition of the averaged AFE.  Twisted
moments, power subfamilies and prime sweeps are built on the same table.
"""

from __future__ import annotations

import csv
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from math import gcd, log, pi
from typing import Iterable, Iterator, Optional, Sequence, TextIO

import numpy as np
from scipy.special import digamma, zeta

from .errors import BadResidue, NotPrime, ReducibleHint, ToroidalError, ZeroExponent
from .expsum import _t_tilde_by_log, gauss_all
from .field import FieldCtx, build_ctx
from .lfun import AfeParams, afe_eval_all, l_central_all, n_term, odd_beta, p_term

EULER_GAMMA = float(np.euler_gamma)


@dataclass
class MomentReport:
    """One evaluation of M_{a,b}(q).

    ``correction`` holds whatever is added on top of ``even_part + odd_part``
    (the trivial-power characters in the AFE pipeline, zero for the exact
    one).  ``flag`` is empty on success and names the failure otherwise.
    """

    q: int
    a: int
    b: int
    moment: complex
    even_part: complex
    odd_part: complex
    main_term: float
    abs_error: float
    nonvanishing_count: int
    seconds: float
    method: str
    correction: complex = 0j
    flag: str = ""

    @classmethod
    def failed(cls, q: int, a: int, b: int, method: str, flag: str) -> "MomentReport":
        nan = complex(math.nan, math.nan)
        return cls(q, a, b, nan, nan, nan, math.nan, math.nan, -1, 0.0, method, nan, flag)


def _check_exponents(a: int, b: int):
    if a == 0 or b == 0:
        raise ZeroExponent("a and b must be non-zero")


def const_C() -> float:
    """C = gamma/2 - pi/4 - 3 log 2 / 2 - log(pi)/2, cross-checked against the digamma form."""
    closed = EULER_GAMMA / 2 - pi / 4 - 1.5 * log(2) - 0.5 * log(pi)
    via_digamma = EULER_GAMMA + 0.5 * float(digamma(0.25)) - 0.5 * log(pi)
    if abs(closed - via_digamma) > 1e-12:
        raise ArithmeticError(f"forms of C disagree: {closed!r} vs {via_digamma!r}")
    return closed


def predict_main(a: int, b: int, q: int) -> float:
    """Predicted limit of M_{a,b}(q)."""
    _check_exponents(a, b)
    if a + b == 0:
        return log(q) + 2 * const_C()
    if a * b > 0:
        return 1.0
    return float(zeta((abs(a) + abs(b)) / (2 * gcd(a, b))))


def _nonvanishing(la: np.ndarray, lb: np.ndarray, rel: float = 1e-8) -> np.ndarray:
    ma, mb = np.abs(la), np.abs(lb)
    scale = np.maximum(1.0, np.maximum(ma, mb))
    return np.minimum(ma, mb) > rel * scale


def _power_values(ctx: FieldCtx, a: int, b: int):
    table = l_central_all(ctx).values
    j = np.arange(ctx.n)
    return table[(a * j) % ctx.n], table[(b * j) % ctx.n]


def nonvanishing_count(ctx: FieldCtx, a: int, b: int) -> int:
    """Number of chi with L(1/2, chi^a) L(1/2, chi^b) numerically non-zero."""
    _check_exponents(a, b)
    la, lb = _power_values(ctx, a, b)
    return int(np.count_nonzero(_nonvanishing(la, lb)))


def small_values(ctx: FieldCtx, a: int, b: int, lo: float = 1e-10, hi: float = 1e-6) -> list[int]:
    """Character indices whose smaller factor has modulus in [lo, hi], for manual review."""
    la, lb = _power_values(ctx, a, b)
    m = np.minimum(np.abs(la), np.abs(lb))
    return [int(j) for j in np.flatnonzero((m >= lo) & (m <= hi))]


def moment_exact(ctx: FieldCtx, a: int, b: int) -> MomentReport:
    """M_{a,b}(q) from the batched table of central values, trivial powers included."""
    _check_exponents(a, b)
    t0 = time.perf_counter()
    la, lb = _power_values(ctx, a, b)
    prod = la * lb
    n = ctx.n
    even = complex(prod[0::2].sum() / n)
    odd = complex(prod[1::2].sum() / n)
    moment = even + odd
    main = predict_main(a, b, ctx.q)
    count = int(np.count_nonzero(_nonvanishing(la, lb)))
    return MomentReport(ctx.q, a, b, moment, even, odd, main, abs(moment - main), count,
                        time.perf_counter() - t0, "exact")


def afe_moment(ctx: FieldCtx, a: int, b: int, X: Optional[float] = None, G: str = "gauss") -> MomentReport:
    """M_{a,b}(q) through the averaged AFE.

    even part N(X) + P(Y), odd part N'(X) + i^-beta P'(Y), plus, for the few
    characters with chi^a or chi^b trivial (where the AFE does not apply),
    the difference between their exact product and the AFE expression.
    """
    _check_exponents(a, b)
    t0 = time.perf_counter()
    q, n = ctx.q, ctx.n
    params = AfeParams.balanced(q, a, b, X, G)
    eps = gauss_all(ctx)
    t = _t_tilde_by_log(ctx, a, b, eps)
    even = n_term(ctx, a, b, params.X, "even", G) + p_term(ctx, a, b, params.Y, "even", G, t)
    odd = (n_term(ctx, a, b, params.X, "odd", G)
           + 1j ** (-odd_beta(a, b)) * p_term(ctx, a, b, params.Y, "odd", G, t))

    j = np.arange(n)
    bad = ((a * j) % n == 0) | ((b * j) % n == 0)
    la, lb = _power_values(ctx, a, b)
    bracket = afe_eval_all(ctx, params, eps)
    correction = complex(np.sum(la[bad] * lb[bad] - bracket[bad]) / n)

    moment = complex(even + odd + correction)
    main = predict_main(a, b, q)
    count = int(np.count_nonzero(_nonvanishing(la, lb)))
    return MomentReport(q, a, b, moment, complex(even), complex(odd), main, abs(moment - main), count,
                        time.perf_counter() - t0, "afe", correction)


def _log_of(ctx: FieldCtx, rho: int) -> int:
    r = int(rho) % ctx.q
    if r == 0:
        raise BadResidue("rho must be invertible mod q")
    return int(ctx.dlog[r])


def twisted_moment(ctx: FieldCtx, rho: int) -> complex:
    """(1/(q-1)) sum_chi chi(rho) |L(1/2, chi)|^2."""
    ell = _log_of(ctx, rho)
    sq = np.abs(l_central_all(ctx).values) ** 2
    phase = ctx.roots[(np.arange(ctx.n) * ell) % ctx.n]
    return complex(np.dot(phase, sq) / ctx.n)


def twisted_moment_all(ctx: FieldCtx) -> np.ndarray:
    """twisted_moment for every rho at once, indexed by discrete log of rho."""
    sq = np.abs(l_central_all(ctx).values) ** 2
    return np.fft.ifft(sq)


def power_subfamily_moment(ctx: FieldCtx, a: int, check: bool = True) -> float:
    """(1/(q-1)) times the sum of |L(1/2, chi)|^2 over the characters chi = eta^a.

    The a-th powers are the chi_j with gcd(a, q-1) | j.  With ``check`` the
    identity  value * gcd(a, q-1) = M_{a,-a}(q)  is verified on the spot.
    """
    if a < 1:
        raise ValueError("a must be positive")
    d = gcd(a, ctx.n)
    sq = np.abs(l_central_all(ctx).values) ** 2
    value = float(sq[::d].sum() / ctx.n)
    if check:
        full = moment_exact(ctx, a, -a).moment
        if abs(value * d - full) > 1e-8 * max(1.0, abs(full)):
            raise ArithmeticError(f"subfamily identity off by {abs(value * d - full):.3e}")
    return value


def _has_rational_root(coeffs: Sequence[int]) -> bool:
    """Rational root test for an integer polynomial (coefficients highest degree first)."""
    c = [int(x) for x in coeffs]
    if c[-1] == 0:
        return True
    lead, const = abs(c[0]), abs(c[-1])

    def divisors(m):
        return [d for d in range(1, m + 1) if m % d == 0]

    for p in divisors(const):
        for s in divisors(lead):
            for sign in (1, -1):
                x = Fraction(sign * p, s)
                val = Fraction(0)
                for coef in c:
                    val = val * x + coef
                if val == 0:
                    return True
    return False


def smallest_root(ctx: FieldCtx, coeffs: Sequence[int]) -> Optional[int]:
    """Smallest rho in 1..q-1 with f(rho) = 0 mod q, or None."""
    q = ctx.q
    x = np.arange(1, q, dtype=np.int64)
    val = np.zeros_like(x)
    for coef in coeffs:
        val = (val * x + int(coef) % q) % q
    hits = np.flatnonzero(val == 0)
    return int(x[hits[0]]) if hits.size else None


def root_twist(ctx: FieldCtx, coeffs: Sequence[int]) -> Optional[complex]:
    """Twisted moment at the smallest root mod q of f; None when f has no unit root mod q.

    ``coeffs`` lists the integer coefficients from the leading one down, so
    x^2 + 1 is (1, 0, 1).  f must have degree at least 2; a rational root is
    reported as :class:`ReducibleHint`, other reducible inputs are the
    caller's responsibility.
    """
    coeffs = [int(c) for c in coeffs]
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
    if len(coeffs) < 3:
        raise ValueError("f must have degree at least 2")
    if _has_rational_root(coeffs):
        raise ReducibleHint("f has a rational root")
    rho = smallest_root(ctx, coeffs)
    return None if rho is None else twisted_moment(ctx, rho)


# ---------------------------------------------------------------------------
# Sweeps and serialisation


def _sweep_one(args) -> MomentReport:
    q, a, b, method, X = args
    try:
        ctx = build_ctx(q)
        if method == "afe":
            return afe_moment(ctx, a, b, X)
        return moment_exact(ctx, a, b)
    except NotPrime:
        return MomentReport.failed(q, a, b, method, "NotPrime")
    except ToroidalError as exc:
        return MomentReport.failed(q, a, b, method, type(exc).__name__)


def sweep_iter(a: int, b: int, q_list: Iterable[int], parallel: int = 1, method: str = "exact",
               X: Optional[float] = None) -> Iterator[MomentReport]:
    """Yield reports in the order of q_list as they become available."""
    _check_exponents(a, b)
    if method not in ("exact", "afe"):
        raise ValueError(f"unknown method {method!r}")
    jobs = [(int(q), a, b, method, X) for q in q_list]
    if parallel <= 1 or len(jobs) <= 1:
        yield from map(_sweep_one, jobs)
        return
    with ProcessPoolExecutor(max_workers=parallel) as pool:
        yield from pool.map(_sweep_one, jobs)


def sweep(a: int, b: int, q_list: Iterable[int], parallel: int = 1, method: str = "exact",
          X: Optional[float] = None) -> list[MomentReport]:
    """Moments for every q in q_list, in input order; failures are flagged per entry."""
    return list(sweep_iter(a, b, q_list, parallel, method, X))


def error_slope(reports: Sequence[MomentReport]) -> float:
    """Least-squares slope of log|M - main| against log q (an empirical -delta)."""
    pts = [(log(r.q), log(r.abs_error)) for r in reports if not r.flag and r.abs_error > 0]
    if len(pts) < 2:
        raise ValueError("need at least two successful reports")
    x, y = np.array(pts).T
    return float(np.polyfit(x, y, 1)[0])


CSV_FIELDS = ("q", "a", "b", "moment_re", "moment_im", "even_re", "even_im", "odd_re", "odd_im",
              "main_term", "abs_error", "nonvanishing", "seconds", "method")


def report_row(r: MomentReport) -> dict:
    return {
        "q": r.q, "a": r.a, "b": r.b,
        "moment_re": r.moment.real, "moment_im": r.moment.imag,
        "even_re": r.even_part.real, "even_im": r.even_part.imag,
        "odd_re": r.odd_part.real, "odd_im": r.odd_part.imag,
        "main_term": r.main_term, "abs_error": r.abs_error,
        "nonvanishing": r.nonvanishing_count, "seconds": r.seconds,
        "method": r.method if not r.flag else f"{r.method}:{r.flag}",
    }


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".17g")
    return str(v)


def write_csv(rows: Iterable[dict], fh: TextIO, fields: Sequence[str] = CSV_FIELDS):
    """RFC-4180 CSV with a header and reals printed to 17 significant digits."""
    w = csv.writer(fh, lineterminator="\r\n")
    w.writerow(fields)
    for row in rows:
        w.writerow([_fmt(row[f]) for f in fields])


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def write_json(rows: Iterable[dict], fh: TextIO):
    json.dump([{k: _json_safe(v) for k, v in row.items()} for row in rows], fh, indent=1)
    fh.write("\n")


def report_dict(r: MomentReport) -> dict:
    """Every field of the report, with complex numbers split into (re, im)."""
    out = {}
    for k, v in asdict(r).items():
        out[k] = [v.real, v.imag] if isinstance(v, complex) else v
    return out

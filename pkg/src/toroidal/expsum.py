"""Gauss sums and exponential sums over the tori H_A(F_q).

Two routes are kept side by side on purpose: direct enumeration of the
solution sets (``t_tilde``, ``t_general``) and batch transforms over the whole
character group (``gauss_all``, ``t_tilde_all``).  Each route is the other's
test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, sqrt
from typing import Optional

import numpy as np

from .chars import Character, perp_indices
from .errors import BadResidue, PreconditionViolated
from .field import FieldCtx
from .torus import DEFAULT_CAP, TorusMatrix, subgroup_exponents

TWO_PI = 2.0 * np.pi


def _e(x, q):
    """e(x/q) = exp(2 pi i x / q), with x reduced mod q first to keep phases small."""
    return np.exp(1j * TWO_PI * (np.asarray(x) % q) / q)


def gauss_sum(chi: Character) -> complex:
    """Normalised Gauss sum q^(-1/2) sum_x chi(x) e(x/q), by direct summation."""
    q = chi.ctx.q
    x = np.arange(1, q, dtype=np.int64)
    return complex(np.sum(chi.values(x) * _e(x, q)) / sqrt(q))


def gauss_all(ctx: FieldCtx) -> np.ndarray:
    """Normalised Gauss sums of every character, indexed by character index.

    With x = g^k the Gauss sum of chi_j is sum_k e(jk/(q-1)) e(g^k/q), one
    inverse DFT of length q-1 for the whole table.
    """
    z = _e(ctx.gpow, ctx.q)
    return ctx.n * np.fft.ifft(z) / sqrt(ctx.q)


def _check_unit(ctx: FieldCtx, u: int) -> int:
    u = int(u) % ctx.q
    if u == 0:
        raise BadResidue("residue must be invertible mod q")
    return u


def t_tilde(ctx: FieldCtx, a: int, b: int, u: int) -> complex:
    """q^(-1/2) * sum over x^a y^b = u of e((x+y)/q), by enumeration.

    For each x the congruence b*log(y) = log(u) - a*log(x) mod (q-1) is solved
    directly; it has gcd(b, q-1) solutions or none.
    """
    u = _check_unit(ctx, u)
    n, q = ctx.n, ctx.q
    lx = np.arange(n, dtype=np.int64)
    rhs = (int(ctx.dlog[u]) - a * lx) % n
    d = gcd(b, n)
    ok = rhs % d == 0
    lx, rhs = lx[ok], rhs[ok]
    if lx.size == 0:
        return 0j
    m = n // d
    bd = (b // d) % m if m > 1 else 0
    base = (rhs // d) * pow(bd, -1, m) % m if m > 1 else np.zeros_like(rhs)
    ly = (base[:, None] + m * np.arange(d, dtype=np.int64)[None, :]) % n
    x = ctx.gpow[lx][:, None]
    y = ctx.gpow[ly]
    return complex(np.sum(_e(x + y, q)) / sqrt(q))


def _t_tilde_by_log(ctx: FieldCtx, a: int, b: int, eps: Optional[np.ndarray] = None) -> np.ndarray:
    """T~_{a,b}(g^l) for l = 0..q-2 through the Gauss-sum expansion."""
    n = ctx.n
    if eps is None:
        eps = gauss_all(ctx)
    j = np.arange(n, dtype=np.int64)
    s = eps[(a * j) % n] * eps[(b * j) % n]
    return sqrt(ctx.q) / n * np.fft.fft(s)


def t_tilde_all(ctx: FieldCtx, a: int, b: int, eps: Optional[np.ndarray] = None) -> np.ndarray:
    """Table of T~_{a,b}(u) indexed by residue u (entry 0 is NaN)."""
    out = np.full(ctx.q, np.nan, dtype=complex)
    out[ctx.gpow] = _t_tilde_by_log(ctx, a, b, eps)
    return out


def t_ab(ctx: FieldCtx, a: int, b: int, u: int, v: int) -> complex:
    """T_{a,b}(u, v) = T~_{a,b}(u^a v^b)."""
    u, v = _check_unit(ctx, u), _check_unit(ctx, v)
    q = ctx.q
    return t_tilde(ctx, a, b, pow(u, a, q) * pow(v, b, q) % q)


def closed_form_balanced(ctx: FieldCtx, a: int, u: int) -> float:
    """Closed form of T~_{a,-a}(u): sqrt(q)[u = (-1)^a] - (a,q-1)/sqrt(q)[u an a-th power]."""
    u = _check_unit(ctx, u)
    q = ctx.q
    val = 0.0
    if u == (q - 1 if a % 2 else 1):
        val += sqrt(q)
    e = gcd(abs(a), ctx.n)
    if int(ctx.dlog[u]) % e == 0:
        val -= e / sqrt(q)
    return val


def t_general(ctx: FieldCtx, A: TorusMatrix, u, cap: int = DEFAULT_CAP) -> complex:
    """q^(-(k - rank A)/2) * sum over x in H_A(F_q) of e(x.u/q); u may contain zeros."""
    u = np.asarray([int(v) % ctx.q for v in u], dtype=np.int64)
    if u.size != A.k:
        raise ValueError(f"u must have {A.k} entries")
    pts = ctx.gpow[subgroup_exponents(ctx, A, cap)]
    phase = (pts * u[None, :]).sum(axis=1) % ctx.q
    return complex(np.sum(_e(phase, ctx.q)) / ctx.q ** ((A.k - A.rank) / 2))


def mean_square(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> float:
    """q^-k * sum over all u in F_q^k of |T_A(u)|^2.

    The sums for every u come from one k-dimensional DFT of the indicator of
    H_A(F_q) inside F_q^k.
    """
    q, k = ctx.q, A.k
    if q ** k > cap:
        raise PreconditionViolated(f"q^k = {q ** k} exceeds cap {cap}")
    pts = ctx.gpow[subgroup_exponents(ctx, A, cap)]
    ind = np.zeros((q,) * k)
    ind[tuple(pts.T)] = 1.0
    sums = np.fft.fftn(ind)
    norm = q ** (k - A.rank)
    return float(np.sum(np.abs(sums) ** 2) / norm / q ** k)


def mean_square_predicted(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> float:
    """|H_A(F_q)| / q^(k - rank A)."""
    return len(subgroup_exponents(ctx, A, cap)) / ctx.q ** (A.k - A.rank)


def duality_check(ctx: FieldCtx, A: TorusMatrix, u, cap: int = DEFAULT_CAP) -> tuple[complex, complex]:
    """Both sides of the character/torus duality at u.

    lhs averages eps(chi_1)...eps(chi_k) * conj(chi(u)) over the characters
    trivial on H_A; rhs is q^(-rank/2) T_A(u).
    """
    n = ctx.n
    logs = np.array([ctx.dlog[_check_unit(ctx, v)] for v in u], dtype=np.int64)
    perp = perp_indices(ctx, A, cap)
    eps = gauss_all(ctx)
    weight = np.prod(eps[perp], axis=1)
    chi_u = ctx.roots[(perp @ logs) % n]
    lhs = complex(np.mean(weight * np.conj(chi_u)))
    rhs = t_general(ctx, A, u, cap) / ctx.q ** (A.rank / 2)
    return lhs, rhs


@dataclass(frozen=True)
class WeilReport:
    q: int
    a: int
    b: int
    max_abs: float
    bound: Optional[float]
    applicable: bool
    ok: Optional[bool]


def weil_bound(a: int, b: int) -> int:
    return abs(a) + abs(b) if a * b > 0 else max(abs(a), abs(b))


def weil_report(ctx: FieldCtx, a: int, b: int, strict: bool = False) -> WeilReport:
    """Scan |T~_{a,b}(u)| over F_q^x and compare with the Weil-type bound.

    The bound is |a|+|b| for exponents of the same sign and max(|a|,|b|)
    otherwise, for q >= max(|a|,|b|)^2 and a+b != 0.  Outside that range the
    scan still runs and the report is flagged not applicable, unless
    ``strict`` is set.
    """
    applicable = a + b != 0 and a * b != 0 and ctx.q >= max(abs(a), abs(b)) ** 2
    if strict and not applicable:
        raise PreconditionViolated(f"bound does not apply to (a, b) = ({a}, {b}) at q = {ctx.q}")
    vals = _t_tilde_by_log(ctx, a, b)
    max_abs = float(np.max(np.abs(vals)))
    if not applicable:
        return WeilReport(ctx.q, a, b, max_abs, None, False, None)
    bound = float(weil_bound(a, b))
    return WeilReport(ctx.q, a, b, max_abs, bound, True, max_abs <= bound + 1e-8)


def abs_histogram(ctx: FieldCtx, a: int, b: int, bins: int = 20) -> tuple[np.ndarray, np.ndarray]:
    """Histogram of |T~_{a,b}(u)| over u, as a distribution diagnostic."""
    vals = np.abs(_t_tilde_by_log(ctx, a, b))
    return np.histogram(vals, bins=bins)

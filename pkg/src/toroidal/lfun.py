"""Central values L(1/2, chi) and the approximate functional equation (AFE).

Exact values come from the Hurwitz decomposition
L(s, chi) = q^-s sum_{a=1}^{q-1} chi(a) zeta(s, a/q), batched over all
characters with one DFT.  The AFE side evaluates

    L(1/2, chi^a) L(1/2, chi^b) = S_X(chi) + R(chi) * conj-sum S_Y(chi)

with the smoothing weight V defined by a contour integral, and reorganises
the average over characters into the congruence sums N, N' and the
exponential-sum sums P, P'.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial, pi, sqrt
from typing import Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.special import bernoulli, loggamma

from .chars import Character
from .errors import DomainError, PoleError, QuadratureFailure, TrivialPower
from .expsum import _t_tilde_by_log, gauss_all
from .field import FieldCtx, build_ctx

# ---------------------------------------------------------------------------
# Hurwitz zeta at s = 1/2

_EM_TERMS = 30
_B2K = [float(b) for b in bernoulli(8)[2::2]]  # B2, B4, B6, B8


def hurwitz_zeta_half(x):
    """zeta(1/2, x) for 0 < x <= 1 by Euler-Maclaurin (absolute error ~1e-15).

    Accepts scalars or arrays.  Thirty terms are summed directly and the tail
    is corrected with Bernoulli numbers up to B_8.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0) or np.any(xa > 1):
        raise DomainError("hurwitz_zeta_half needs 0 < x <= 1")
    s = 0.5
    flat = xa.ravel()
    total = np.zeros_like(flat)
    for k in range(_EM_TERMS):
        total += (k + flat) ** -s
    big = _EM_TERMS + flat
    total += big ** (1 - s) / (s - 1) + 0.5 * big ** -s
    rising = s  # s(s+1)...(s+2j-2)
    for j, b in enumerate(_B2K, start=1):
        total += b / factorial(2 * j) * rising * big ** (-s - 2 * j + 1)
        rising *= (s + 2 * j - 1) * (s + 2 * j)
    out = total.reshape(xa.shape)
    return float(out) if out.ndim == 0 else out


ZETA_HALF = hurwitz_zeta_half(1.0)


def trivial_l_value(q: int) -> float:
    """L(1/2, chi_0) = zeta(1/2)(1 - q^-1/2) for the principal character mod q."""
    return ZETA_HALF * (1 - q ** -0.5)


@lru_cache(maxsize=8)
def _hurwitz_by_log(q: int) -> np.ndarray:
    return hurwitz_zeta_half(build_ctx(q).gpow / q)


def l_central(chi: Character) -> complex:
    """L(1/2, chi) by direct Hurwitz summation, O(q)."""
    q = chi.ctx.q
    a = np.arange(1, q, dtype=np.int64)
    return complex(np.sum(chi.values(a) * hurwitz_zeta_half(a / q)) / sqrt(q))


@dataclass(frozen=True)
class LTable:
    q: int
    values: np.ndarray
    method: str

    def __getitem__(self, j):
        return self.values[j]


def l_central_all(ctx: FieldCtx) -> LTable:
    """L(1/2, chi_j) for every j from one length-(q-1) DFT of zeta(1/2, g^k/q)."""
    z = _hurwitz_by_log(ctx.q)
    vals = ctx.n * np.fft.ifft(z) / sqrt(ctx.q)
    vals.setflags(write=False)
    return LTable(ctx.q, vals, "hurwitz_batch")


# ---------------------------------------------------------------------------
# Gamma factor and smoothing weight


def _log_gamma_factor(s, ta: int, tb: int):
    return -s * np.log(pi) + loggamma((s + ta) / 2) + loggamma((s + tb) / 2)


def gamma_factor(s: complex, ta: int, tb: int) -> complex:
    """pi^-s Gamma((s+ta)/2) Gamma((s+tb)/2)."""
    for t in (ta, tb):
        z = complex(s) + t
        if z.imag == 0 and z.real <= 0 and z.real % 2 == 0:
            raise PoleError(f"Gamma((s+{t})/2) has a pole at s = {s}")
    return complex(np.exp(_log_gamma_factor(complex(s), ta, tb)))


# Zeros placed on the poles of the gamma ratio inside the strip |Re u| < 4.
_POLE_ZEROS = (0.5, 1.5, 2.5, 3.5)


def _g_gauss(u):
    return np.exp(u * u)


def _g_gauss2(u):
    return np.exp(2 * u * u)


def _g_poles(u):
    out = np.exp(u * u)
    for p in _POLE_ZEROS:
        out = out * (1 - u * u / (p * p)) ** 2
    return out


TEST_FUNCTIONS = {"gauss": _g_gauss, "gauss2": _g_gauss2, "poles": _g_poles}

T_MAX = 12.0
H_STEP = 0.05
LEFT_SIGMA = -0.25
LEFT_STEP = 0.02
QUAD_TOL = 1e-14
# Terms with V(mn/X) below this are dropped from the Dirichlet-series sums.
CUTOFF_TOL = 1e-11


@lru_cache(maxsize=64)
def _nodes(ta: int, tb: int, G: str, sigma: float, h: float, t_max: float):
    """Nodes u_k and weights so that V(y) = Re sum_k y^(-u_k) w_k (+1 left of 0)."""
    t = np.arange(-t_max, t_max + h / 2, h)
    u = sigma + 1j * t
    ratio = np.exp(_log_gamma_factor(0.5 + u, ta, tb) - _log_gamma_factor(0.5, ta, tb))
    w = h / (2 * pi) * TEST_FUNCTIONS[G](u) * ratio / u
    return u, w


def v_weight(y, ta: int = 0, tb: int = 0, G: str = "gauss", sigma: Optional[float] = None,
             h: Optional[float] = None, t_max: float = T_MAX):
    """Smoothing weight V(y) = (1/2 pi i) int y^-u G(u) gamma(1/2+u)/gamma(1/2) du/u.

    The default contour is Re u = 3 for y >= 1.  For y < 1 the line is moved
    to Re u = -1/4, past the pole at 0 (residue 1), which avoids the y^-3
    cancellation.  Passing ``sigma`` forces one line for every y; a negative
    sigma must stay right of the first gamma pole at -1/2.
    """
    ya = np.asarray(y, dtype=float)
    if np.any(ya <= 0):
        raise DomainError("V(y) needs y > 0")
    flat = ya.ravel()
    out = np.empty_like(flat)
    if sigma is None:
        groups = [(flat >= 1, 3.0, h or H_STEP), (flat < 1, LEFT_SIGMA, h or LEFT_STEP)]
    else:
        step = h or (H_STEP if sigma > 0.5 else LEFT_STEP)
        groups = [(np.ones(flat.shape, bool), float(sigma), step)]
    for mask, sig, step in groups:
        if not mask.any():
            continue
        u, w = _nodes(ta, tb, G, sig, step, t_max)
        logy = np.log(flat[mask])
        tail = np.max(np.abs(w[[0, -1]])) * np.max(np.exp(-sig * logy))
        if tail > QUAD_TOL:
            raise QuadratureFailure(f"contour tail {tail:.2e} above tolerance")
        vals = np.empty(logy.shape)
        for s in range(0, logy.size, 2048):
            blk = logy[s:s + 2048]
            vals[s:s + 2048] = np.real(np.exp(-np.outer(blk, u)) @ w)
        if sig < 0:
            vals += 1.0
        out[mask] = vals
    out = out.reshape(ya.shape)
    return float(out) if out.ndim == 0 else out


@lru_cache(maxsize=32)
def v_cutoff(ta: int, tb: int, G: str = "gauss", tol: float = CUTOFF_TOL) -> float:
    """A y beyond which |V(y)| stays below tol (checked on a fine log grid)."""
    ys = np.logspace(0, 6, 6001)
    v = np.abs(v_weight(ys, ta, tb, G))
    above = np.flatnonzero(v >= tol)
    if above.size == 0:
        return 1.0
    if above[-1] == ys.size - 1:
        raise QuadratureFailure("V does not decay below tolerance by y = 1e6")
    return float(ys[above[-1] + 1])


# ---------------------------------------------------------------------------
# Approximate functional equation


@dataclass(frozen=True)
class AfeParams:
    """Parameters of the AFE for L(1/2, chi^a) L(1/2, chi^b).

    ``ta``/``tb`` fix the parity class; ``None`` means "take them from the
    character".  X * Y must equal q^2.
    """

    a: int
    b: int
    X: float
    Y: float
    ta: Optional[int] = None
    tb: Optional[int] = None
    G: str = "gauss"

    @classmethod
    def balanced(cls, q: int, a: int, b: int, X: Optional[float] = None, G: str = "gauss") -> "AfeParams":
        X = float(q) if X is None else float(X)
        return cls(a, b, X, q * q / X, G=G)

    def check(self, q: int):
        if abs(self.X * self.Y / (q * q) - 1) > 1e-12:
            raise ValueError(f"X*Y = {self.X * self.Y} differs from q^2 = {q * q}")


def _v_interpolated(y: np.ndarray, ta: int, tb: int, G: str, step: float = 2e-3) -> np.ndarray:
    """V on a large array via a cubic spline in log y (error ~1e-13 at this step)."""
    if y.size < 20_000:
        return v_weight(y, ta, tb, G)
    lo, hi = np.log(y.min()), np.log(y.max())
    grid = np.linspace(lo, hi, max(8, int((hi - lo) / step) + 2))
    spline = CubicSpline(grid, v_weight(np.exp(grid), ta, tb, G))
    return spline(np.log(y))


@lru_cache(maxsize=64)
def _coefficients(q: int, a: int, b: int, X: float, ta: int, tb: int, G: str) -> np.ndarray:
    """c[l] = sum over m, n with log(m^a n^b) = l of V(mn/X)/sqrt(mn), q not dividing mn.

    Pairs with mn <= K are split at sqrt(K): rows m <= s take every n, columns
    n <= s take the m > s.  Along a row the weights w[mn] are a strided slice.
    """
    ctx = build_ctx(q)
    n = ctx.n
    K = max(1, int(X * v_cutoff(ta, tb, G)))
    k = np.arange(1, K + 1, dtype=np.int64)
    w = _v_interpolated(k / X, ta, tb, G) / np.sqrt(k)
    res = k % q
    unit = res != 0
    la = (a * ctx.dlog[res]) % n
    lb = (b * ctx.dlog[res]) % n
    wa = np.where(unit, 1.0, 0.0)
    s = int(np.sqrt(K))
    c = np.zeros(n)
    for m in range(1, s + 1):
        if m % q == 0:
            continue
        top = K // m
        ell = (la[m - 1] + lb[:top]) % n
        c += np.bincount(ell, weights=w[m - 1::m][:top] * wa[:top], minlength=n)
    for j in range(1, s + 1):
        if j % q == 0:
            continue
        top = K // j
        if top <= s:
            continue
        ell = (la[s:top] + lb[j - 1]) % n
        c += np.bincount(ell, weights=w[(s + 1) * j - 1::j][:top - s] * wa[s:top], minlength=n)
    c.setflags(write=False)
    return c


def smoothed_coefficients(ctx: FieldCtx, a: int, b: int, X: float, ta: int, tb: int,
                          G: str = "gauss") -> np.ndarray:
    """Residue-class profile of the smoothed Dirichlet series, indexed by discrete log."""
    return _coefficients(ctx.q, a, b, float(X), ta, tb, G)


def root_number_factor(eps: np.ndarray, ctx: FieldCtx, a: int, b: int, j: int, ta: int, tb: int) -> complex:
    n = ctx.n
    return complex(eps[(a * j) % n] * eps[(b * j) % n] / 1j ** (ta + tb))


def _bracket(chi: Character, params: AfeParams, eps: np.ndarray) -> complex:
    ctx = chi.ctx
    n, j = ctx.n, chi.j
    ta = (params.a * j) % 2 if params.ta is None else params.ta
    tb = (params.b * j) % 2 if params.tb is None else params.tb
    phase = ctx.roots[(j * np.arange(n)) % n]
    cX = smoothed_coefficients(ctx, params.a, params.b, params.X, ta, tb, params.G)
    cY = smoothed_coefficients(ctx, params.a, params.b, params.Y, ta, tb, params.G)
    first = complex(np.dot(cX, phase))
    second = complex(np.dot(cY, np.conj(phase)))
    return first + root_number_factor(eps, ctx, params.a, params.b, j, ta, tb) * second


def afe_eval(chi: Character, params: AfeParams, eps_table: Optional[np.ndarray] = None) -> complex:
    """Right-hand side of the AFE for one character with chi^a, chi^b non-trivial."""
    ctx = chi.ctx
    params.check(ctx.q)
    if (chi ** params.a).is_trivial or (chi ** params.b).is_trivial:
        raise TrivialPower(f"chi^{params.a} or chi^{params.b} is trivial for {chi}")
    ta, tb = (chi ** params.a).parity, (chi ** params.b).parity
    if (params.ta, params.tb) not in ((None, None), (ta, tb)):
        raise ValueError(f"params parity {(params.ta, params.tb)} does not match {(ta, tb)}")
    eps = gauss_all(ctx) if eps_table is None else eps_table
    return _bracket(chi, params, eps)


def afe_eval_all(ctx: FieldCtx, params: AfeParams, eps_table: Optional[np.ndarray] = None) -> np.ndarray:
    """The AFE right-hand side for every character at once (two DFTs per parity class).

    Entries for characters with chi^a or chi^b trivial are the same
    expression, which is then *not* equal to the L-value product.
    """
    params.check(ctx.q)
    n = ctx.n
    a, b = params.a, params.b
    eps = gauss_all(ctx) if eps_table is None else eps_table
    j = np.arange(n)
    out = np.empty(n, dtype=complex)
    for parity, (ta, tb) in ((0, (0, 0)), (1, (a % 2, b % 2))):
        cX = smoothed_coefficients(ctx, a, b, params.X, ta, tb, params.G)
        cY = smoothed_coefficients(ctx, a, b, params.Y, ta, tb, params.G)
        first = n * np.fft.ifft(cX)
        second = np.fft.fft(cY)
        root = eps[(a * j) % n] * eps[(b * j) % n] / 1j ** (ta + tb)
        sel = j % 2 == parity
        out[sel] = (first + root * second)[sel]
    return out


def _parity_class(a: int, b: int, parity: str) -> tuple[int, int]:
    if parity == "even":
        return 0, 0
    if parity == "odd":
        return a % 2, b % 2
    raise ValueError("parity must be 'even' or 'odd'")


def n_term(ctx: FieldCtx, a: int, b: int, X: float, parity: str = "even", G: str = "gauss") -> float:
    """Congruence part of the averaged AFE.

    even: 1/2 sum over (m^a n^b)^2 = 1 of V(mn/X)/sqrt(mn).
    odd:  1/2 (sum over m^a n^b = 1  -  sum over m^a n^b = -1), weighted by W.
    """
    ta, tb = _parity_class(a, b, parity)
    c = smoothed_coefficients(ctx, a, b, X, ta, tb, G)
    half = ctx.n // 2
    sign = 1.0 if parity == "even" else -1.0
    return 0.5 * (c[0] + sign * c[half])


def p_term(ctx: FieldCtx, a: int, b: int, Y: float, parity: str = "even", G: str = "gauss",
           t_table: Optional[np.ndarray] = None) -> complex:
    """Exponential-sum part: (1/2 sqrt q) sum (T~(m^a n^b) +/- T~(-m^a n^b)) V(mn/Y)/sqrt(mn).

    The odd variant returns P' without the i^-beta factor.
    """
    ta, tb = _parity_class(a, b, parity)
    c = smoothed_coefficients(ctx, a, b, Y, ta, tb, G)
    t = _t_tilde_by_log(ctx, a, b) if t_table is None else t_table
    shifted = np.roll(t, -(ctx.n // 2))
    sign = 1.0 if parity == "even" else -1.0
    return complex(np.dot(c, t + sign * shifted) / (2 * sqrt(ctx.q)))


def odd_beta(a: int, b: int) -> int:
    """beta = t(chi^a) + t(chi^b) for odd chi."""
    return a % 2 + b % 2


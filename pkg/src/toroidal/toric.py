"""Counting integer points of boxes whose reduction lies in a coset u H_A(F_q)."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, log, prod, sqrt
from typing import Callable, Optional

import numpy as np

from .errors import BadResidue, DegenerateExponent
from .field import FieldCtx
from .torus import DEFAULT_CAP, TorusMatrix, subgroup_exponents


@dataclass(frozen=True)
class IntBox:
    """Product of inclusive integer intervals (lo_j, hi_j)."""

    intervals: tuple[tuple[int, int], ...]

    def __post_init__(self):
        iv = tuple((int(lo), int(hi)) for lo, hi in self.intervals)
        if not iv:
            raise ValueError("a box needs at least one interval")
        if any(lo > hi for lo, hi in iv):
            raise ValueError(f"empty interval in {iv}")
        object.__setattr__(self, "intervals", iv)

    @classmethod
    def parse(cls, text: str) -> "IntBox":
        """Parse "lo..hi,lo..hi,..."."""
        out = []
        for part in text.split(","):
            lo, hi = part.strip().split("..")
            out.append((int(lo), int(hi)))
        return cls(tuple(out))

    @property
    def k(self) -> int:
        return len(self.intervals)

    @property
    def lengths(self) -> list[int]:
        return [hi - lo + 1 for lo, hi in self.intervals]

    @property
    def size(self) -> int:
        return prod(self.lengths)

    @property
    def boundary_size(self) -> int:
        """Number of points with at least one coordinate at an end of its interval."""
        return self.size - prod(max(0, n - 2) for n in self.lengths)


@dataclass(frozen=True)
class CountResult:
    count: int
    normalized: float
    method: str


def _residue_counts(lo: int, hi: int, q: int) -> np.ndarray:
    """How many integers of [lo, hi] fall in each residue class mod q."""
    r = np.arange(q, dtype=np.int64)
    return (hi - r) // q - (lo - 1 - r) // q


def _multiples(lo: int, hi: int, q: int) -> int:
    return hi // q - (lo - 1) // q


def count_brute(ctx: FieldCtx, A: TorusMatrix, u, B: IntBox, cap: int = DEFAULT_CAP) -> CountResult:
    """M_A(u, B; q): points of B whose reduction lies in u H_A(F_q).

    Each coordinate is summarised by how many of its integers have a given
    discrete log, and the count is the sum over h in H_A of the products of
    those multiplicities at log(u) + h.  Points with a coordinate divisible by
    q never lie in the coset and are not counted.
    """
    if len(u) != A.k or B.k != A.k:
        raise ValueError("u, A and B must share the dimension k")
    q, n = ctx.q, ctx.n
    logs = []
    for v in u:
        v = int(v) % q
        if v == 0:
            raise BadResidue("coset representative must be invertible")
        logs.append(int(ctx.dlog[v]))
    per_log = []
    for lo, hi in B.intervals:
        counts = _residue_counts(lo, hi, q)
        c = np.zeros(n, dtype=np.int64)
        c[ctx.dlog[1:]] = counts[1:]
        per_log.append(c)
    H = subgroup_exponents(ctx, A, cap)
    total = np.ones(len(H), dtype=object if B.size > 2 ** 62 else np.int64)
    for j in range(A.k):
        total = total * per_log[j][(H[:, j] + logs[j]) % n]
    count = int(total.sum())
    return CountResult(count, count / sqrt(B.size), "brute")


def reduced_basis(q: int, alpha: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Lagrange-Gauss reduced basis of {(m, n) : m = alpha n mod q}."""
    u, v = (int(alpha) % q, 1), (q, 0)

    def dot(x, y):
        return x[0] * y[0] + x[1] * y[1]

    if dot(u, u) > dot(v, v):
        u, v = v, u
    while True:
        uu = dot(u, u)
        mu = (2 * dot(u, v) + uu) // (2 * uu)
        v = (v[0] - mu * u[0], v[1] - mu * u[1])
        if dot(v, v) >= uu:
            return u, v
        u, v = v, u


def lattice_min_2d(q: int, alpha: int, norm: str = "euclidean") -> float:
    """Length of a shortest non-zero vector of {(m, n) : m = alpha n mod q}."""
    if not 1 <= alpha % q <= q - 1:
        raise BadResidue("alpha must be invertible mod q")
    b1, b2 = reduced_basis(q, alpha)
    if norm == "euclidean":
        return sqrt(b1[0] ** 2 + b1[1] ** 2)
    if norm == "sup":
        # For a reduced basis, a sup-norm minimiser has coefficients in [-2, 2].
        best = None
        for s in range(-2, 3):
            for t in range(-2, 3):
                if s or t:
                    v = max(abs(s * b1[0] + t * b2[0]), abs(s * b1[1] + t * b2[1]))
                    best = v if best is None else min(best, v)
        return float(best)
    raise ValueError(f"unknown norm {norm!r}")


def _ceil_div(a, b):
    return -((-a) // b)


def count_lattice_2d(q: int, alpha: int, I: tuple[int, int], J: tuple[int, int]) -> int:
    """Exact number of (m, n) in I x J with m = alpha n mod q.

    Points are written s*b1 + t*b2 in a reduced basis; for each admissible t
    the range of s is an interval read off from the box constraints.
    """
    b1, b2 = reduced_basis(q, alpha)
    det = b1[0] * b2[1] - b1[1] * b2[0]
    if det < 0:
        b2 = (-b2[0], -b2[1])
        det = -det
    lo = (I[0], J[0])
    hi = (I[1], J[1])
    corners = [(x, y) for x in (lo[0], hi[0]) for y in (lo[1], hi[1])]
    f = [b1[0] * y - b1[1] * x for x, y in corners]
    tmin, tmax = _ceil_div(min(f), det), max(f) // det
    if tmax < tmin:
        return 0
    t = np.arange(tmin, tmax + 1, dtype=np.int64)
    smin = np.full(t.shape, np.iinfo(np.int64).min // 4, dtype=np.int64)
    smax = np.full(t.shape, np.iinfo(np.int64).max // 4, dtype=np.int64)
    valid = np.ones(t.shape, dtype=bool)
    for c in range(2):
        low = lo[c] - t * b2[c]
        high = hi[c] - t * b2[c]
        if b1[c] > 0:
            smin = np.maximum(smin, _ceil_div(low, b1[c]))
            smax = np.minimum(smax, high // b1[c])
        elif b1[c] < 0:
            smin = np.maximum(smin, _ceil_div(high, b1[c]))
            smax = np.minimum(smax, low // b1[c])
        else:
            valid &= (low <= 0) & (high >= 0)
    return int(np.sum(np.where(valid, np.maximum(smax - smin + 1, 0), 0)))


@dataclass(frozen=True)
class LatticeCount:
    count: int
    count_units: int
    bound: float
    lam: float
    boundary: int


def count_lattice_linear(ctx: FieldCtx, i: int, j: int, u, B: IntBox) -> LatticeCount:
    """Points of B with u_i x_i = u_j x_j mod q, via the 2D sublattice (0-based i, j).

    ``count`` is the full lattice count; ``count_units`` keeps only points
    with every coordinate prime to q, which is M_A(u', B; q) for
    A = e_i - e_j and u'_i = u_i^-1, u'_j = u_j^-1.  ``bound`` is
    |B|/q + (Delta/lambda_1 + 1)^(k-1) without its implicit constant, where
    lambda_1 is the minimum of the k-dimensional lattice (1 once k >= 3).
    """
    q, k = ctx.q, B.k
    if i == j or not (0 <= i < k and 0 <= j < k) or len(u) != k:
        raise ValueError("need distinct indices inside the box dimension")
    ui, uj = int(u[i]) % q, int(u[j]) % q
    if ui == 0 or uj == 0:
        raise BadResidue("u_i and u_j must be invertible")
    alpha = uj * pow(ui, -1, q) % q
    Ii, Ij = B.intervals[i], B.intervals[j]
    c2 = count_lattice_2d(q, alpha, Ii, Ij)
    zero2 = _multiples(*Ii, q) * _multiples(*Ij, q)
    rest = [B.intervals[l] for l in range(k) if l not in (i, j)]
    free = prod(hi - lo + 1 for lo, hi in rest)
    free_units = prod(hi - lo + 1 - _multiples(lo, hi, q) for lo, hi in rest)
    lam2 = lattice_min_2d(q, alpha)
    lam = lam2 if k == 2 else min(1.0, lam2)
    delta = B.boundary_size
    bound = B.size / q + (delta / lam + 1) ** (k - 1)
    return LatticeCount(c2 * free, (c2 - zero2) * free_units, bound, lam, delta)


def lipschitz_constant(k: int) -> float:
    """Explicit constant for count <= C * bound from the Lipschitz principle.

    Uses 3^k (2k) (sqrt(k) * Omega * Delta/lambda + 1)^(k-1) with the
    orthogonality defect of a reduced basis bounded by 2/sqrt(3).
    """
    omega = 2 / sqrt(3)
    return 1.0 + 3 ** k * 2 * k * (sqrt(k) * omega) ** (k - 1)


def systematic_count(a: int, bneg: int, X: float, V: Optional[Callable] = None,
                     tol: float = 1e-13, chunk: int = 4096) -> float:
    """Weighted count of the systematic solutions (r^(bneg/d), r^(a/d)).

    Returns 1/2 sum_r r^(-s) V(r^(2s)/X) with s = (a + bneg)/(2d), d = gcd(a, bneg);
    it tends to zeta(s)/2 as X grows.  ``V`` defaults to the even-parity
    smoothing weight.
    """
    if a < 1 or bneg < 1:
        raise ValueError("a and bneg must be positive")
    if a == bneg:
        raise DegenerateExponent("a == bneg gives a + b = 0")
    if V is None:
        from .lfun import v_weight

        def V(y):
            return v_weight(y, 0, 0)

    d = gcd(a, bneg)
    s = (a + bneg) / (2 * d)
    total = 0.0
    start = 1
    while True:
        r = np.arange(start, start + chunk, dtype=float)
        y = r ** (2 * s) / X
        w = np.asarray(V(y), dtype=float)
        total += float(np.sum(r ** (-s) * w))
        if y[0] > 1 and np.max(np.abs(w)) < tol:
            break
        start += chunk
    return 0.5 * total


def systematic_points(a: int, bneg: int, B: IntBox) -> list[tuple[int, int]]:
    """Systematic solutions (r^(bneg/d), r^(a/d)), r >= 1, lying in a 2D box."""
    d = gcd(a, bneg)
    (lo1, hi1), (lo2, hi2) = B.intervals
    out = []
    r = 1
    while True:
        m, n = r ** (bneg // d), r ** (a // d)
        if m > hi1 or n > hi2:
            break
        if m >= lo1 and n >= lo2:
            out.append((m, n))
        r += 1
    return out


@dataclass(frozen=True)
class PierceBound:
    value: float
    applicable: bool


def pierce_bound(M: int, N: int, q: int, k: int) -> PierceBound:
    """M^(k/(k+1)) N^(1/(2k)) (log q)^(1/(2k)), without the implicit constant."""
    if k < 1:
        raise ValueError("k must be >= 1")
    applicable = M <= 0.5 * q ** ((k + 1) / (2 * k)) and N <= q / 4
    value = M ** (k / (k + 1)) * N ** (1 / (2 * k)) * log(q) ** (1 / (2 * k))
    return PierceBound(value, applicable)


def trivial_bound(len_i: int, len_j: int, q: int) -> float:
    """min(|I|(|J|/q + 1), |J|(|I|/q + 1)), the elementary bound up to constants."""
    return min(len_i * (len_j / q + 1), len_j * (len_i / q + 1))


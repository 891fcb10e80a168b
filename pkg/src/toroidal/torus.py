"""Integer matrices A and the multiplicative subgroups H_A(F_q) they cut out.

A point x of (F_q^x)^k lies in H_A when prod_j x_j**a[i][j] == 1 for every
row i.  In discrete-log coordinates this is the linear system A e = 0 over
Z/(q-1), which is how the subgroup is enumerated here.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from math import gcd

import numpy as np

from .errors import TooLarge
from .field import FieldCtx

DEFAULT_CAP = 20_000_000


def _det(rows: list[list[int]]) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    m = [list(r) for r in rows]
    size = len(m)
    sign, prev = 1, 1
    for c in range(size):
        pivot = next((r for r in range(c, size) if m[r][c] != 0), None)
        if pivot is None:
            return 0
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        for r in range(c + 1, size):
            for cc in range(c + 1, size):
                m[r][cc] = (m[r][cc] * m[c][c] - m[r][c] * m[c][cc]) // prev
            m[r][c] = 0
        prev = m[c][c]
    return sign * m[size - 1][size - 1] if size else 1


def _rank(rows: list[list[int]]) -> int:
    m = [list(r) for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    rank = 0
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f, p = m[r][c], m[rank][c]
                m[r] = [x * p - y * f for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class TorusMatrix:
    """An r x k integer matrix together with its rank and type flags.

    ``affine_type``: non-negative entries and every column has a positive one.
    ``connected_type``: Z^k modulo the row span is torsion-free, i.e. the gcd of
    the maximal non-vanishing minors is 1.
    """

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        if not rows or not rows[0]:
            raise ValueError("matrix must have at least one row and one column")
        if any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged matrix")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def parse(cls, text: str) -> "TorusMatrix":
        """Parse "a,b;c,d" (rows separated by ';', entries by ',')."""
        rows = [[int(x) for x in row.split(",")] for row in text.strip().split(";") if row.strip()]
        return cls(tuple(tuple(r) for r in rows))

    @classmethod
    def row(cls, *values: int) -> "TorusMatrix":
        return cls((tuple(values),))

    @property
    def k(self) -> int:
        return len(self.entries[0])

    @property
    def r(self) -> int:
        return len(self.entries)

    @property
    def rank(self) -> int:
        return _rank([list(r) for r in self.entries])

    @property
    def affine_type(self) -> bool:
        cols = list(zip(*self.entries))
        return all(x >= 0 for row in self.entries for x in row) and all(max(c) >= 1 for c in cols)

    @property
    def connected_type(self) -> bool:
        rk = self.rank
        if rk == 0:
            return True
        minors = (
            _det([[self.entries[i][j] for j in cols] for i in rows])
            for rows in itertools.combinations(range(self.r), rk)
            for cols in itertools.combinations(range(self.k), rk)
        )
        return reduce(gcd, (abs(m) for m in minors), 0) == 1

    def as_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=np.int64)


def subgroup_exponents(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Discrete logs of H_A(F_q): all e in (Z/(q-1))^k with A e = 0, one row each.

    k-1 coordinates are enumerated and the remaining one is solved from a
    single congruence, so the work is (q-1)^(k-1) times the number of
    solutions of that congruence.  The solved coordinate is the one whose
    congruence has the fewest solutions; rows come out in lexicographic order.
    """
    n = ctx.n
    full_a = A.as_array() % n

    def solutions(col):
        nz = full_a[:, col][full_a[:, col] != 0]
        return min((gcd(int(v), n) for v in nz), default=n)

    best = min(range(A.k), key=lambda col: (solutions(col), -col))
    if best == A.k - 1:
        return _exponents_solving_last(n, full_a, A, cap)
    order = [c for c in range(A.k) if c != best] + [best]
    perm = _exponents_solving_last(n, full_a[:, order], A, cap)
    out = np.empty_like(perm)
    out[:, order] = perm
    return out[np.lexsort(out.T[::-1])]


def _exponents_solving_last(n: int, a: np.ndarray, A: TorusMatrix, cap: int) -> np.ndarray:
    k = A.k
    last = a[:, -1]
    solving = np.flatnonzero(last)
    if solving.size:
        solving = solving[np.argsort([gcd(int(last[i]), n) for i in solving], kind="stable")]
    d = gcd(int(last[solving[0]]), n) if solving.size else n
    work = n ** (k - 1) * d
    if work > cap:
        raise TooLarge(f"enumerating H_A needs {work} candidates (cap {cap})")

    if k > 1:
        grids = np.meshgrid(*([np.arange(n, dtype=np.int64)] * (k - 1)), indexing="ij")
        prefix = np.stack([g.ravel() for g in grids], axis=1)
    else:
        prefix = np.zeros((1, 0), dtype=np.int64)
    partial = (prefix @ a[:, :-1].T) % n if k > 1 else np.zeros((1, A.r), dtype=np.int64)

    if solving.size == 0:
        ok = np.all(partial == 0, axis=1)
        prefix = prefix[ok]
        lastcoord = np.arange(n, dtype=np.int64)
        rep = np.repeat(prefix, n, axis=0)
        out = np.column_stack([rep, np.tile(lastcoord, len(prefix))])
        return out

    i0 = int(solving[0])
    c = int(last[i0])
    rhs = (-partial[:, i0]) % n
    ok = rhs % d == 0
    prefix, partial, rhs = prefix[ok], partial[ok], rhs[ok]
    m = n // d
    inv = pow(c // d, -1, m) if m > 1 else 0
    base = (rhs // d) * inv % m if m > 1 else np.zeros_like(rhs)
    cand = (base[:, None] + m * np.arange(d, dtype=np.int64)[None, :]).ravel()
    rep_prefix = np.repeat(prefix, d, axis=0)
    rep_partial = np.repeat(partial, d, axis=0)
    full = (rep_partial + cand[:, None] * a[:, -1][None, :]) % n
    keep = np.all(full == 0, axis=1)
    return np.column_stack([rep_prefix[keep], cand[keep]])


def subgroup_points(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    """All x in (F_q^x)^k with prod_j x_j**a[i][j] == 1 for every row, sorted."""
    res = ctx.gpow[subgroup_exponents(ctx, A, cap)]
    return sorted(tuple(int(v) for v in row) for row in res)


def subgroup_order(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> int:
    return len(subgroup_exponents(ctx, A, cap))

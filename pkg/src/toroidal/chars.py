"""Dirichlet characters modulo a prime, encoded by their index.

``Character(ctx, j)`` is the character with chi_j(g**k) = e(jk/(q-1)), where g
is the primitive root of the context.  Values are read from the context's
root-of-unity table, so a character costs O(1) memory.
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np

from .errors import TooLarge
from .field import FieldCtx
from .torus import DEFAULT_CAP, TorusMatrix, subgroup_exponents


class Character:
    __slots__ = ("ctx", "j")

    def __init__(self, ctx: FieldCtx, j: int):
        self.ctx = ctx
        self.j = int(j) % ctx.n

    def __repr__(self):
        return f"Character(q={self.ctx.q}, j={self.j})"

    def __eq__(self, other):
        return isinstance(other, Character) and (self.ctx.q, self.j) == (other.ctx.q, other.j)

    def __hash__(self):
        return hash((self.ctx.q, self.j))

    def __call__(self, x: int) -> complex:
        x = int(x) % self.ctx.q
        if x == 0:
            return 0j
        return complex(self.ctx.roots[(self.j * int(self.ctx.dlog[x])) % self.ctx.n])

    def values(self, xs) -> np.ndarray:
        """Vectorised evaluation; multiples of q map to 0."""
        xs = np.asarray(xs, dtype=np.int64) % self.ctx.q
        logs = self.ctx.dlog[xs]
        out = self.ctx.roots[(self.j * logs) % self.ctx.n]
        return np.where(xs == 0, 0, out)

    @property
    def parity(self) -> int:
        """t(chi) = (1 - chi(-1))/2, which equals j mod 2 for an odd prime q."""
        return self.j % 2

    @property
    def is_trivial(self) -> bool:
        return self.j == 0

    def __pow__(self, a: int) -> "Character":
        return Character(self.ctx, a * self.j)

    def __mul__(self, other: "Character") -> "Character":
        return Character(self.ctx, self.j + other.j)

    def conjugate(self) -> "Character":
        return Character(self.ctx, -self.j)

    def order(self) -> int:
        return self.ctx.n // gcd(self.j, self.ctx.n)


def characters(ctx: FieldCtx) -> list[Character]:
    return [Character(ctx, j) for j in range(ctx.n)]


def perp_indices(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Index tuples (j_1, ..., j_k) of the characters trivial on H_A(F_q).

    Brute filter: every candidate tuple is tested against every point of H_A.
    """
    n, k = ctx.n, A.k
    pts = subgroup_exponents(ctx, A, cap)
    budget = n ** k * len(pts)
    if budget > cap:
        raise TooLarge(f"perp enumeration needs {budget} checks (cap {cap})")
    cand = np.array(list(itertools.product(range(n), repeat=k)), dtype=np.int64)
    keep = np.ones(len(cand), dtype=bool)
    chunk = max(1, cap // max(1, len(pts)) // 4)
    for s in range(0, len(cand), chunk):
        block = cand[s:s + chunk]
        keep[s:s + chunk] = np.all((block @ pts.T) % n == 0, axis=1)
    return cand[keep]


def subgroup_perp(ctx: FieldCtx, A: TorusMatrix, cap: int = DEFAULT_CAP) -> list[tuple[Character, ...]]:
    """All character tuples whose product is trivial on H_A(F_q)."""
    return [tuple(Character(ctx, j) for j in row) for row in perp_indices(ctx, A, cap)]

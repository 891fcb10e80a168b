"""Prime field context: primality, primitive roots and discrete-log tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import gcd, isqrt

import numpy as np

from .errors import NotPrime, TooSmall, ZeroExponent

# Deterministic for every n < 3.3e24, which covers all 64-bit inputs.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin test for 64-bit integers."""
    if n < 2:
        return False
    for p in _MR_WITNESSES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    """Distinct prime factors of n by trial division."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primitive_root(q: int) -> int:
    """Smallest generator of (Z/qZ)^x for an odd prime q."""
    n = q - 1
    cofactors = [n // p for p in prime_factors(n)]
    g = 2
    while any(pow(g, c, q) == 1 for c in cofactors):
        g += 1
    return g


def primes_from(start: int, count: int, modulus: int = 1, residue: int = 0) -> list[int]:
    """The first `count` primes >= start that are congruent to residue mod modulus."""
    out = []
    n = max(start, 3)
    while len(out) < count:
        if n % modulus == residue % modulus and is_prime(n):
            out.append(n)
        n += 1
    return out


@dataclass(frozen=True, eq=False)
class FieldCtx:
    """Tables for F_q^x relative to a fixed primitive root g.

    ``dlog[x]`` is the discrete logarithm of x for 1 <= x < q (``dlog[0] = -1``),
    ``gpow[k] = g**k mod q`` and ``roots[k] = e(k/(q-1))``.
    """

    q: int
    g: int
    dlog: np.ndarray = field(repr=False)
    gpow: np.ndarray = field(repr=False)
    roots: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        """Order of the multiplicative group, q - 1."""
        return self.q - 1

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and other.q == self.q

    def __hash__(self):
        return hash(("FieldCtx", self.q))

    def log(self, x: int) -> int:
        x %= self.q
        if x == 0:
            raise ValueError("0 has no discrete logarithm")
        return int(self.dlog[x])

    def inverse(self, x: int) -> int:
        return pow(int(x), -1, self.q)


def _power_table(g: int, q: int) -> np.ndarray:
    n = q - 1
    block = isqrt(n) + 1
    small = np.empty(block, dtype=np.int64)
    acc = 1
    for i in range(block):
        small[i] = acc
        acc = acc * g % q
    step = acc  # g**block
    nblocks = -(-n // block)
    out = np.empty(nblocks * block, dtype=np.int64)
    lead = 1
    for b in range(nblocks):
        out[b * block:(b + 1) * block] = small * lead % q
        lead = lead * step % q
    return out[:n]


@lru_cache(maxsize=16)
def build_ctx(q: int) -> FieldCtx:
    """Build the field context for an odd prime q.

    Contexts are cached because they are immutable and rebuilding the
    tables dominates the cost of small queries.
    """
    q = int(q)
    if q < 3:
        raise TooSmall(f"modulus must be >= 3, got {q}")
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    g = primitive_root(q)
    gpow = _power_table(g, q)
    dlog = np.full(q, -1, dtype=np.int64)
    dlog[gpow] = np.arange(q - 1, dtype=np.int64)
    roots = np.exp(2j * np.pi * np.arange(q - 1) / (q - 1))
    for arr in (gpow, dlog, roots):
        arr.setflags(write=False)
    return FieldCtx(q=q, g=g, dlog=dlog, gpow=gpow, roots=roots)


def roots_of_unity(ctx: FieldCtx, d: int) -> list[int]:
    """Sorted list of the d-th roots of unity in F_q^x."""
    if d < 1:
        raise ValueError("d must be >= 1")
    e = gcd(d, ctx.n)
    step = ctx.n // e
    return sorted(int(ctx.gpow[k * step]) for k in range(e))


def power_residues(ctx: FieldCtx, a: int) -> set[int]:
    """The subgroup {x**a : x in F_q^x}; it only depends on gcd(|a|, q-1)."""
    if a == 0:
        raise ZeroExponent("exponent must be non-zero")
    e = gcd(abs(a), ctx.n)
    return {int(x) for x in ctx.gpow[::e]}

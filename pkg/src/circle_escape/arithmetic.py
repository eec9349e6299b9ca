"""Totient and Moebius sieves, Farey fractions, Dirichlet character tables."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class ArithmeticTables:
    """phi[n] and mu[n] for 0 <= n <= limit (index 0 is unused and holds 0)."""

    limit: int
    phi: np.ndarray
    mu: np.ndarray


def sieve_tables(limit: int) -> ArithmeticTables:
    """Eratosthenes-style sieve for Euler's totient and the Moebius function."""
    if limit < 1:
        raise DomainError(f"limit must be >= 1, got {limit}")
    try:
        phi = np.arange(limit + 1, dtype=np.int64)
        mu = np.ones(limit + 1, dtype=np.int8)
        is_prime = np.ones(limit + 1, dtype=bool)
    except (MemoryError, ValueError) as exc:
        raise MemoryError(f"cannot allocate sieve tables up to {limit}") from exc
    is_prime[:2] = False
    mu[0] = 0
    for p in range(2, limit + 1):
        if not is_prime[p]:
            continue
        if p * p <= limit:
            is_prime[p * p :: p] = False
        phi[p::p] -= phi[p::p] // p
        mu[p::p] *= -1
        if p * p <= limit:
            mu[p * p :: p * p] = 0
    phi.setflags(write=False)
    mu.setflags(write=False)
    return ArithmeticTables(limit=limit, phi=phi, mu=mu)


@lru_cache(maxsize=8)
def _cached_tables(rounded_limit: int) -> ArithmeticTables:
    return sieve_tables(rounded_limit)


def tables_up_to(limit: int) -> ArithmeticTables:
    """Shared tables covering at least ``limit``; sizes round up to powers of two."""
    rounded = 1 << max(6, int(limit).bit_length())
    return _cached_tables(rounded)


def farey_pairs(max_denominator: int) -> tuple[np.ndarray, np.ndarray]:
    """Numerators and denominators of the Farey fractions in (0, 1), increasing.

    Uses the next-term recurrence, so neighbours come out already reduced.
    """
    if max_denominator < 2:
        raise DomainError("max_denominator must be >= 2")
    n = max_denominator
    a, b, c, d = 0, 1, 1, n
    num, den = [], []
    while c < d:
        num.append(c)
        den.append(d)
        k = (n + b) // d
        a, b, c, d = c, d, k * c - a, k * d - b
    return np.array(num, dtype=np.int64), np.array(den, dtype=np.int64)


def farey_sequence(max_denominator: int) -> list[Fraction]:
    """Reduced fractions in (0, 1) with denominator <= max_denominator, increasing."""
    num, den = farey_pairs(max_denominator)
    return [Fraction(int(m), int(k)) for m, k in zip(num, den)]


def prime_factors(n: int) -> list[int]:
    """Distinct prime divisors of n, increasing."""
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    for p in prime_factors(n):
        k = 0
        while n % p == 0:
            n //= p
            k += 1
        out.append((p, k))
    return out


def _primitive_root(p: int, k: int) -> int:
    """Generator of (Z/p^k)^* for an odd prime p."""
    mod = p**k
    order = (p - 1) * p ** (k - 1)
    divs = prime_factors(order)
    for g in range(2, mod):
        if math.gcd(g, p) != 1:
            continue
        if all(pow(g, order // r, mod) != 1 for r in divs):
            return g
    raise AssertionError("no primitive root found")  # unreachable for odd p


def _cyclic_components(q: int) -> list[tuple[int, int, int]]:
    """Cyclic factors of (Z/q)^* as (modulus p^k, generator, order)."""
    comps = []
    for p, k in _factorize(q):
        mod = p**k
        if p == 2:
            if k == 2:
                comps.append((mod, 3, 2))
            elif k >= 3:
                comps.append((mod, mod - 1, 2))
                comps.append((mod, 5, 2 ** (k - 2)))
        else:
            comps.append((mod, _primitive_root(p, k), (p - 1) * p ** (k - 1)))
    return comps


def _discrete_logs(q: int, comps: list[tuple[int, int, int]]) -> np.ndarray:
    """logs[a, i] = exponent of a along component i (-1 where gcd(a, q) > 1)."""
    logs = np.full((q, len(comps)), -1, dtype=np.int64)
    if not comps:
        logs[:, :] = 0
        return logs
    per_comp = []
    for idx, (mod, g, order) in enumerate(comps):
        table = {}
        if mod % 8 == 0 and g == mod - 1:
            # the {+-1} factor of (Z/2^k)^*: sign of a modulo 4
            table = {x: (0 if x % 4 == 1 else 1) for x in range(1, mod, 2)}
        elif mod % 8 == 0:
            # the <5> factor: log_5 of +-a, whichever is 1 mod 4
            x = 1
            for e in range(order):
                table[x] = e
                table[mod - x] = e
                x = x * g % mod
        else:
            x = 1
            for e in range(order):
                table[x] = e
                x = x * g % mod
        per_comp.append(table)
    for a in range(q):
        if math.gcd(a, q) != 1:
            continue
        for idx, (mod, _, _) in enumerate(comps):
            logs[a, idx] = per_comp[idx][a % mod]
    return logs


@dataclass(frozen=True)
class DirichletCharacter:
    """One character mod q, stored as exact root-of-unity exponents.

    chi(a) = exp(2 pi i exponents[a] / order); exponents[a] == -1 marks chi(a) = 0.
    """

    modulus: int
    order: int
    exponents: np.ndarray = field(repr=False)
    label: tuple[int, ...] = ()

    def __call__(self, a: int) -> complex:
        return complex(self.values()[a % self.modulus])

    def values(self) -> np.ndarray:
        e = self.exponents
        v = np.exp(2j * np.pi * np.where(e >= 0, e, 0) / self.order)
        # quarter turns are exact units
        quarter = (4 * e) % self.order == 0
        exact = np.array([1, 1j, -1, -1j])[((4 * np.where(e >= 0, e, 0)) // self.order) % 4]
        v = np.where(quarter, exact, v)
        return np.where(e >= 0, v, 0.0)

    @property
    def is_trivial(self) -> bool:
        return bool(np.all(self.exponents[self.exponents >= 0] == 0))

    @property
    def parity(self) -> int:
        """chi(-1) as +1 or -1."""
        if self.modulus <= 2:
            return 1
        e = int(self.exponents[self.modulus - 1])
        return 1 if e == 0 else -1

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    def conj_exponent(self, a: int) -> int:
        e = int(self.exponents[a % self.modulus])
        return -1 if e < 0 else (-e) % self.order


@dataclass(frozen=True)
class CharacterTable:
    modulus: int
    characters: tuple[DirichletCharacter, ...]
    orders: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.characters)

    def __iter__(self):
        return iter(self.characters)

    def __getitem__(self, i: int) -> DirichletCharacter:
        return self.characters[i]

    def matrix(self) -> np.ndarray:
        """Complex values, shape (number of characters, modulus)."""
        return np.array([c.values() for c in self.characters])

    def orthogonality_sum(self, a: int, n: int) -> complex:
        """(1/phi(q)) * sum over chi of conj(chi(a)) chi(n)."""
        m = self.matrix()
        return complex(np.sum(np.conj(m[:, a % self.modulus]) * m[:, n % self.modulus]) / len(self))


@lru_cache(maxsize=256)
def character_table(q: int) -> CharacterTable:
    """All phi(q) Dirichlet characters mod q, trivial first.

    Characters are indexed by exponent vectors over the cyclic decomposition
    of (Z/q)^*, enumerated lexicographically.
    """
    if q < 1:
        raise DomainError(f"modulus must be >= 1, got {q}")
    comps = _cyclic_components(q)
    orders = tuple(c[2] for c in comps)
    order = math.lcm(*orders) if orders else 1
    logs = _discrete_logs(q, comps)
    units = np.array([math.gcd(a, q) == 1 for a in range(q)])
    chars = []
    for label in itertools.product(*(range(d) for d in orders)):
        exps = np.zeros(q, dtype=np.int64)
        for idx, j in enumerate(label):
            exps = exps + j * (order // orders[idx]) * logs[:, idx]
        exps = np.where(units, exps % order, -1)
        exps.setflags(write=False)
        chars.append(DirichletCharacter(modulus=q, order=order, exponents=exps, label=tuple(label)))
    return CharacterTable(modulus=q, characters=tuple(chars), orders=orders)

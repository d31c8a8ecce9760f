"""Modular arithmetic helpers: primality, powers, prime windows, primitive roots."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Deterministic Miller-Rabin witnesses; correct for every n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)

# Prime windows [Q/2, Q] are only guaranteed to be dense past this point.
Q0 = 1500


def is_prime(n: int) -> bool:
    """Deterministic primality test for integers below 2**64 (and well beyond)."""
    n = int(n)
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def mod_pow(base: int, exp: int, q: int) -> int:
    """base**exp mod q with the result in [0, q)."""
    if q < 1:
        raise ValueError("modulus must be positive")
    if exp < 0:
        raise ValueError("negative exponent")
    return pow(int(base), int(exp), int(q))


def mod_inverse(a: int, q: int) -> int:
    return pow(int(a), -1, int(q))


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi, ascending."""
    lo, hi = max(int(lo), 2), int(hi)
    if hi < lo:
        return []
    if hi <= 50_000_000:
        sieve = np.ones(hi + 1, dtype=bool)
        sieve[:2] = False
        for p in range(2, math.isqrt(hi) + 1):
            if sieve[p]:
                sieve[p * p :: p] = False
        return [int(p) for p in np.flatnonzero(sieve[lo:]) + lo]
    return [p for p in range(lo, hi + 1) if is_prime(p)]


@dataclass(frozen=True)
class PrimeWindow:
    Q: int
    primes: tuple[int, ...]
    floor: float  # (1/4) Q / log Q
    dense: bool  # count meets the floor

    @property
    def count(self) -> int:
        return len(self.primes)


def prime_window(Q: int) -> PrimeWindow:
    """Primes in [Q/2, Q] together with the density check against Q/(4 log Q)."""
    primes = tuple(primes_in_range(math.ceil(Q / 2), Q))
    floor = Q / (4 * math.log(Q))
    return PrimeWindow(Q, primes, floor, len(primes) >= floor)


def factorize_small(n: int) -> list[int]:
    """Distinct prime factors by trial division. Only meant for n up to ~1e12."""
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out.append(n)
    return out


def primitive_root(q: int) -> int:
    if not is_prime(q):
        raise ValueError(f"{q} is not prime")
    if q == 2:
        return 1
    factors = factorize_small(q - 1)
    for g in range(2, q):
        if all(pow(g, (q - 1) // f, q) != 1 for f in factors):
            return g
    raise AssertionError("no primitive root found")


def power_table(g: int, q: int) -> np.ndarray:
    """g**e mod q for e = 0 .. q-2, vectorised in blocks."""
    size = q - 1
    block = max(1, math.isqrt(size) + 1)
    head = np.empty(block, dtype=np.int64)
    acc = 1
    for i in range(block):
        head[i] = acc
        acc = acc * g % q
    step = acc  # g**block
    rows = -(-size // block)
    starts = np.empty(rows, dtype=np.int64)
    acc = 1
    for i in range(rows):
        starts[i] = acc
        acc = acc * step % q
    table = (starts[:, None] * head[None, :]) % q
    return table.reshape(-1)[:size]


def discrete_logs(q: int) -> tuple[int, np.ndarray]:
    """Primitive root g and an array log with g**log[a] = a for 1 <= a < q."""
    g = primitive_root(q)
    logs = np.full(q, -1, dtype=np.int64)
    logs[power_table(g, q)] = np.arange(q - 1, dtype=np.int64)
    return g, logs

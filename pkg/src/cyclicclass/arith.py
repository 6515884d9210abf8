"""Exact integer arithmetic: primality, factorization, orders and geometric sums.

Everything here is a pure function of its arguments.  Randomized steps
(Miller-Rabin bases above 2**64, Pollard rho parameters) are drawn from a
generator seeded with the input itself, so results are reproducible.
"""

from __future__ import annotations

import math
import os
import random
import time
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CyclicClassError

__all__ = [
    "Factorization",
    "FactorizationTimeout",
    "NotCoprime",
    "BUDGET_ENV_VAR",
    "DEFAULT_BUDGET_MS",
    "is_prime",
    "factorize",
    "pow_mod",
    "multiplicative_order",
    "euler_phi",
    "geometric_sum_mod",
    "p_adic_valuation",
    "odd_prime_divisors",
]

BUDGET_ENV_VAR = "CYCLICCLASS_FACTOR_BUDGET_MS"
DEFAULT_BUDGET_MS = 60_000

TRIAL_LIMIT = 10**6
# Deterministic for n < 3.3 * 10**24, which covers the 2**64 requirement.
_DETERMINISTIC_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981
_PROBABILISTIC_ROUNDS = 64


class FactorizationTimeout(CyclicClassError):
    """The effort budget ran out before the factorization was complete.

    ``partial`` holds the prime factors found so far and ``cofactor`` the
    unfactored composite remainder; neither is ever presented as complete.
    """

    def __init__(self, n: int, partial: dict[int, int], cofactor: int, budget_ms: int):
        self.n = n
        self.partial = dict(partial)
        self.cofactor = cofactor
        self.budget_ms = budget_ms
        super().__init__(
            f"could not factor {n} within {budget_ms} ms (composite cofactor {cofactor} remains)"
        )


class NotCoprime(CyclicClassError):
    pass


def _sieve(limit: int) -> tuple[int, ...]:
    flags = bytearray([1]) * (limit + 1)
    flags[0:2] = b"\x00\x00"
    for i in range(2, math.isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return tuple(i for i, f in enumerate(flags) if f)


_SMALL_PRIMES = _sieve(TRIAL_LIMIT)
_TINY_PRIMES = _SMALL_PRIMES[:100]


def _strong_probable_prime(n: int, base: int, d: int, s: int) -> bool:
    x = pow(base, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int) -> bool:
    """Miller-Rabin; exact below 3.3e24, error < 2**-128 above."""
    if n < 2:
        return False
    for p in _TINY_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    if n < _DETERMINISTIC_LIMIT:
        bases: Iterable[int] = _DETERMINISTIC_BASES
    else:
        rng = random.Random(n)
        bases = [rng.randrange(2, n - 1) for _ in range(_PROBABILISTIC_ROUNDS)]
    return all(_strong_probable_prime(n, a, d, s) for a in bases)


@dataclass(frozen=True)
class Factorization:
    """A positive integer together with its prime factorization.

    ``factors`` is a tuple of ``(prime, exponent)`` pairs with strictly
    increasing primes.  Construction validates the invariants.
    """

    value: int
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if self.value < 1:
            raise ValueError(f"factorization value must be positive, got {self.value}")
        product = 1
        previous = 1
        for p, e in self.factors:
            if p <= previous:
                raise ValueError(f"primes must be strictly increasing: {self.factors}")
            if e < 1:
                raise ValueError(f"exponent of {p} must be >= 1")
            if not is_prime(p):
                raise ValueError(f"{p} is not prime")
            product *= p**e
            previous = p
        if product != self.value:
            raise ValueError(f"factors multiply to {product}, not {self.value}")

    @classmethod
    def from_dict(cls, exponents: dict[int, int]) -> "Factorization":
        factors = tuple(sorted((p, e) for p, e in exponents.items() if e))
        value = 1
        for p, e in factors:
            value *= p**e
        return cls(value, factors)

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.factors)

    def __len__(self) -> int:
        return len(self.factors)

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return " * ".join(f"{p}^{e}" if e > 1 else str(p) for p, e in self.factors)


def _budget_from_env() -> int:
    raw = os.environ.get(BUDGET_ENV_VAR)
    if not raw:
        return DEFAULT_BUDGET_MS
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{BUDGET_ENV_VAR} must be an integer number of milliseconds, got {raw!r}")
    if value <= 0:
        raise ValueError(f"{BUDGET_ENV_VAR} must be positive, got {value}")
    return value


def _brent(n: int, rng: random.Random, deadline: float) -> int | None:
    """One Pollard-Brent attempt; returns a nontrivial factor or None."""
    y = rng.randrange(1, n)
    c = rng.randrange(1, n)
    m = 128
    g = r = q = 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % n
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(m, r - k)):
                y = (y * y + c) % n
                q = q * abs(x - y) % n
            g = math.gcd(q, n)
            k += m
        r *= 2
        if time.monotonic() > deadline:
            return None
    if g == n:
        # backtrack one step at a time
        while True:
            ys = (ys * ys + c) % n
            g = math.gcd(abs(x - ys), n)
            if g > 1:
                break
    return g if g != n else None


def factorize(n: int, budget_ms: int | None = None) -> Factorization:
    """Complete prime factorization of ``n >= 1``.

    Trial division by primes below 10**6, then Pollard-Brent rho with a
    restart sequence seeded from ``n``.  ``budget_ms`` (default from the
    ``CYCLICCLASS_FACTOR_BUDGET_MS`` environment variable, else 60 s) bounds
    the wall-clock effort; on exhaustion :class:`FactorizationTimeout` is
    raised with the partial result attached.
    """
    if n < 1:
        raise ValueError(f"can only factor positive integers, got {n}")
    if budget_ms is None:
        budget_ms = _budget_from_env()
    deadline = time.monotonic() + budget_ms / 1000.0
    found: dict[int, int] = {}
    m = n
    for i, p in enumerate(_SMALL_PRIMES):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
        if i % 2048 == 2047 and is_prime(m):
            break
    stack = [m] if m > 1 else []
    while stack:
        c = stack.pop()
        if c == 1:
            continue
        if is_prime(c):
            found[c] = found.get(c, 0) + 1
            continue
        root = math.isqrt(c)
        if root * root == c:
            stack.extend((root, root))
            continue
        rng = random.Random(c)
        d = None
        while d is None:
            if time.monotonic() > deadline:
                remaining = c
                for other in stack:
                    remaining *= other
                raise FactorizationTimeout(n, found, remaining, budget_ms)
            d = _brent(c, rng, deadline)
        stack.extend((d, c // d))
    return Factorization.from_dict(found)


def pow_mod(base: int, exp: int, modulus: int) -> int:
    if modulus < 2:
        raise ValueError(f"modulus must be >= 2, got {modulus}")
    if exp < 0:
        raise ValueError(f"exponent must be non-negative, got {exp}")
    return pow(base, exp, modulus)


def _carmichael(f: Factorization) -> int:
    lam = 1
    for p, e in f:
        if p == 2 and e >= 3:
            part = 2 ** (e - 2)
        else:
            part = (p - 1) * p ** (e - 1)
        lam = lam * part // math.gcd(lam, part)
    return lam


def multiplicative_order(a: int, m: int) -> int:
    """Smallest e >= 1 with a**e == 1 (mod m)."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if math.gcd(a, m) != 1:
        raise NotCoprime(f"gcd({a}, {m}) != 1")
    order = _carmichael(factorize(m))
    for q, _ in factorize(order):
        while order % q == 0 and pow(a, order // q, m) == 1:
            order //= q
    return order


def euler_phi(f: Factorization) -> int:
    result = 1
    for p, e in f:
        result *= (p - 1) * p ** (e - 1)
    return result


def _sum_and_power(alpha: int, g: int, m: int) -> tuple[int, int]:
    # (1 + a + ... + a^(g-1), a^g) mod m by halving g
    if g == 0:
        return 0, 1 % m
    s, p = _sum_and_power(alpha, g // 2, m)
    s, p = (s + s * p) % m, p * p % m
    if g % 2:
        s, p = (s + p) % m, p * alpha % m
    return s, p


def geometric_sum_mod(alpha: int, g: int, m: int) -> int:
    """1 + alpha + ... + alpha**(g-1) modulo m, without forming the sum."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    if g < 0:
        raise ValueError(f"number of terms must be non-negative, got {g}")
    a = alpha % m
    if a == 1:
        return g % m
    if math.gcd(a - 1, m) == 1:
        return (pow(a, g, m) - 1) * pow(a - 1, -1, m) % m
    return _sum_and_power(a, g, m)[0]


def p_adic_valuation(n: int, p: int) -> int:
    if n < 1:
        raise ValueError(f"valuation needs n >= 1, got {n}")
    if p < 2:
        raise ValueError(f"valuation needs a prime, got {p}")
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def odd_prime_divisors(f: Factorization) -> tuple[int, ...]:
    return tuple(p for p in f.primes if p != 2)

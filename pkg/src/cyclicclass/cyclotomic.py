"""The t1 construction and its class-number divisibility prediction.

For a prime p > 3 and coprime nonzero a, b with p not dividing ab(a+b),
put ``t1 = (a^p + b^p) / (a + b)`` and ``n = p * t1``.  Every prime
factor q of t1 is 1 mod p, and the class number of Q(zeta_n) is then
predicted to be divisible by p.  Nothing here computes class numbers;
predictions are checked against tabulated values supplied by the caller.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .arith import (
    Factorization,
    FactorizationTimeout,
    euler_phi,
    factorize,
    is_prime,
    p_adic_valuation,
)
from .errors import CyclicClassError

__all__ = [
    "CongruenceCheck",
    "CycloInstance",
    "Decomposition",
    "RamificationProfile",
    "HypothesisViolation",
    "LemmaViolation",
    "CongruenceNotSatisfied",
    "build_instance",
    "check_lemma_congruence",
    "ramification_profile",
    "verify_prediction",
]


class HypothesisViolation(CyclicClassError):
    pass


class LemmaViolation(CyclicClassError):
    """A prime factor of t1 is not 1 mod p.  This should be impossible."""

    def __init__(self, q: int, p: int):
        super().__init__(f"prime factor {q} of t1 is {q % p} mod {p}, expected 1")
        self.q = q
        self.p = p


class CongruenceNotSatisfied(CyclicClassError):
    pass


@dataclass(frozen=True)
class CongruenceCheck:
    q: int
    q_mod_p: int
    passed: bool


@dataclass(frozen=True)
class CycloInstance:
    p: int
    a: int
    b: int
    t1: int
    n: int
    t1_factors: Factorization | None
    phi_n: int | None
    p_valuation_of_phi: int | None
    congruence_checks: tuple[CongruenceCheck, ...]
    n_is_odd: bool

    @property
    def complete(self) -> bool:
        """Whether t1 was fully factored (and so every check ran)."""
        return self.t1_factors is not None

    @property
    def p_th_power_ideal(self) -> bool:
        """(a + zeta_p b) generates a p-th power ideal in Z[zeta_n].

        Derived from the verified congruences only; no ideal arithmetic.
        """
        return self.complete and all(c.passed for c in self.congruence_checks)

    @property
    def prediction(self) -> str:
        return f"{self.p} | h_{self.n}"


def check_lemma_congruence(t1_factors: Factorization, p: int) -> list[CongruenceCheck]:
    return [CongruenceCheck(q, q % p, q % p == 1) for q in t1_factors.primes]


def build_instance(p: int, a: int, b: int, budget_ms: int | None = None) -> CycloInstance:
    """Build and validate the construction for (p, a, b).

    Raises :class:`HypothesisViolation` when an input condition fails and
    :class:`LemmaViolation` if a prime factor of t1 is not 1 mod p.  If t1
    cannot be factored within the budget the instance is still returned,
    with ``t1_factors`` and the phi data set to None.
    """
    if p <= 3 or not is_prime(p):
        raise HypothesisViolation(f"p must be a prime > 3, got {p}")
    if a == 0 or b == 0:
        raise HypothesisViolation("a and b must be nonzero")
    if a + b == 0:
        raise HypothesisViolation("a + b must be nonzero")
    if math.gcd(a, b) != 1:
        raise HypothesisViolation(f"a={a} and b={b} are not coprime")
    if (a * b * (a + b)) % p == 0:
        raise HypothesisViolation(f"ab(a+b) = {a * b * (a + b)} is divisible by p={p}")
    t1, rem = divmod(a**p + b**p, a + b)
    if rem:
        raise AssertionError(f"(a^p + b^p) not divisible by (a + b) for p={p}, a={a}, b={b}")
    if t1 <= 1:
        raise HypothesisViolation(f"t1 = {t1} must exceed 1")
    n = p * t1
    try:
        factors: Factorization | None = factorize(t1, budget_ms)
    except FactorizationTimeout:
        factors = None
    checks: tuple[CongruenceCheck, ...] = ()
    phi = valuation = None
    if factors is not None:
        checks = tuple(check_lemma_congruence(factors, p))
        for c in checks:
            if not c.passed:
                raise LemmaViolation(c.q, p)
        # p does not divide t1, so n factors as p * t1 with coprime parts
        phi = (p - 1) * euler_phi(factors)
        valuation = p_adic_valuation(phi, p)
        if valuation < 1:
            raise AssertionError(f"phi({n}) = {phi} is not divisible by {p}")
    return CycloInstance(
        p=p,
        a=a,
        b=b,
        t1=t1,
        n=n,
        t1_factors=factors,
        phi_n=phi,
        p_valuation_of_phi=valuation,
        congruence_checks=checks,
        n_is_odd=n % 2 == 1,
    )


@dataclass(frozen=True)
class Decomposition:
    """Splitting of q in one field: ``count`` primes of residue degree f, index e."""

    field_degree: int
    count: int
    f: int
    e: int

    @property
    def consistent(self) -> bool:
        return self.count * self.f * self.e == self.field_degree


@dataclass(frozen=True)
class RamificationProfile:
    p: int
    q: int
    in_q_field: Decomposition
    in_p_field: Decomposition
    in_pq_field: Decomposition

    @property
    def rows(self) -> tuple[Decomposition, ...]:
        return (self.in_q_field, self.in_p_field, self.in_pq_field)


def ramification_profile(p: int, q: int) -> RamificationProfile:
    """How q decomposes in Q(zeta_q), Q(zeta_p) and Q(zeta_pq) when q ≡ 1 mod p."""
    if not (is_prime(p) and is_prime(q)):
        raise ValueError(f"p={p} and q={q} must both be prime")
    if q % p != 1:
        raise CongruenceNotSatisfied(f"{q} is not 1 mod {p}")
    profile = RamificationProfile(
        p=p,
        q=q,
        in_q_field=Decomposition(q - 1, 1, 1, q - 1),
        in_p_field=Decomposition(p - 1, p - 1, 1, 1),
        in_pq_field=Decomposition((p - 1) * (q - 1), p - 1, 1, q - 1),
    )
    for row in profile.rows:
        if not row.consistent:
            raise AssertionError(f"count*f*e != degree in {row}")
    return profile


def verify_prediction(instance: CycloInstance, class_number: int, *, relative: bool = True) -> bool:
    """Whether a tabulated class number is divisible by p.

    ``relative`` marks the value as h^- rather than h; divisibility of h^-
    implies divisibility of h, so both are accepted.
    """
    if class_number < 1:
        raise ValueError(f"class number must be positive, got {class_number}")
    return class_number % instance.p == 0

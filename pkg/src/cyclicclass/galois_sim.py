"""Brute-force model of a generator acting on a cyclic class subgroup.

If the subgroup of order ``hi`` inside a cyclic ``hi``-component is
generated by the class of ``s``, the generator sigma of the Galois group
sends ``Cl(s)`` to ``Cl(s)**alpha`` for some ``alpha`` in ``[1, hi-1]``.
The norm of ``s`` is principal, so ``1 + alpha + ... + alpha**(g-1)``
must vanish mod ``hi``.  This module enumerates those ``alpha`` directly
and sorts each one into the case that governs it.

Nothing here calls the closed forms in :mod:`cyclicclass.arith`; the
enumeration is the independent side of the classifier cross-check.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import CyclicClassError

__all__ = [
    "ActionInstance",
    "ProofCase",
    "InfeasibleAction",
    "DegreeOdd",
    "feasible_alphas",
    "orbit_classes",
    "case_of",
    "norm_to_quadratic",
]


class InfeasibleAction(CyclicClassError):
    """The exponent does not satisfy the norm relation."""


class DegreeOdd(CyclicClassError):
    pass


class ProofCase(enum.Enum):
    DEGREE = "degree"
    VANDIVER_ODD = "vandiver_odd"
    VANDIVER_EVEN = "vandiver_even"
    MINUS_ONE = "minus_one"


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _norm_exponent(alpha: int, g: int, hi: int) -> int:
    total = 0
    term = 1
    for _ in range(g):
        total = (total + term) % hi
        term = term * alpha % hi
    return total


@dataclass(frozen=True)
class ActionInstance:
    g: int
    hi: int
    alpha: int

    def __post_init__(self) -> None:
        if self.g < 1:
            raise ValueError(f"degree must be positive, got {self.g}")
        if not _is_prime(self.hi):
            raise ValueError(f"hi must be a prime, got {self.hi}")
        if not 1 <= self.alpha <= self.hi - 1:
            raise ValueError(f"alpha must lie in [1, {self.hi - 1}], got {self.alpha}")
        if _norm_exponent(self.alpha, self.g, self.hi) != 0:
            raise InfeasibleAction(
                f"1 + a + ... + a^(g-1) != 0 mod {self.hi} for a={self.alpha}, g={self.g}"
            )


def feasible_alphas(g: int, hi: int) -> tuple[int, ...]:
    """Every alpha in [1, hi-1] whose norm exponent vanishes mod hi."""
    if g < 1:
        raise ValueError(f"degree must be positive, got {g}")
    if not _is_prime(hi):
        raise ValueError(f"hi must be a prime, got {hi}")
    return tuple(a for a in range(1, hi) if _norm_exponent(a, g, hi) == 0)


def orbit_classes(instance: ActionInstance) -> list[int]:
    """Exponents e_i with Cl(sigma^i(s)) = Cl(s)^e_i, for i = 0..g-1."""
    out = []
    e = 1
    for _ in range(instance.g):
        out.append(e)
        e = e * instance.alpha % instance.hi
    return out


def case_of(instance: ActionInstance) -> ProofCase:
    g, hi, alpha = instance.g, instance.hi, instance.alpha
    if alpha == 1:
        return ProofCase.DEGREE
    if g % 2:
        return ProofCase.VANDIVER_ODD
    if alpha == hi - 1:
        return ProofCase.MINUS_ONE
    return ProofCase.VANDIVER_EVEN


def norm_to_quadratic(instance: ActionInstance) -> int:
    """Exponent of Cl(s) in the class of the relative norm down to the quadratic subfield.

    The norm is the product of sigma^(2i)(s) for i < g/2.  A nonzero
    result means that norm is not principal.
    """
    if instance.g % 2:
        raise DegreeOdd(f"degree {instance.g} has no quadratic subfield")
    square = instance.alpha * instance.alpha % instance.hi
    return _norm_exponent(square, instance.g // 2, instance.hi)

"""Minkowski bounds and class-number upper bounds, rounded upward.

Values are computed with mpmath interval arithmetic at 128 bits and the
upper endpoint is rounded up to a float, so every returned number is a
certified upper bound of the exact real expression.  Gates of the form
``h_i > bound`` compared against these floats are therefore conservative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from mpmath import libmp
from mpmath.ctx_iv import MPIntervalContext

from .arith import is_prime
from .errors import CyclicClassError

__all__ = [
    "FieldShape",
    "BoundReport",
    "QuadraticBound",
    "NotOddPrime",
    "LEMMA_THRESHOLD",
    "IMAGINARY_QUADRATIC_THRESHOLD",
    "minkowski_bound",
    "class_number_upper_bound",
    "quadratic_class_bound",
    "quadratic_subfield_discriminant",
]

WORKING_PRECISION = 128
LEMMA_THRESHOLD = 17
IMAGINARY_QUADRATIC_THRESHOLD = 3000

# Private context so the global mpmath precision is never touched.
iv = MPIntervalContext()
iv.prec = WORKING_PRECISION


class NotOddPrime(CyclicClassError):
    pass


@dataclass(frozen=True)
class FieldShape:
    """Degree, number of complex places and absolute discriminant of a field."""

    degree: int
    r2: int
    abs_discriminant: int

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise ValueError(f"degree must be positive, got {self.degree}")
        if self.r2 < 0 or self.degree - 2 * self.r2 < 0:
            raise ValueError(f"r2={self.r2} impossible for degree {self.degree}")
        if self.abs_discriminant < 1:
            raise ValueError(f"discriminant must be >= 1, got {self.abs_discriminant}")

    @property
    def r1(self) -> int:
        return self.degree - 2 * self.r2


@dataclass(frozen=True)
class BoundReport:
    minkowski_bound: float
    class_number_bound: float
    applicable: bool


@dataclass(frozen=True)
class QuadraticBound:
    value: float
    precondition_met: bool


def _ceil_float(x) -> float:
    """Round the upper endpoint of an interval up to the next float."""
    return libmp.to_float(x._mpi_[1], rnd=libmp.round_ceiling)


def _log(x):
    # The bound is read with the natural logarithm; swap here to change base.
    return iv.log(x)


def _minkowski_interval(shape: FieldShape):
    n = shape.degree
    factor = iv.mpf(math.factorial(n)) / iv.mpf(n) ** n
    if shape.r2:
        factor = factor * (iv.mpf(4) / iv.pi) ** shape.r2
    return factor * iv.sqrt(iv.mpf(shape.abs_discriminant))


def minkowski_bound(shape: FieldShape) -> float:
    """Upper bound on (4/pi)^r2 * n!/n^n * sqrt(D)."""
    return _ceil_float(_minkowski_interval(shape))


def class_number_upper_bound(shape: FieldShape) -> BoundReport:
    """B and H = B * (2 ln B)^n, with ``applicable`` set when B > 17.

    H is always computed; outside the B > 17 range it is not a proven
    bound and callers must check ``applicable``.
    """
    b = _minkowski_interval(shape)
    h = b * (2 * _log(b)) ** shape.degree
    b_up = _ceil_float(b)
    h_up = _ceil_float(h)
    # applicable only when even the lower endpoint clears the threshold
    applicable = libmp.mpf_gt(b._mpi_[0], libmp.from_int(LEMMA_THRESHOLD))
    return BoundReport(b_up, h_up, bool(applicable))


def quadratic_class_bound(d2: int, imaginary: bool) -> QuadraticBound:
    """sqrt(D2) for real fields, sqrt(D2)*(ln D2)^2 for imaginary ones.

    The imaginary bound is only established for D2 > 3000; below that the
    same formula is returned with ``precondition_met`` False.
    """
    d2 = abs(d2)
    if imaginary:
        if d2 < 3:
            raise ValueError(f"imaginary quadratic discriminant must be >= 3, got {d2}")
        value = iv.sqrt(iv.mpf(d2)) * _log(iv.mpf(d2)) ** 2
        return QuadraticBound(_ceil_float(value), d2 > IMAGINARY_QUADRATIC_THRESHOLD)
    if d2 < 5:
        raise ValueError(f"real quadratic discriminant must be >= 5, got {d2}")
    return QuadraticBound(_ceil_float(iv.sqrt(iv.mpf(d2))), True)


def quadratic_subfield_discriminant(p: int) -> int:
    """Discriminant of the quadratic subfield of Q(zeta_p): +p or -p."""
    if p == 2 or not is_prime(p):
        raise NotOddPrime(f"{p} is not an odd prime")
    return p if p % 4 == 1 else -p


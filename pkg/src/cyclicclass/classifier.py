"""Case analysis for a prime factor of the class number of a cyclic field.

Let K/Q be cyclic of degree g with 4 not dividing g, and let hi be a prime
factor of the class number whose hi-component is cyclic.  Then at least
one of the following holds:

* ``g ≡ 0 (mod hi)``                                   (:class:`DividesDegree`)
* ``hi ≡ 1 (mod q)`` for some odd prime q dividing g    (:class:`CongruenceWitness`)
* g is even and hi divides the class number of the
  quadratic subfield                                   (:class:`QuadraticSubfield`)

The branches are not exclusive, so every case that holds is reported.  If
none holds, the hi-component cannot be cyclic, which is how non-cyclicity
is inferred when the structure is unknown.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Union

from .arith import Factorization, factorize, odd_prime_divisors
from .bounds import FieldShape, class_number_upper_bound
from .errors import CyclicClassError

__all__ = [
    "Structure",
    "QuadStatus",
    "DividesDegree",
    "CongruenceWitness",
    "QuadraticSubfield",
    "Case",
    "QuadraticData",
    "IntermediateField",
    "ExtensionProfile",
    "Refinement",
    "FullRefinement",
    "Verdict",
    "ClassifierError",
    "DegreeViolatesGammaConstraint",
    "PrimeNotFactorOfH",
    "DegreeNotOdd",
    "InvalidIntermediateField",
    "NoIntermediateFieldData",
    "IncompleteIntermediateData",
    "BoundNotExceeded",
    "make_profile",
    "effective_structure",
    "classify_prime",
    "classify_all",
    "infer_noncyclic",
    "apply_bound_refinement",
    "apply_full_refinement",
    "classify_odd_degree",
]


class ClassifierError(CyclicClassError):
    pass


class DegreeViolatesGammaConstraint(ClassifierError):
    """The degree is divisible by 4, outside the scope of the case analysis."""


class PrimeNotFactorOfH(ClassifierError):
    pass


class DegreeNotOdd(ClassifierError):
    pass


class InvalidIntermediateField(ClassifierError):
    pass


class NoIntermediateFieldData(ClassifierError):
    pass


class IncompleteIntermediateData(ClassifierError):
    pass


class BoundNotExceeded(ClassifierError):
    """The prime does not exceed the class-number bound of any usable subfield.

    The unrefined verdict is attached as ``verdict``.
    """

    def __init__(self, message: str, verdict: "Verdict"):
        super().__init__(message)
        self.verdict = verdict


class Structure(enum.Enum):
    CYCLIC = "Cyclic"
    NONCYCLIC = "NonCyclic"
    UNKNOWN = "Unknown"


class QuadStatus(enum.Enum):
    CONFIRMED = "confirmed"
    UNVERIFIABLE = "unverifiable"
    REFUTED = "refuted"


@dataclass(frozen=True)
class DividesDegree:
    @property
    def label(self) -> str:
        return "degree"


@dataclass(frozen=True)
class CongruenceWitness:
    witnesses: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.witnesses:
            raise ValueError("a congruence witness needs at least one prime")

    @property
    def label(self) -> str:
        return "witness:" + ",".join(map(str, self.witnesses))


@dataclass(frozen=True)
class QuadraticSubfield:
    status: QuadStatus

    @property
    def label(self) -> str:
        return f"quadratic:{self.status.value}"


Case = Union[DividesDegree, CongruenceWitness, QuadraticSubfield]


@dataclass(frozen=True)
class QuadraticData:
    """What is known about the class number of the quadratic subfield.

    Either the exact ``class_number`` or only a set of primes known to
    divide it.  Only an exact value can refute the quadratic case.
    """

    discriminant: int
    class_number: int | None = None
    known_divisors: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if self.discriminant in (0, 1):
            raise ValueError(f"{self.discriminant} is not a quadratic discriminant")
        if self.class_number is not None and self.class_number < 1:
            raise ValueError(f"class number must be positive, got {self.class_number}")
        object.__setattr__(self, "known_divisors", frozenset(self.known_divisors))

    @property
    def imaginary(self) -> bool:
        return self.discriminant < 0

    def status_for(self, hi: int) -> QuadStatus:
        if self.class_number is not None:
            return QuadStatus.CONFIRMED if self.class_number % hi == 0 else QuadStatus.REFUTED
        if hi in self.known_divisors:
            return QuadStatus.CONFIRMED
        return QuadStatus.UNVERIFIABLE


@dataclass(frozen=True)
class IntermediateField:
    """Subfield of degree ``degree`` with its absolute discriminant.

    ``r2`` may be left out; it is then taken as 0 for odd degree or a
    totally real parent and as ``degree // 2`` otherwise, which can only
    enlarge the bound.
    """

    degree: int
    abs_discriminant: int
    r2: int | None = None


@dataclass(frozen=True)
class ExtensionProfile:
    degree: Factorization
    class_number: Factorization
    structure: Mapping[int, Structure] = field(default_factory=dict)
    quadratic: QuadraticData | None = None
    intermediate_fields: tuple[IntermediateField, ...] = ()
    totally_real: bool | None = None

    def __post_init__(self) -> None:
        h = self.class_number.value
        for p, s in self.structure.items():
            if not isinstance(s, Structure):
                raise ValueError(f"structure of {p} must be a Structure, got {s!r}")
            if h % p:
                raise ValueError(f"structure given for {p}, which does not divide h={h}")
        g = self.degree.value
        if self.quadratic is not None and g % 2:
            raise ValueError(f"odd degree {g} has no quadratic subfield")
        for sub in self.intermediate_fields:
            d = sub.degree
            if d < 1 or d >= g or g % d or math.gcd(d, g // d) != 1:
                raise InvalidIntermediateField(
                    f"subfield degree {d} must be a proper divisor of {g} coprime to {g}/{d}"
                )
            if sub.abs_discriminant < 1:
                raise InvalidIntermediateField("subfield discriminant must be positive")

    @property
    def g(self) -> int:
        return self.degree.value


@dataclass(frozen=True)
class Refinement:
    """Result of the single-subfield bound refinement."""

    d: int
    restricted_witnesses: tuple[int, ...]
    class_bound: float


@dataclass(frozen=True)
class FullRefinement:
    """Result of requiring every odd prime of g to be a witness.

    ``mod_g_holds`` records whether ``hi ≡ 1 (mod g)``; it is advisory only,
    the enforced statement is the congruence modulo ``odd_radical``.
    """

    odd_radical: int
    radical_holds: bool
    mod_g_holds: bool
    class_bounds: tuple[tuple[int, float], ...]


@dataclass(frozen=True)
class Verdict:
    prime: int
    cases: tuple[Case, ...]
    contradiction: bool
    structure: Structure
    applicable: bool = True
    inferred_noncyclic: bool = False
    refinement: Refinement | None = None
    full_refinement: FullRefinement | None = None
    prime_degree_form: str | None = None

    @property
    def admissible(self) -> tuple[Case, ...]:
        return tuple(
            c
            for c in self.cases
            if not (isinstance(c, QuadraticSubfield) and c.status is QuadStatus.REFUTED)
        )

    def labels(self) -> list[str]:
        """Labels of the admissible cases, in a fixed order."""
        return [c.label for c in self.admissible]

    def has(self, kind: type) -> bool:
        return any(isinstance(c, kind) for c in self.admissible)

    def witnesses(self) -> tuple[int, ...]:
        for c in self.admissible:
            if isinstance(c, CongruenceWitness):
                return c.witnesses
        return ()


def _as_factorization(n: int | Factorization) -> Factorization:
    return n if isinstance(n, Factorization) else factorize(n)


def make_profile(
    g: int | Factorization,
    class_factors: int | Factorization | Iterable[int],
    *,
    cyclic: Iterable[int] = (),
    noncyclic: Iterable[int] = (),
    quad_disc: int | None = None,
    quad_h: int | None = None,
    quad_divisors: Iterable[int] = (),
    subfields: Iterable[IntermediateField | tuple[int, int]] = (),
    totally_real: bool | None = None,
) -> ExtensionProfile:
    """Build a profile from plain integers.

    ``class_factors`` may be the class number itself or a list of factors
    (composite entries are factored and merged).
    """
    if isinstance(class_factors, (int, Factorization)):
        h = _as_factorization(class_factors)
    else:
        merged: dict[int, int] = {}
        for f in class_factors:
            for p, e in _as_factorization(f):
                merged[p] = merged.get(p, 0) + e
        h = Factorization.from_dict(merged)
    structure = {p: Structure.CYCLIC for p in cyclic}
    for p in noncyclic:
        if p in structure:
            raise ValueError(f"{p} marked both cyclic and non-cyclic")
        structure[p] = Structure.NONCYCLIC
    quad = None
    if quad_disc is not None:
        quad = QuadraticData(quad_disc, quad_h, frozenset(quad_divisors))
    elif quad_h is not None or quad_divisors:
        raise ValueError("quadratic class number data needs a discriminant")
    subs = tuple(s if isinstance(s, IntermediateField) else IntermediateField(*s) for s in subfields)
    return ExtensionProfile(
        degree=_as_factorization(g),
        class_number=h,
        structure=structure,
        quadratic=quad,
        intermediate_fields=subs,
        totally_real=totally_real,
    )


def effective_structure(profile: ExtensionProfile, hi: int) -> Structure:
    """Recorded structure, except that an exactly-dividing prime is cyclic."""
    note = profile.structure.get(hi, Structure.UNKNOWN)
    if note is Structure.UNKNOWN and profile.class_number.exponent(hi) == 1:
        return Structure.CYCLIC
    return note


def _check_prime(profile: ExtensionProfile, hi: int) -> None:
    if profile.class_number.exponent(hi) == 0:
        raise PrimeNotFactorOfH(f"{hi} is not a prime factor of h={profile.class_number.value}")
    if profile.degree.exponent(2) > 1:
        raise DegreeViolatesGammaConstraint(
            f"degree {profile.g} is divisible by 4; the case analysis needs at most one factor 2"
        )


def _finish(profile: ExtensionProfile, hi: int, cases: tuple[Case, ...], **extra) -> Verdict:
    structure = effective_structure(profile, hi)
    v = Verdict(prime=hi, cases=cases, contradiction=False, structure=structure, **extra)
    contradiction = not v.admissible
    return replace(
        v,
        contradiction=contradiction,
        inferred_noncyclic=contradiction and structure is Structure.UNKNOWN,
    )


def classify_prime(profile: ExtensionProfile, hi: int) -> Verdict:
    _check_prime(profile, hi)
    structure = effective_structure(profile, hi)
    if structure is Structure.NONCYCLIC:
        return Verdict(prime=hi, cases=(), contradiction=False, structure=structure, applicable=False)
    g = profile.g
    cases: list[Case] = []
    if g % hi == 0:
        cases.append(DividesDegree())
    witnesses = tuple(q for q in odd_prime_divisors(profile.degree) if (hi - 1) % q == 0)
    if witnesses:
        cases.append(CongruenceWitness(witnesses))
    if g % 2 == 0:
        quad = profile.quadratic
        status = quad.status_for(hi) if quad is not None else QuadStatus.UNVERIFIABLE
        cases.append(QuadraticSubfield(status))
    return _finish(profile, hi, tuple(cases))


def classify_all(profile: ExtensionProfile) -> dict[int, Verdict]:
    return {p: classify_prime(profile, p) for p in profile.class_number.primes}


def infer_noncyclic(profile: ExtensionProfile) -> frozenset[int]:
    """Primes of unknown structure whose component is forced to be non-cyclic."""
    if profile.degree.exponent(2) > 1:
        return frozenset()
    return frozenset(p for p, v in classify_all(profile).items() if v.inferred_noncyclic)


def _subfield_bound(profile: ExtensionProfile, sub: IntermediateField) -> tuple[float, bool]:
    d = sub.degree
    if d == 1:
        # Q itself: class number 1, any prime exceeds it
        return 1.0, True
    r2 = sub.r2
    if r2 is None:
        r2 = 0 if d % 2 or profile.totally_real else d // 2
    report = class_number_upper_bound(FieldShape(d, r2, sub.abs_discriminant))
    return report.class_number_bound, report.applicable


def apply_bound_refinement(profile: ExtensionProfile, hi: int) -> Verdict:
    """Restrict witnesses using subfields whose class number is below hi.

    For each subfield L_d (2 < d < g, gcd(d, g/d) = 1) whose proven
    class-number bound is exceeded by hi, the witness must divide g/d and
    the degree and quadratic cases drop out.  The smallest surviving
    witness set is reported.
    """
    if not profile.intermediate_fields:
        raise NoIntermediateFieldData("profile carries no intermediate field data")
    base = classify_prime(profile, hi)
    if not base.applicable:
        return base
    g = profile.g
    best: Refinement | None = None
    for sub in profile.intermediate_fields:
        d = sub.degree
        if not 2 < d < g:
            raise InvalidIntermediateField(f"refinement needs 2 < d < g, got d={d}, g={g}")
        bound, usable = _subfield_bound(profile, sub)
        if not usable or hi <= bound:
            continue
        quotient = g // d
        restricted = tuple(q for q in base.witnesses() if quotient % q == 0)
        candidate = Refinement(d, restricted, bound)
        if best is None or (len(restricted), d) < (len(best.restricted_witnesses), best.d):
            best = candidate
    if best is None:
        raise BoundNotExceeded(f"{hi} does not exceed the class-number bound of any subfield", base)
    cases: tuple[Case, ...] = ()
    if best.restricted_witnesses:
        cases = (CongruenceWitness(best.restricted_witnesses),)
    return _finish(profile, hi, cases, refinement=best)


def apply_full_refinement(profile: ExtensionProfile, hi: int) -> Verdict:
    """Require hi ≡ 1 modulo every odd prime of g once all bounds are exceeded.

    Uses the subfields of degree g / q^k for each odd prime power q^k
    exactly dividing g (the degree-1 subfield is Q and needs no data).
    """
    base = classify_prime(profile, hi)
    if not base.applicable:
        return base
    g = profile.g
    odd = [(q, e) for q, e in profile.degree if q != 2]
    if not odd:
        raise IncompleteIntermediateData(f"degree {g} has no odd prime divisor")
    by_degree = {sub.degree: sub for sub in profile.intermediate_fields}
    bounds: list[tuple[int, float]] = []
    for q, e in odd:
        d = g // q**e
        sub = by_degree.get(d, IntermediateField(1, 1) if d == 1 else None)
        if sub is None:
            raise IncompleteIntermediateData(f"no data for the subfield of degree {d}")
        bound, usable = _subfield_bound(profile, sub)
        if not usable or hi <= bound:
            raise BoundNotExceeded(f"{hi} does not exceed the class-number bound of L_{d}", base)
        bounds.append((d, bound))
    radical = math.prod(q for q, _ in odd)
    radical_holds = (hi - 1) % radical == 0
    full = FullRefinement(
        odd_radical=radical,
        radical_holds=radical_holds,
        mod_g_holds=(hi - 1) % g == 0,
        class_bounds=tuple(bounds),
    )
    cases: tuple[Case, ...] = ()
    if radical_holds:
        cases = (CongruenceWitness(tuple(q for q, _ in odd)),)
    return _finish(profile, hi, cases, full_refinement=full)


def classify_odd_degree(profile: ExtensionProfile, hi: int) -> Verdict:
    """Odd-degree specialization; for prime g the answer is hi = g or hi ≡ 1 mod g."""
    g = profile.g
    if g % 2 == 0:
        raise DegreeNotOdd(f"degree {g} is even")
    v = classify_prime(profile, hi)
    if len(profile.degree) == 1 and profile.degree.factors[0][1] == 1 and v.applicable:
        forms = []
        if v.has(DividesDegree):
            forms.append("hi = g")
        if v.has(CongruenceWitness):
            forms.append("hi ≡ 1 mod g")
        v = replace(v, prime_degree_form=" or ".join(forms) or None)
    return v

import pytest
from hypothesis import given, settings, strategies as st

from cyclicclass.arith import factorize, is_prime
from cyclicclass.bounds import FieldShape, class_number_upper_bound
from cyclicclass.classifier import (
    BoundNotExceeded,
    CongruenceWitness,
    DegreeNotOdd,
    DegreeViolatesGammaConstraint,
    DividesDegree,
    IncompleteIntermediateData,
    InvalidIntermediateField,
    NoIntermediateFieldData,
    PrimeNotFactorOfH,
    QuadraticData,
    QuadStatus,
    Structure,
    apply_bound_refinement,
    apply_full_refinement,
    classify_all,
    classify_odd_degree,
    classify_prime,
    effective_structure,
    infer_noncyclic,
    make_profile,
)

from oracles import trial_is_prime


def _next_prime(start, residue=None, modulus=None, avoid=None):
    n = start
    while True:
        n += 1
        if residue is not None and n % modulus != residue:
            continue
        if avoid is not None and n % avoid[1] == avoid[0]:
            continue
        if is_prime(n):
            return n


def test_cyclotomic_59_profile():
    profile = make_profile(58, [3, 59, 233], quad_disc=-59, quad_h=3)
    verdicts = classify_all(profile)
    assert verdicts[3].labels() == ["quadratic:confirmed"]
    assert verdicts[59].labels() == ["witness:29"]
    assert verdicts[233].labels() == ["witness:29"]
    assert not any(v.contradiction for v in verdicts.values())
    # the refuted quadratic case is kept for reporting
    assert verdicts[59].cases[-1].status is QuadStatus.REFUTED


def test_noncyclic_component_is_inapplicable():
    profile = make_profile(3, 4, noncyclic=[2])
    v = classify_prime(profile, 2)
    assert not v.applicable
    assert v.cases == () and not v.contradiction and not v.inferred_noncyclic


def test_quintic_two_power_is_inferred_noncyclic():
    for power in (4, 8):
        profile = make_profile(5, 2**power)
        v = classify_prime(profile, 2)
        assert v.contradiction and v.inferred_noncyclic
        assert infer_noncyclic(profile) == {2}


def test_exactly_dividing_two_in_odd_degree_is_a_contradiction_not_an_inference():
    # 2 || h forces a cyclic 2-component, so the contradiction is with the data itself
    profile = make_profile(5, 2)
    v = classify_prime(profile, 2)
    assert v.structure is Structure.CYCLIC
    assert v.contradiction and not v.inferred_noncyclic
    assert infer_noncyclic(profile) == frozenset()


def test_a_contrario_profiles():
    p131 = make_profile(130, 3**3, quad_disc=-131, quad_h=5)
    p263 = make_profile(262, 3**4, quad_disc=-263, quad_h=13)
    assert infer_noncyclic(p131) == {3}
    assert infer_noncyclic(p263) == {3}
    # with the component known to be non-cyclic nothing is inferred
    assert infer_noncyclic(make_profile(130, 3**3, noncyclic=[3], quad_disc=-131, quad_h=5)) == frozenset()


def test_exponent_one_upgrades_to_cyclic():
    profile = make_profile(58, [3, 59, 233])
    assert effective_structure(profile, 59) is Structure.CYCLIC
    profile = make_profile(70, [7, 7, 79241])
    assert effective_structure(profile, 7) is Structure.UNKNOWN


def test_degree_divisible_by_four():
    profile = make_profile(4008, [19, 883, 109])
    with pytest.raises(DegreeViolatesGammaConstraint):
        classify_prime(profile, 19)
    assert infer_noncyclic(profile) == frozenset()


def test_prime_must_divide_h():
    with pytest.raises(PrimeNotFactorOfH):
        classify_prime(make_profile(58, 3), 5)


def test_quadratic_data_status():
    exact = QuadraticData(-239, 15)
    assert exact.status_for(3) is QuadStatus.CONFIRMED
    assert exact.status_for(7) is QuadStatus.REFUTED
    partial = QuadraticData(-9431, known_divisors=frozenset({7, 13}))
    assert partial.status_for(13) is QuadStatus.CONFIRMED
    assert partial.status_for(31) is QuadStatus.UNVERIFIABLE
    with pytest.raises(ValueError):
        QuadraticData(1)


def test_profile_validation():
    with pytest.raises(ValueError):
        make_profile(3, 3, quad_disc=-3, quad_h=1)
    with pytest.raises(ValueError):
        make_profile(58, 3, noncyclic=[5])
    with pytest.raises(InvalidIntermediateField):
        make_profile(9, 13, subfields=[(3, 81)])
    with pytest.raises(ValueError):
        make_profile(58, 3, cyclic=[3], noncyclic=[3])


def test_overlapping_cases_all_reported():
    # 7 divides 210 and 7 ≡ 1 mod 3
    v = classify_prime(make_profile(210, [3, 7, 7]), 7)
    assert v.labels() == ["degree", "witness:3", "quadratic:unverifiable"]
    assert v.has(DividesDegree) and v.has(CongruenceWitness)
    assert v.witnesses() == (3,)


degrees = st.integers(min_value=1, max_value=400).filter(lambda g: g % 4 != 0)
primes = st.integers(min_value=2, max_value=3000).filter(trial_is_prime)


@settings(max_examples=300, deadline=None)
@given(degrees, primes, st.integers(min_value=1, max_value=4))
def test_witness_soundness(g, hi, exponent):
    v = classify_prime(make_profile(g, hi**exponent), hi)
    for w in v.witnesses():
        assert w % 2 == 1 and trial_is_prime(w)
        assert (hi - 1) % w == 0 and g % w == 0
    expected_contradiction = not (g % hi == 0 or v.witnesses() or g % 2 == 0)
    assert v.contradiction == expected_contradiction
    if v.inferred_noncyclic:
        assert v.contradiction and exponent > 1


# --- bound refinements ---------------------------------------------------

CUBIC_DISC = 10**8  # B = (2/9) * 10^4, comfortably above 17


def _cubic_bound():
    return class_number_upper_bound(FieldShape(3, 0, CUBIC_DISC)).class_number_bound


def test_refinement_restricts_witnesses():
    h_bound = _cubic_bound()
    hi = _next_prime(int(h_bound), residue=1, modulus=15)
    profile = make_profile(15, hi, subfields=[(3, CUBIC_DISC)], totally_real=True)
    assert classify_prime(profile, hi).witnesses() == (3, 5)
    v = apply_bound_refinement(profile, hi)
    assert v.refinement.d == 3
    assert v.refinement.restricted_witnesses == (5,)
    assert v.refinement.class_bound == h_bound
    assert v.labels() == ["witness:5"]
    assert not v.contradiction


def test_refinement_can_empty_the_witness_set():
    hi = _next_prime(int(_cubic_bound()), residue=1, modulus=3, avoid=(1, 5))
    profile = make_profile(15, hi**2, subfields=[(3, CUBIC_DISC)], totally_real=True)
    assert classify_prime(profile, hi).witnesses() == (3,)
    v = apply_bound_refinement(profile, hi)
    assert v.refinement.restricted_witnesses == ()
    assert v.contradiction and v.inferred_noncyclic


def test_refinement_needs_hi_above_the_bound():
    profile = make_profile(15, 31, subfields=[(3, CUBIC_DISC)])
    with pytest.raises(BoundNotExceeded) as info:
        apply_bound_refinement(profile, 31)
    assert info.value.verdict.labels() == ["witness:3,5"]


def test_refinement_ignores_subfields_below_the_lemma_range():
    # D = 3969 gives B < 17: the bound is not proven, so no refinement is possible
    profile = make_profile(15, 1000003, subfields=[(3, 3969)])
    with pytest.raises(BoundNotExceeded):
        apply_bound_refinement(profile, 1000003)


def test_refinement_requires_data_and_proper_degree():
    with pytest.raises(NoIntermediateFieldData):
        apply_bound_refinement(make_profile(15, 31), 31)
    with pytest.raises(InvalidIntermediateField):
        apply_bound_refinement(make_profile(15, 31, subfields=[(1, 1)]), 31)


def test_full_refinement_radical_versus_degree():
    # g = 9: the only subfield needed is Q itself, so any hi qualifies
    profile = make_profile(9, 13)
    v = apply_full_refinement(profile, 13)
    assert v.full_refinement.odd_radical == 3
    assert v.full_refinement.radical_holds
    assert not v.full_refinement.mod_g_holds
    assert v.labels() == ["witness:3"]
    assert v.full_refinement.class_bounds == ((1, 1.0),)


def test_full_refinement_with_two_subfields():
    quintic_disc = 10**10
    cubic = _cubic_bound()
    quintic = class_number_upper_bound(FieldShape(5, 0, quintic_disc)).class_number_bound
    hi = _next_prime(int(max(cubic, quintic)), residue=1, modulus=15)
    profile = make_profile(15, hi, subfields=[(3, CUBIC_DISC), (5, quintic_disc)], totally_real=True)
    v = apply_full_refinement(profile, hi)
    assert v.full_refinement.radical_holds and v.full_refinement.mod_g_holds
    assert dict(v.full_refinement.class_bounds) == {5: quintic, 3: cubic}

    bad = _next_prime(int(max(cubic, quintic)), residue=1, modulus=5, avoid=(1, 3))
    profile = make_profile(15, bad**3, subfields=[(3, CUBIC_DISC), (5, quintic_disc)], totally_real=True)
    v = apply_full_refinement(profile, bad)
    assert not v.full_refinement.radical_holds
    assert v.contradiction and v.inferred_noncyclic


def test_full_refinement_missing_subfield():
    with pytest.raises(IncompleteIntermediateData):
        apply_full_refinement(make_profile(15, 31, subfields=[(3, CUBIC_DISC)]), 31)
    with pytest.raises(IncompleteIntermediateData):
        apply_full_refinement(make_profile(2, 3), 3)


def test_odd_degree_specialisation():
    assert classify_odd_degree(make_profile(5, 11), 11).prime_degree_form == "hi ≡ 1 mod g"
    assert classify_odd_degree(make_profile(5, 5), 5).prime_degree_form == "hi = g"
    assert classify_odd_degree(make_profile(15, 31), 31).prime_degree_form is None
    with pytest.raises(DegreeNotOdd):
        classify_odd_degree(make_profile(6, 7), 7)


def test_profile_accepts_factorization_objects():
    profile = make_profile(factorize(58), factorize(3 * 59 * 233))
    assert profile.class_number.primes == (3, 59, 233)

import math

import pytest
from hypothesis import given, settings, strategies as st

from cyclicclass.galois_sim import (
    ActionInstance,
    DegreeOdd,
    InfeasibleAction,
    ProofCase,
    case_of,
    feasible_alphas,
    norm_to_quadratic,
    orbit_classes,
)

from oracles import brute_feasible, brute_order, trial_is_prime

SMALL_PRIMES = [p for p in range(2, 90) if trial_is_prime(p)]


def test_feasible_cubic_seven():
    assert feasible_alphas(3, 7) == (2, 4)


def test_feasible_matches_big_integer_sums():
    for hi in SMALL_PRIMES:
        for g in range(1, 40):
            assert list(feasible_alphas(g, hi)) == brute_feasible(g, hi), (g, hi)


def test_feasible_rejects_bad_input():
    with pytest.raises(ValueError):
        feasible_alphas(3, 9)
    with pytest.raises(ValueError):
        feasible_alphas(0, 7)


def test_instance_validation():
    ActionInstance(3, 7, 2)
    with pytest.raises(InfeasibleAction):
        ActionInstance(3, 7, 3)
    with pytest.raises(ValueError):
        ActionInstance(3, 7, 0)
    with pytest.raises(ValueError):
        ActionInstance(3, 7, 7)
    with pytest.raises(ValueError):
        ActionInstance(3, 8, 1)


def test_orbit_is_a_cycle():
    inst = ActionInstance(3, 7, 2)
    assert orbit_classes(inst) == [1, 2, 4]
    inst = ActionInstance(6, 7, 3)
    orbit = orbit_classes(inst)
    assert len(orbit) == 6 and orbit[-1] * 3 % 7 == 1


@pytest.mark.parametrize(
    "g, hi, alpha, case",
    [
        (3, 3, 1, ProofCase.DEGREE),
        (3, 7, 2, ProofCase.VANDIVER_ODD),
        (58, 3, 2, ProofCase.MINUS_ONE),
        (6, 7, 2, ProofCase.VANDIVER_EVEN),
    ],
)
def test_case_of(g, hi, alpha, case):
    assert case_of(ActionInstance(g, hi, alpha)) is case


def test_minus_one_norm_is_half_degree():
    # alpha = -1: the relative norm is s^(g/2), which is not principal unless hi | g/2
    inst = ActionInstance(58, 3, 2)
    assert norm_to_quadratic(inst) == 29 % 3
    assert norm_to_quadratic(ActionInstance(6, 3, 2)) == 0


def test_norm_to_quadratic_odd_degree():
    with pytest.raises(DegreeOdd):
        norm_to_quadratic(ActionInstance(3, 7, 2))


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=1, max_value=80), st.sampled_from(SMALL_PRIMES))
def test_every_feasible_alpha_is_explained(g, hi):
    for alpha in feasible_alphas(g, hi):
        inst = ActionInstance(g, hi, alpha)
        case = case_of(inst)
        if case is ProofCase.DEGREE:
            assert g % hi == 0
            continue
        order = brute_order(alpha, hi)
        assert order > 1 and g % order == 0
        assert math.gcd(g, hi - 1) > 1
        if case is ProofCase.VANDIVER_ODD:
            # an odd order dividing g exposes an odd prime q | g with hi ≡ 1 mod q
            assert any((hi - 1) % q == 0 for q in range(3, g + 1, 2) if g % q == 0 and trial_is_prime(q))
        if case is ProofCase.VANDIVER_EVEN:
            expected = sum(pow(alpha, 2 * i, hi) for i in range(g // 2)) % hi
            assert norm_to_quadratic(inst) == expected

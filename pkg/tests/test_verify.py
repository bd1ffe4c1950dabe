import json
import math
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from khinlab.numtheory import coprime_box_density
from khinlab.psi import constant_psi, power_psi
from khinlab.sets import Variant, descriptor, measure_closed_form, pair_intersection_enumerated
from khinlab.target import ApproximantPair, Target
from khinlab.verify import (
    LemmaId,
    LemmaReport,
    UndefinedRatio,
    divisor_identity,
    gcd_exceeds_threshold,
    gcd_square_sum,
    key_disjointness,
    key_hypothesis,
    key_pairs,
    overlap_grid_max,
    overlap_ratio,
    overlap_report,
    quasi_independence_ratio,
    ratio_profile,
    ratio_report,
    restricted_divisor_bound,
    totient_divisor_sum,
    verify_basic_size,
)
from oracles import gcd_square_sum_loop

THIRDS = Target((F(1, 3), F(2, 3)), 3)


def test_report_invariant_and_json():
    with pytest.raises(ValueError):
        LemmaReport(LemmaId.KEY, {}, False, True)
    rep = LemmaReport("ratio", {"Q": 3}, True, False, {"R": F(3, 2)}, {"R": F(3, 2)})
    assert rep.falsified
    assert json.loads(rep.to_json())["computed_values"] == {"R": "3/2"}


@given(st.integers(1, 3000))
def test_divisor_identity_sides(q):
    assert gcd_square_sum(q) == gcd_square_sum_loop(q) == totient_divisor_sum(q)
    assert not divisor_identity(q).falsified


def test_divisor_identity_prime():
    p = 101
    assert gcd_square_sum(p) == F(p - 1 + p * p, p * p)


def _bound_sides_float(q, delta):
    """Floating evaluation of the divisor-bound chain for a sanity check."""
    divs = [d for d in range(1, q + 1) if q % d == 0]
    lo = q ** (delta / (delta + 3)) / 4
    U = sum(1 / e for e in divs if e >= lo)
    return U, 4 * len(divs) / q ** (delta / (delta + 3))


@pytest.mark.parametrize("delta", [1, 3, F(1, 2)])
def test_divisor_bound_chain(delta):
    for q in range(1, 600):
        rep = restricted_divisor_bound(q, delta)
        assert rep.conclusion_verified, q
        v = rep.computed_values
        assert v["L"] == v["M"] <= v["U"]
        U, tail = _bound_sides_float(q, float(delta))
        assert math.isclose(float(v["U"]), U, rel_tol=1e-9)
        assert U < tail + 1e-9


def test_gcd_threshold_exact():
    # 4 * q^(3/4) at q = 16 is exactly 32
    assert not gcd_exceeds_threshold(32, 16, 1)
    assert gcd_exceeds_threshold(33, 16, 1)
    assert gcd_exceeds_threshold(4096, 8192, 1)


def test_key_pairs_match_direct_scan():
    delta = F(3)
    expected = []
    for q in range(2, 201):
        for r in range(1, q):
            g = math.gcd(q, r)
            # (g/4)^(delta+3) > q^3, with delta = 3 an integer
            if F(g, 4) ** 6 > q**3:
                expected.append((q, r))
    assert sorted(key_pairs(200, delta)) == expected


def test_key_lemma_small_case():
    psi = power_psi(1, 3)
    rep = key_disjointness(192, 96, 3, psi, THIRDS)
    assert rep.hypothesis_satisfied and rep.conclusion_verified
    assert rep.computed_values["intersection"] == 0


def test_key_hypothesis_can_fail():
    psi = power_psi(1, 3)
    rep = key_disjointness(30, 7, 3, psi, THIRDS)
    assert not rep.hypothesis_satisfied and not rep.falsified
    assert "gcd_large" in rep.parameters["failed"]
    assert not key_hypothesis(200, 100, 3, constant_psi(F(1, 4)))["psi_q_decay"]


def test_key_delta_must_match_target():
    with pytest.raises(ValueError):
        key_disjointness(192, 96, 1, power_psi(1, 1), THIRDS)


def test_key_tilde_disjoint_where_full_overlaps():
    psi = power_psi(1, 3)
    target = Target((0, 0), 3)
    q, r = 192, 96
    full = pair_intersection_enumerated(descriptor(q, psi, target), descriptor(r, psi, target))
    assert full > 0
    assert key_disjointness(q, r, 3, psi, target).computed_values["intersection"] == 0


def test_basic_size_report():
    rep = verify_basic_size(10, F(1, 4), ApproximantPair((1, 0), 5, 10), THIRDS)
    assert rep.conclusion_verified
    assert rep.computed_values["tilde_closed"] == F(1, 4) * F(3, 4)
    rep = verify_basic_size(10, F(3, 4), ApproximantPair((1, 0), 5, 10), THIRDS)
    assert not rep.hypothesis_satisfied


def test_basic_size_catches_wrong_density():
    wrong = lambda q, b: coprime_box_density(q, 1)
    rep = verify_basic_size(10, F(1, 4), ApproximantPair((1, 0), 5, 10), THIRDS, density=wrong)
    assert rep.falsified and rep.witness["tilde_closed"] != rep.witness["tilde_oracle"]


def test_overlap_values(frozen, family):
    psi, target = family
    value = F(frozen["overlap_grid_max"]["value"])
    q, r = frozen["overlap_grid_max"]["at"]
    assert overlap_ratio(q, r, psi, target) == value
    rep = overlap_report(q, r, psi, target)
    assert rep.conclusion_verified and rep.computed_values["ratio"] == value
    assert overlap_report(q, r, psi, target, constant=17).falsified
    assert not overlap_report(q, r, psi, target, constant=18).falsified


@pytest.mark.slow
def test_overlap_grid_max_frozen(frozen, family):
    psi, target = family
    best, where = overlap_grid_max(100, psi, target)
    assert best == F(frozen["overlap_grid_max"]["value"])
    assert list(where) == frozen["overlap_grid_max"]["at"]


def _naive_ratio(Q, psi, target, variant):
    ds = [descriptor(q, psi, target, variant) for q in range(1, Q + 1)]
    mass = sum((measure_closed_form(d) for d in ds), F(0))
    pairs = sum((pair_intersection_enumerated(a, b) for a in ds for b in ds), F(0))
    return mass * mass / pairs


@pytest.mark.parametrize("variant", list(Variant))
def test_ratio_against_naive_double_sum(family, variant):
    psi, target = family
    assert quasi_independence_ratio(14, psi, target, variant) == _naive_ratio(14, psi, target, variant)


def test_ratio_full_frozen(family, frozen):
    psi, target = family
    profile = ratio_profile([25, 50], psi, target, Variant.FULL)
    assert [p.ratio for p in profile] == [F(frozen["ratio_full"]["25"]), F(frozen["ratio_full"]["50"])]
    assert all(p.ratio <= 1 for p in profile)


def test_ratio_report_and_errors(family):
    psi, target = family
    rep = ratio_report(10, psi, target)
    assert rep.conclusion_verified and 0 < rep.computed_values["R"] <= 1
    with pytest.raises(UndefinedRatio):
        ratio_profile([5], constant_psi(0), target)
    with pytest.raises(ValueError):
        ratio_profile([0], psi, target)

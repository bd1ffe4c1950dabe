"""Acceptance criteria 1-10.

Run with ``pytest tests/test_acceptance.py -v`` (a pass/fail line per
criterion is printed at the end) or directly as ``python3 tests/test_acceptance.py``.
"""

import subprocess
import sys
import time
from fractions import Fraction

import pytest

from khinlab.cli import _density_without_b, main
from khinlab.montecarlo import sample, tail_hit_fraction
from khinlab.numtheory import coprime_box_density
from khinlab.psi import constant_psi, power_psi
from khinlab.sets import Variant, descriptor, pair_intersection_measure
from khinlab.target import ApproximantPair, Target, validate_approximant
from khinlab.verify import (
    divisor_identity,
    key_disjointness,
    key_pairs,
    ratio_profile,
    restricted_divisor_bound,
    verify_basic_size,
)
from oracles import full_pair_bruteforce

F = Fraction
BASIC_PSI = (F(1, 4), F(1, 10), F(1, 2))
BASIC_PAIRS = (((1, 0), 5), ((1, 1), 2), ((2, 3), 6))
BASIC_TARGET = Target((F(1, 3), F(2, 3)), 3)


def _timed(budget):
    start = time.perf_counter()

    def check():
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.1f}s, budget {budget}s"

    return check


def basic_size_audit(density=coprime_box_density):
    """Falsified reports of the basic-size audit; empty means it passed."""
    bad = []
    for q in range(1, 61):
        for psi in BASIC_PSI:
            for a, b in BASIC_PAIRS:
                rep = verify_basic_size(q, psi, ApproximantPair(a, b, q), BASIC_TARGET, density=density)
                assert rep.hypothesis_satisfied
                if rep.falsified:
                    bad.append(rep)
    return bad


@pytest.mark.criterion(1, "basic-size audit, q <= 60")
def test_criterion_01_basic_size():
    done = _timed(30)
    assert basic_size_audit() == []
    done()


@pytest.mark.criterion(2, "divisor identity, q <= 10^4")
def test_criterion_02_divisor_identity():
    done = _timed(60)
    bad = [q for q in range(1, 10_001) if divisor_identity(q).falsified]
    assert bad == []
    done()


@pytest.mark.criterion(3, "restricted divisor bound, q <= 10^4, delta in {1, 3}")
def test_criterion_03_divisor_bound():
    done = _timed(60)
    bad = [(q, d) for d in (1, 3) for q in range(1, 10_001) if restricted_divisor_bound(q, d).falsified]
    assert bad == []
    done()


@pytest.mark.criterion(4, "key-lemma audit, delta = 3, q <= 300")
@pytest.mark.parametrize("y", [(F(1, 3), F(2, 3)), (F(0), F(0))], ids=["y=1/3,2/3", "y=0,0"])
def test_criterion_04_key_audit(y):
    done = _timed(120)
    psi = power_psi(1, 3)
    target = Target(y, 3)
    pairs = list(key_pairs(300, 3))
    assert pairs
    reports = [key_disjointness(q, r, 3, psi, target) for q, r in pairs]
    assert all(rep.hypothesis_satisfied for rep in reports)
    assert [rep.parameters for rep in reports if rep.falsified] == []
    done()


@pytest.mark.criterion(5, "key-lemma stress, (8192, 4096), delta = 1")
def test_criterion_05_key_stress():
    done = _timed(60)
    psi = power_psi(1, 1)
    # at y = (1/3, 2/3) the full sets are already disjoint; this shift is not
    target = Target((F(1, 20000), F(1, 30000)), 1)
    rep = key_disjointness(8192, 4096, 1, psi, target)
    assert rep.hypothesis_satisfied and rep.conclusion_verified
    full = pair_intersection_measure(
        descriptor(8192, psi, target, Variant.FULL), descriptor(4096, psi, target, Variant.FULL)
    )
    assert full > 0
    done()


@pytest.mark.criterion(6, "full x full product decomposition vs box-pair brute force, q, r <= 30")
@pytest.mark.parametrize("y", [(F(0), F(0)), (F(1, 3), F(2, 3))], ids=["y=0,0", "y=1/3,2/3"])
def test_criterion_06_product_oracle(y):
    done = _timed(30)
    quarter = F(1, 4)
    target = Target(y, 1)
    for q in range(1, 31):
        dq = descriptor(q, quarter, target, Variant.FULL)
        for r in range(1, 31):
            dr = descriptor(r, quarter, target, Variant.FULL)
            assert pair_intersection_measure(dq, dr) == full_pair_bruteforce(q, r, y, quarter, quarter), (q, r)
    done()


@pytest.mark.criterion(7, "quasi-independence ratio, Q <= 100")
def test_criterion_07_ratio(family, frozen):
    done = _timed(300)
    psi, target = family
    profile = ratio_profile(range(1, 101), psi, target, Variant.TILDE)
    assert [p.Q for p in profile] == list(range(1, 101))
    assert all(p.ratio <= 1 for p in profile)
    last = profile[-1].ratio
    assert last >= F(1, 20)
    assert last == F(frozen["ratio"]["100"])
    assert profile[24].ratio == F(frozen["ratio"]["25"])
    assert profile[49].ratio == F(frozen["ratio"]["50"])
    done()


@pytest.mark.criterion(8, "Monte Carlo tail fraction, Q0 = 100, Q1 = 10^4, N = 1000, seed 7")
@pytest.mark.parametrize("variant", ["full", "tilde"])
def test_criterion_08_monte_carlo(family, frozen, variant):
    done = _timed(120)
    psi, target = family
    first = tail_hit_fraction(sample(1000, 7), 100, 10**4, psi, target, variant)
    second = tail_hit_fraction(sample(1000, 7), 100, 10**4, psi, target, variant)
    assert first == second
    assert first >= F(95, 100)
    assert first == F(frozen[f"tail_{variant}"])
    done()


APPROX_TARGETS = [
    ((F(1, 3), F(2, 3)), F(1)),
    ((F(1, 3), F(2, 3)), F(3)),
    ((F(0), F(0)), F(1)),
    ((F(1, 2), F(1, 7)), F(1, 2)),
    ((F(3, 10), F(7, 11)), F(2)),
    ((F(5, 13), F(1, 101)), F(3)),
    ((F(1, 7), F(88, 113)), F(1)),
    ((F(1, 997), F(996, 997)), F(3, 2)),
    ((F(123456, 654321), F(271828, 314159)), F(4)),
    ((F(1, 1024), F(3, 4096)), F(5, 2)),
]


@pytest.mark.criterion(9, "approximant validity, q <= 1000, 10 targets")
def test_criterion_09_approximants():
    done = _timed(30)
    for y, delta in APPROX_TARGETS:
        t = Target(y, delta)
        seq = [t.approximant(q) for q in range(1, 1001)]
        for pair in seq:
            rep = validate_approximant(t, pair)
            assert rep.ok, (y, delta, pair, rep)
        fresh = Target(y, delta)
        assert [fresh.approximant(q) for q in range(1, 1001)] == seq
    done()


@pytest.mark.criterion(10, "falsification wiring: corrupted Euler product is caught")
def test_criterion_10_fault_injection(capsys):
    assert basic_size_audit(density=_density_without_b) != []
    code = main([
        "verify-lemma", "--id", "basic-size", "--q-max", "60", "--psi", "1/4",
        "--y", "1/3,2/3", "--delta", "3", "--a", "1,0", "--b", "5",
        "--inject-fault", "drop-b-condition", "--deterministic",
    ])
    assert code == 1
    # the same invocation without the fault passes
    code = main([
        "verify-lemma", "--id", "basic-size", "--q-max", "60", "--psi", "1/4",
        "--y", "1/3,2/3", "--delta", "3", "--a", "1,0", "--b", "5", "--deterministic",
    ])
    assert code == 0
    capsys.readouterr()


if __name__ == "__main__":
    sys.exit(subprocess.call([sys.executable, "-m", "pytest", __file__, "-q", *sys.argv[1:]]))

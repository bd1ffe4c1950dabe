from fractions import Fraction as F

import numpy as np
import pytest

from khinlab.montecarlo import collect_hits, dyadic_hit_profile, dyadic_windows, sample, tail_hit_fraction
from khinlab.sets import Variant, descriptor, member


def test_sample_is_reproducible_and_sliceable():
    a = sample(500, 7)
    b = sample(500, 7)
    assert np.array_equal(a.points, b.points)
    tail = sample(100, 7, start=250)
    assert np.array_equal(tail.points, a.points[250:350])
    assert not np.array_equal(sample(500, 8).points, a.points)
    assert a.points.dtype == np.uint64


def test_sample_rejects_bad_arguments():
    with pytest.raises(ValueError):
        sample(0, 1)
    with pytest.raises(ValueError):
        sample(10, -1)


def test_tail_fraction_counts_exact_members(family):
    psi, target = family
    run = sample(60, 3)
    got = tail_hit_fraction(run, 5, 40, psi, target, Variant.TILDE)
    hits = 0
    for i in range(run.n):
        x = run.rational_point(i)
        if any(member(x, descriptor(q, psi, target, Variant.TILDE)) for q in range(5, 41)):
            hits += 1
    assert got == F(hits, run.n)


def test_collect_hits_consistent(family):
    psi, target = family
    run = collect_hits(sample(40, 11), 2, 30, psi, target)
    for i, qs in enumerate(run.hits):
        x = run.rational_point(i)
        assert list(qs) == [q for q in range(2, 31) if member(x, descriptor(q, psi, target))]
    assert F(sum(1 for h in run.hits if h), run.n) == tail_hit_fraction(run, 2, 30, psi, target)


def test_dyadic_windows():
    assert dyadic_windows(3) == [(1, 1), (2, 3), (4, 7), (8, 15)]


@pytest.mark.slow
@pytest.mark.parametrize("variant", ["full", "tilde"])
def test_dyadic_profile_frozen(family, frozen, variant):
    psi, target = family
    profile = dyadic_hit_profile(sample(1000, 7), 13, psi, target, variant)
    assert profile == [F(v) for v in frozen[f"dyadic_{variant}"]]


def test_restricted_never_exceeds_full(family):
    psi, target = family
    run = sample(300, 5)
    assert tail_hit_fraction(run, 10, 300, psi, target, "tilde") <= tail_hit_fraction(run, 10, 300, psi, target, "full")


def test_bad_window():
    with pytest.raises(ValueError):
        tail_hit_fraction(sample(5, 1), 10, 3, None, None)

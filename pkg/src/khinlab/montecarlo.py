"""Exact Monte Carlo estimates of how much of the torus the tail sets cover.

Points are dyadic rationals ``X / 2^64`` drawn from numpy's Philox generator,
a counter-based bit generator: point ``i`` is read from counter block ``i``,
so any slice of the sample can be regenerated on its own.  Hit detection is
exact (see :func:`khinlab.sets.member_dyadic`).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from khinlab.sets import Variant, descriptor, member_dyadic
from khinlab.target import Target

_WORDS_PER_BLOCK = 4
_TWO64 = 1 << 64


@dataclass(frozen=True)
class SampleRun:
    seed: int
    n: int
    points: np.ndarray
    hits: tuple[tuple[int, ...], ...] | None = None

    def rational_point(self, i: int) -> tuple[Fraction, Fraction]:
        x1, x2 = self.points[i]
        return Fraction(int(x1), _TWO64), Fraction(int(x2), _TWO64)


def sample(n: int, seed: int, start: int = 0) -> SampleRun:
    """``n`` uniform points of ``[0, 1)^2`` with denominator ``2^64``.

    ``sample(n, seed, start)`` equals rows ``start:start+n`` of any larger
    sample with the same seed.
    """
    if n < 1:
        raise ValueError("sample size must be at least 1")
    if not 0 <= seed < _TWO64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    gen = np.random.Philox(key=seed)
    if start:
        gen.advance(start)
    raw = gen.random_raw(_WORDS_PER_BLOCK * n).reshape(n, _WORDS_PER_BLOCK)
    points = np.ascontiguousarray(raw[:, :2], dtype=np.uint64)
    return SampleRun(seed, n, points)


def _covered(run: SampleRun, q_lo: int, q_hi: int, psi, target: Target, variant) -> np.ndarray:
    variant = Variant(variant)
    covered = np.zeros(run.n, dtype=bool)
    for q in range(q_lo, q_hi + 1):
        psi_q = psi(q)
        if psi_q == 0:
            continue
        covered |= member_dyadic(run.points, descriptor(q, psi_q, target, variant))
    return covered


def tail_hit_fraction(run: SampleRun, q0: int, q1: int, psi, target: Target, variant=Variant.FULL) -> Fraction:
    """Fraction of sample points lying in some set with index in ``[q0, q1]``."""
    if not 1 <= q0 <= q1:
        raise ValueError("need 1 <= q0 <= q1")
    return Fraction(int(_covered(run, q0, q1, psi, target, variant).sum()), run.n)


def collect_hits(run: SampleRun, q0: int, q1: int, psi, target: Target, variant=Variant.FULL) -> SampleRun:
    """Copy of ``run`` with, for each point, the indices ``q`` whose set contains it."""
    if not 1 <= q0 <= q1:
        raise ValueError("need 1 <= q0 <= q1")
    variant = Variant(variant)
    hits: list[list[int]] = [[] for _ in range(run.n)]
    for q in range(q0, q1 + 1):
        psi_q = psi(q)
        if psi_q == 0:
            continue
        for i in np.flatnonzero(member_dyadic(run.points, descriptor(q, psi_q, target, variant))):
            hits[i].append(q)
    return replace(run, hits=tuple(tuple(h) for h in hits))


def window_profile(run: SampleRun, windows, psi, target: Target, variant=Variant.FULL) -> list[Fraction]:
    return [tail_hit_fraction(run, lo, hi, psi, target, variant) for lo, hi in windows]


def dyadic_windows(k_max: int, k_min: int = 0) -> list[tuple[int, int]]:
    return [(1 << k, (1 << (k + 1)) - 1) for k in range(k_min, k_max + 1)]


def dyadic_hit_profile(run: SampleRun, k_max: int, psi, target: Target, variant=Variant.FULL) -> list[Fraction]:
    """Entry ``k`` is the hit fraction over the window ``[2^k, 2^(k+1))``."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    return window_profile(run, dyadic_windows(k_max), psi, target, variant)

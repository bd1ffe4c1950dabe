"""Brute-force oracles, deliberately independent of the library code paths."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np


def phi_direct(n: int) -> int:
    return int(np.count_nonzero(np.gcd(np.arange(1, n + 1), n) == 1))


def tau_direct(n: int) -> int:
    return int(np.count_nonzero(n % np.arange(1, n + 1) == 0))


def admissible_fraction(q: int, a, b: int) -> Fraction:
    hits = sum(
        1
        for p1 in range(q)
        for p2 in range(q)
        if math.gcd(q, b * p1 + a[0], b * p2 + a[1]) == 1
    )
    return Fraction(hits, q * q)


def _axis_overlap_matrix(q: int, r: int, y: Fraction, psi_q: Fraction, psi_r: Fraction):
    """Integer circle overlaps of every q-arc with every r-arc, in units of 1/M."""
    D = math.lcm(y.denominator, psi_q.denominator, psi_r.denominator)
    M = q * r * D
    Y = y.numerator * (D // y.denominator)
    cq = (np.arange(q, dtype=np.int64) * D + Y) * r
    cr = (np.arange(r, dtype=np.int64) * D + Y) * q
    hq = psi_q.numerator * (D // psi_q.denominator) * r
    hr = psi_r.numerator * (D // psi_r.denominator) * q
    lo1, hi1 = (cq - hq)[:, None], (cq + hq)[:, None]
    total = np.zeros((q, r), dtype=np.int64)
    for k in (-1, 0, 1):
        lo2, hi2 = (cr - hr + k * M)[None, :], (cr + hr + k * M)[None, :]
        total += np.clip(np.minimum(hi1, hi2) - np.maximum(lo1, lo2), 0, None)
    return total, M


def full_pair_bruteforce(q: int, r: int, y, psi_q: Fraction, psi_r: Fraction) -> Fraction:
    """Sum the overlap area of every one of the q^2 * r^2 box pairs."""
    w0, m0 = _axis_overlap_matrix(q, r, y[0], psi_q, psi_r)
    w1, m1 = _axis_overlap_matrix(q, r, y[1], psi_q, psi_r)
    areas = w0[:, None, :, None] * w1[None, :, None, :]
    return Fraction(int(areas.sum(dtype=np.int64)), m0 * m1)


def gcd_square_sum_loop(q: int) -> Fraction:
    return Fraction(sum(math.gcd(q, r) ** 2 for r in range(1, q + 1)), q * q)

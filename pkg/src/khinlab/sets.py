"""The approximation sets ``A_q`` and their coprime-restricted subsets on the 2-torus.

``A_q`` is the union over ``p in Z^2`` of the open sup-norm boxes of radius
``psi(q)/q`` centred at ``(p + y)/q``.  The restricted set keeps only the boxes
with ``gcd(q, b*p1 + a1, b*p2 + a2) = 1`` for the approximant ``(a, b)``.

Pairwise intersections never materialise 2-D geometry.  A sup-norm box is a
product of two arcs, so the overlap of two boxes is a product of two 1-D
overlaps.  The coprimality filter couples the axes; it is separated with a
Moebius sum over squarefree divisors, which keeps the cost near ``O(q + r)``.
"""

from __future__ import annotations

import enum
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from khinlab.numtheory import coprime_box_density, squarefree_divisors, to_rational
from khinlab.target import ApproximantPair, Target
from khinlab.torus import TorusBox, arc_overlap, box_overlap, intersect, progression_set

HALF = Fraction(1, 2)
ORACLE_CAP = 200
PAIR_CAP = 1 << 14
MEMBER_CAP = 10**4
_TWO64 = 1 << 64


class Variant(str, enum.Enum):
    FULL = "full"
    TILDE = "tilde"


class CapExceeded(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SetDescriptor:
    """Symbolic description of ``A_q`` (full) or its restricted subset (tilde)."""

    q: int
    psi_q: Fraction
    target: Target
    variant: Variant = Variant.FULL
    approximant: ApproximantPair | None = None

    def __post_init__(self):
        object.__setattr__(self, "psi_q", to_rational(self.psi_q))
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.q < 1:
            raise ValueError("q must be positive")
        if not 0 <= self.psi_q <= HALF:
            raise ValueError(f"psi(q) = {self.psi_q} outside [0, 1/2]")
        if self.variant is Variant.TILDE and self.approximant is None:
            raise ValueError("the restricted set needs an approximant")

    @property
    def y(self) -> tuple[Fraction, Fraction]:
        return self.target.y

    @property
    def halfwidth(self) -> Fraction:
        return self.psi_q / self.q

    @property
    def restricted(self) -> bool:
        return self.variant is Variant.TILDE

    def admissible(self, p1: int, p2: int) -> bool:
        if not self.restricted:
            return True
        a1, a2 = self.approximant.a
        b = self.approximant.b
        return math.gcd(self.q, b * p1 + a1, b * p2 + a2) == 1

    def sieve_divisors(self, residue: int, axis: int) -> list[tuple[int, int]]:
        """Squarefree ``(d, mu(d))`` with ``d | gcd(q, b*residue + a_axis)``."""
        if not self.restricted:
            return [(1, 1)]
        g = math.gcd(self.q, self.approximant.b * residue + self.approximant.a[axis])
        return [(d, mu) for d, mu in squarefree_divisors(self.q) if g % d == 0]

    def box(self, p1: int, p2: int) -> TorusBox:
        h = self.halfwidth
        return TorusBox(((p1 + self.y[0]) / self.q, (p2 + self.y[1]) / self.q), (h, h))


def descriptor(q: int, psi, target: Target, variant=Variant.FULL) -> SetDescriptor:
    """Build the descriptor for index ``q``; ``psi`` is a PsiFunction or a value."""
    psi_q = psi(q) if callable(psi) else to_rational(psi)
    variant = Variant(variant)
    pair = target.approximant(q) if variant is Variant.TILDE else None
    return SetDescriptor(q, psi_q, target, variant, pair)


def _check_cap(q: int, cap: int | None) -> None:
    if cap is not None and q > cap:
        raise CapExceeded(f"q = {q} exceeds the enumeration cap {cap}")


def measure_closed_form(d: SetDescriptor, density=coprime_box_density) -> Fraction:
    """``4*psi^2``, times the coprime density for the restricted variant."""
    if d.psi_q > HALF:
        raise ValueError("closed form needs psi(q) <= 1/2")
    full = 4 * d.psi_q**2
    if d.restricted:
        return full * density(d.q, d.approximant.b)
    return full


def _clipped_lengths(d: SetDescriptor, axis: int) -> dict[int, Fraction]:
    """Length of each lifted arc ``p in [-1, q]`` inside ``[0, 1)``."""
    q, y, psi = d.q, d.y[axis], d.psi_q
    out = {}
    for p in range(-1, q + 1):
        lo = max(Fraction(0), (p + y - psi) / q)
        hi = min(Fraction(1), (p + y + psi) / q)
        if hi > lo:
            out[p] = hi - lo
    return out


def measure_oracle(d: SetDescriptor, cap: int | None = ORACLE_CAP) -> Fraction:
    """Sum the clipped areas of every admissible box meeting ``[0, 1)^2``."""
    _check_cap(d.q, cap)
    if d.psi_q == 0:
        return Fraction(0)
    first, second = _clipped_lengths(d, 0), _clipped_lengths(d, 1)
    total = Fraction(0)
    for p1, l1 in first.items():
        for p2, l2 in second.items():
            if d.admissible(p1 % d.q, p2 % d.q):
                total += l1 * l2
    return total


def _same_target(d1: SetDescriptor, d2: SetDescriptor) -> None:
    if d1.y != d2.y:
        raise ValueError("both sets must share the same shift y")


def _axis_incidences(d1: SetDescriptor, d2: SetDescriptor, axis: int):
    """Overlapping arc pairs on one axis, in integer units of ``1/(q*r*D)``.

    Yields ``(p, s mod r, length)`` for residues ``p in [0, q)`` and every
    integer ``s`` whose arc meets the arc of ``p``; lifts are covered because
    ``s`` runs over all of ``Z``.
    """
    q, r = d1.q, d2.q
    y, pq, pr = d1.y[axis], d1.psi_q, d2.psi_q
    D = math.lcm(y.denominator, pq.denominator, pr.denominator)
    Y = y.numerator * (D // y.denominator)
    P = pq.numerator * (D // pq.denominator)
    R = pr.numerator * (D // pr.denominator)
    qD = q * D
    # arc of s is [s*qD + left_off, s*qD + right_off]
    left_off, right_off = (Y - R) * q, (Y + R) * q
    out = []
    for p in range(q):
        lo = (p * D + Y - P) * r
        hi = (p * D + Y + P) * r
        s_first = (lo - right_off) // qD + 1
        s_last = -((left_off - hi) // qD) - 1
        for s in range(s_first, s_last + 1):
            left = max(lo, s * qD + left_off)
            right = min(hi, s * qD + right_off)
            if right > left:
                out.append((p, s % r, right - left))
    return out, q * r * D


def _sieved_overlap(d1: SetDescriptor, d2: SetDescriptor) -> Fraction:
    """``sum_{d|q, e|r} mu(d) mu(e) G_0(d, e) G_1(d, e)`` over squarefree d, e."""
    sums = []
    scale = 1
    for axis in (0, 1):
        incidences, m = _axis_incidences(d1, d2, axis)
        if not incidences:
            return Fraction(0)
        scale *= m
        acc: dict[tuple[int, int], int] = defaultdict(int)
        cache_p: dict[int, list] = {}
        cache_s: dict[int, list] = {}
        for p, s, length in incidences:
            dp = cache_p.get(p)
            if dp is None:
                dp = cache_p[p] = d1.sieve_divisors(p, axis)
            ds = cache_s.get(s)
            if ds is None:
                ds = cache_s[s] = d2.sieve_divisors(s, axis)
            for dv, mu in dp:
                for ev, nu in ds:
                    acc[(dv * mu, ev * nu)] += length
        sums.append(acc)
    first, second = sums
    total = 0
    for key, value in first.items():
        other = second.get(key)
        if other:
            sign = (1 if key[0] > 0 else -1) * (1 if key[1] > 0 else -1)
            total += sign * value * other
    return Fraction(total, scale)


def pair_intersection_measure(
    d1: SetDescriptor, d2: SetDescriptor, cap: int | None = PAIR_CAP
) -> Fraction:
    """Exact ``|S_1 ∩ S_2|`` for two descriptors with the same shift.

    Full-by-full pairs use the 1-D product decomposition; any restricted
    operand goes through the Moebius-sieved incidence kernel.
    """
    _same_target(d1, d2)
    _check_cap(max(d1.q, d2.q), cap)
    if d1.psi_q == 0 or d2.psi_q == 0:
        return Fraction(0)
    if not d1.restricted and not d2.restricted:
        out = Fraction(1)
        for axis in (0, 1):
            a = progression_set(d1.q, d1.y[axis], d1.halfwidth)
            b = progression_set(d2.q, d2.y[axis], d2.halfwidth)
            out *= intersect(a, b).measure()
            if not out:
                break
        return out
    return _sieved_overlap(d1, d2)


def _candidate_lifts(center: Fraction, reach: Fraction, r: int, y: Fraction) -> range:
    """Integers ``s`` with ``|(s + y)/r - center| < reach``."""
    return range(
        (r * (center - reach) - y).__floor__(),
        (r * (center + reach) - y).__ceil__() + 1,
    )


def pair_intersection_enumerated(
    d1: SetDescriptor, d2: SetDescriptor, cap: int | None = ORACLE_CAP
) -> Fraction:
    """Aligned-candidate enumeration in exact Fractions.

    For each admissible box of the finer set, only the handful of boxes of
    the other set whose centres lie within the summed halfwidths on both axes
    are visited.  Quadratic in ``q``; used as an independent check.
    """
    _same_target(d1, d2)
    if d2.q > d1.q:
        d1, d2 = d2, d1
    _check_cap(d1.q, cap)
    if d1.psi_q == 0 or d2.psi_q == 0:
        return Fraction(0)
    q, r = d1.q, d2.q
    h1, h2 = d1.halfwidth, d2.halfwidth
    reach = h1 + h2
    y = d1.y
    per_axis = []
    for axis in (0, 1):
        rows = {}
        for p in range(q):
            c = (p + y[axis]) / q
            hits = []
            for s in _candidate_lifts(c, reach, r, y[axis]):
                cs = (s + y[axis]) / r
                length = min(c + h1, cs + h2) - max(c - h1, cs - h2)
                if length > 0:
                    hits.append((s % r, length))
            rows[p] = hits
        per_axis.append(rows)
    total = Fraction(0)
    for p1 in range(q):
        row1 = per_axis[0][p1]
        if not row1:
            continue
        for p2 in range(q):
            row2 = per_axis[1][p2]
            if not row2 or not d1.admissible(p1, p2):
                continue
            for s1, l1 in row1:
                for s2, l2 in row2:
                    if d2.admissible(s1, s2):
                        total += l1 * l2
    return total


def pair_intersection_bruteforce(d1: SetDescriptor, d2: SetDescriptor) -> Fraction:
    """Every admissible box against every admissible box; tiny ``q`` only."""
    _same_target(d1, d2)
    boxes1 = [d1.box(p1, p2) for p1 in range(d1.q) for p2 in range(d1.q) if d1.admissible(p1, p2)]
    boxes2 = [d2.box(s1, s2) for s1 in range(d2.q) for s2 in range(d2.q) if d2.admissible(s1, s2)]
    return sum((box_overlap(a, b) for a in boxes1 for b in boxes2), Fraction(0))


def _nearest_candidates(t: Fraction) -> tuple[int, ...]:
    p = (t + HALF).__floor__()
    if t - (t.__floor__()) == HALF:
        return (p - 1, p)
    return (p,)


def member(x, d: SetDescriptor) -> bool:
    """Exact test of ``|q*x - p - y| < psi(q)`` for some admissible ``p``."""
    x = tuple(to_rational(v) for v in x)
    if d.psi_q == 0:
        return False
    options = []
    for axis in (0, 1):
        t = d.q * x[axis] - d.y[axis]
        options.append([p for p in _nearest_candidates(t) if abs(t - p) < d.psi_q])
        if not options[-1]:
            return False
    return any(d.admissible(p1, p2) for p1 in options[0] for p2 in options[1])


def _dyadic_bounds(y: Fraction, psi: Fraction) -> tuple[int, int]:
    """Integer ``u`` with ``|u/2^64 - y - j| < psi`` form ``[low, low + count)``."""
    low = ((y - psi) * _TWO64).__floor__() + 1
    high = ((y + psi) * _TWO64).__ceil__() - 1
    return low, high - low + 1


def member_dyadic(points: np.ndarray, d: SetDescriptor) -> np.ndarray:
    """Vectorised :func:`member` for points ``X / 2^64`` given as uint64 pairs.

    Uses only wrapping uint64 products and integer comparisons against
    exactly computed bounds, so the answer is identical to :func:`member`.
    """
    points = np.asarray(points, dtype=np.uint64)
    n = points.shape[0]
    if d.psi_q == 0 or n == 0:
        return np.zeros(n, dtype=bool)
    if d.q >= 1 << 31:
        raise CapExceeded("vectorised membership needs q < 2^31")
    q = np.uint64(d.q)
    hit = np.ones(n, dtype=bool)
    nearest = []
    with np.errstate(over="ignore"):
        for axis in (0, 1):
            X = points[:, axis]
            frac = X * q
            low, count = _dyadic_bounds(d.y[axis], d.psi_q)
            if count <= 0:
                return np.zeros(n, dtype=bool)
            low_mod = low % _TWO64
            offset = frac - np.uint64(low_mod)
            if count < _TWO64:
                hit &= offset < np.uint64(count)
            if not d.restricted:
                continue
            # lifting frac by k*2^64 lands it in the window, so p = floor(q*x) - k
            top = ((X >> np.uint64(32)) * q + ((X & np.uint64(0xFFFFFFFF)) * q >> np.uint64(32))) >> np.uint64(32)
            carry = (offset >= np.uint64(_TWO64 - low_mod)) if low_mod else np.zeros(n, dtype=bool)
            k = (low // _TWO64) + carry.astype(np.int64)
            nearest.append((top.astype(np.int64) - k) % d.q)
    if not d.restricted:
        return hit
    a1, a2 = d.approximant.a
    b = d.approximant.b
    u1 = (b * nearest[0] + a1) % d.q
    u2 = (b * nearest[1] + a2) % d.q
    return hit & (np.gcd(np.gcd(u1, u2), d.q) == 1)


def window_measure(d: SetDescriptor, window: TorusBox, cap: int | None = PAIR_CAP) -> Fraction:
    """Exact ``|S ∩ U|`` for an axis-aligned box ``U``."""
    _check_cap(d.q, cap)
    if d.psi_q == 0 or window.area() == 0:
        return Fraction(0)
    h = d.halfwidth
    per_axis = []
    for axis in (0, 1):
        acc: dict[int, Fraction] = defaultdict(Fraction)
        c, w = window.center[axis], window.halfwidth[axis]
        for p in range(d.q):
            length = arc_overlap((p + d.y[axis]) / d.q, h, c, w)
            if length:
                for dv, mu in d.sieve_divisors(p, axis):
                    acc[dv * mu] += length
        per_axis.append(acc)
    total = Fraction(0)
    for key, value in per_axis[0].items():
        if key in per_axis[1]:
            total += (1 if key > 0 else -1) * value * per_axis[1][key]
    return total


def window_measure_oracle(d: SetDescriptor, window: TorusBox, cap: int | None = ORACLE_CAP) -> Fraction:
    _check_cap(d.q, cap)
    if d.psi_q == 0:
        return Fraction(0)
    return sum(
        (
            box_overlap(d.box(p1, p2), window)
            for p1 in range(d.q)
            for p2 in range(d.q)
            if d.admissible(p1, p2)
        ),
        Fraction(0),
    )

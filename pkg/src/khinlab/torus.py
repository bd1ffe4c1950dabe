"""Exact unions of rational arcs on the circle ``[0, 1)`` and boxes on the 2-torus.

Pieces are stored half-open ``[lo, hi)``.  Endpoints have measure zero, so
measures are unaffected; strict membership is handled in :mod:`khinlab.sets`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

from khinlab.numtheory import to_rational

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def _normalize(pieces: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    ordered = sorted((lo, hi) for lo, hi in pieces if lo < hi)
    merged: list[list[Fraction]] = []
    for lo, hi in ordered:
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return tuple((lo, hi) for lo, hi in merged)


class IntervalSet1D:
    """Sorted, disjoint, non-adjacent pieces ``[lo, hi)`` inside ``[0, 1]``."""

    __slots__ = ("pieces",)

    def __init__(self, pieces: Iterable[tuple[object, object]] = ()):
        checked = []
        for lo, hi in pieces:
            lo, hi = to_rational(lo), to_rational(hi)
            if not (ZERO <= lo and hi <= ONE):
                raise ValueError(f"piece ({lo}, {hi}) leaves [0, 1]")
            checked.append((lo, hi))
        self.pieces = _normalize(checked)

    @classmethod
    def empty(cls) -> IntervalSet1D:
        return cls()

    @classmethod
    def full(cls) -> IntervalSet1D:
        return cls([(ZERO, ONE)])

    @classmethod
    def arc(cls, lo, hi) -> IntervalSet1D:
        """The image of the real interval ``[lo, hi)`` (length <= 1) on the circle."""
        lo, hi = to_rational(lo), to_rational(hi)
        if hi - lo >= 1:
            return cls.full()
        if hi <= lo:
            return cls.empty()
        shift = lo.__floor__()
        lo, hi = lo - shift, hi - shift
        if hi <= 1:
            return cls([(lo, hi)])
        return cls([(lo, ONE), (ZERO, hi - 1)])

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.pieces), ZERO)

    def __contains__(self, x) -> bool:
        x = to_rational(x)
        return any(lo <= x < hi for lo, hi in self.pieces)

    def __and__(self, other: IntervalSet1D) -> IntervalSet1D:
        return intersect(self, other)

    def __or__(self, other: IntervalSet1D) -> IntervalSet1D:
        return union(self, other)

    def __eq__(self, other):
        if not isinstance(other, IntervalSet1D):
            return NotImplemented
        return self.pieces == other.pieces

    def __hash__(self):
        return hash(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def __bool__(self):
        return bool(self.pieces)

    def __repr__(self):
        return f"IntervalSet1D({self.serialize() or 'empty'})"

    def serialize(self) -> str:
        """Debug dump ``lo_num/lo_den,hi_num/hi_den;...``."""
        return ";".join(
            f"{lo.numerator}/{lo.denominator},{hi.numerator}/{hi.denominator}"
            for lo, hi in self.pieces
        )

    @classmethod
    def parse(cls, text: str) -> IntervalSet1D:
        text = text.strip()
        if not text:
            return cls.empty()
        pieces = []
        for chunk in text.split(";"):
            lo, hi = chunk.split(",")
            pieces.append((Fraction(lo), Fraction(hi)))
        return cls(pieces)


def intersect(a: IntervalSet1D, b: IntervalSet1D) -> IntervalSet1D:
    """Two-pointer sweep over the sorted pieces of both sets."""
    out = []
    i = j = 0
    pa, pb = a.pieces, b.pieces
    while i < len(pa) and j < len(pb):
        lo = max(pa[i][0], pb[j][0])
        hi = min(pa[i][1], pb[j][1])
        if lo < hi:
            out.append((lo, hi))
        if pa[i][1] < pb[j][1]:
            i += 1
        else:
            j += 1
    result = IntervalSet1D.__new__(IntervalSet1D)
    result.pieces = _normalize(out)
    return result


def union(a: IntervalSet1D, b: IntervalSet1D) -> IntervalSet1D:
    result = IntervalSet1D.__new__(IntervalSet1D)
    result.pieces = _normalize(a.pieces + b.pieces)
    return result


def measure(a: IntervalSet1D) -> Fraction:
    return a.measure()


def progression_set(q: int, offset, halfwidth) -> IntervalSet1D:
    """Arcs of length ``2*halfwidth`` centred at ``(k + offset)/q``, ``k = 0..q-1``."""
    offset, halfwidth = to_rational(offset), to_rational(halfwidth)
    if q < 1:
        raise ValueError("q must be positive")
    if halfwidth < 0:
        raise ValueError("halfwidth must be nonnegative")
    if halfwidth > Fraction(1, 2 * q):
        raise ValueError(f"halfwidth {halfwidth} exceeds 1/(2q) = 1/{2 * q}; arcs would merge")
    if halfwidth == 0:
        return IntervalSet1D.empty()
    pieces = []
    for k in range(q):
        c = (k + offset) / q
        lo, hi = c - halfwidth, c + halfwidth
        shift = lo.__floor__()
        lo, hi = lo - shift, hi - shift
        if hi <= 1:
            pieces.append((lo, hi))
        else:
            pieces.append((lo, ONE))
            pieces.append((ZERO, hi - 1))
    result = IntervalSet1D.__new__(IntervalSet1D)
    result.pieces = _normalize(pieces)
    return result


def arc_overlap(c1: Fraction, h1: Fraction, c2: Fraction, h2: Fraction) -> Fraction:
    """Length of the overlap of two arcs on the circle (each of length <= 1).

    Every integer lift of the second arc that can reach the first is clipped
    against it.
    """
    total = ZERO
    lo1, hi1 = c1 - h1, c1 + h1
    gap = c1 - c2
    for k in range((gap - h1 - h2).__floor__(), (gap + h1 + h2).__ceil__() + 1):
        lo = max(lo1, c2 + k - h2)
        hi = min(hi1, c2 + k + h2)
        if hi > lo:
            total += hi - lo
    return total


@dataclass(frozen=True)
class TorusBox:
    """Open box ``center + (-halfwidth, halfwidth)`` on the 2-torus."""

    center: tuple[Fraction, Fraction]
    halfwidth: tuple[Fraction, Fraction]

    def __post_init__(self):
        center = tuple(to_rational(v) for v in self.center)
        halfwidth = tuple(to_rational(v) for v in self.halfwidth)
        if any(h < 0 or h > HALF for h in halfwidth):
            raise ValueError("box halfwidths must lie in [0, 1/2]")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "halfwidth", halfwidth)

    def area(self) -> Fraction:
        return 4 * self.halfwidth[0] * self.halfwidth[1]

    def side(self, axis: int) -> IntervalSet1D:
        c, h = self.center[axis], self.halfwidth[axis]
        return IntervalSet1D.arc(c - h, c + h)


def box_overlap(a: TorusBox, b: TorusBox) -> Fraction:
    """Area of the intersection of two boxes on the torus."""
    out = ONE
    for axis in (0, 1):
        out *= arc_overlap(a.center[axis], a.halfwidth[axis], b.center[axis], b.halfwidth[axis])
        if not out:
            return ZERO
    return out

"""Rational approximants ``a/b`` to the inhomogeneous shift ``y``.

For each ``q`` we need ``(a, b)`` with

* ``|b*y - a| < q**(-delta/(delta+3))`` in the sup norm,
* ``1 <= b <= q**(2*delta/(delta+3))``,
* ``gcd(a1, a2, b) = 1``.

Existence is Dirichlet's theorem; the choice made here is canonical: the
smallest admissible ``b``, then the smallest sup-error, then the
lexicographically smallest ``a``.
"""

from __future__ import annotations

import itertools
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction

from khinlab.numtheory import Ordering, cmp_power, iroot, to_rational


class NoAdmissibleApproximant(ValueError):
    pass


@dataclass(frozen=True)
class ApproximantPair:
    a: tuple[int, int]
    b: int
    q: int

    def error(self, y: tuple[Fraction, Fraction]) -> Fraction:
        """Sup-norm error ``|b*y - a|``."""
        return max(abs(self.b * yi - ai) for yi, ai in zip(y, self.a))


def _exponents(delta: Fraction) -> tuple[int, int, int]:
    p, s = delta.numerator, delta.denominator
    return p, s, p + 3 * s


def error_ok(err: Fraction, q: int, delta: Fraction) -> bool:
    """``err < q**(-delta/(delta+3))``, i.e. ``err**(p+3s) * q**p < 1``."""
    p, _, e = _exponents(delta)
    return cmp_power(err, e, Fraction(1, q), p) is Ordering.LT


def size_ok(b: int, q: int, delta: Fraction) -> bool:
    """``b <= q**(2*delta/(delta+3))``, i.e. ``b**(p+3s) <= q**(2p)``."""
    p, _, e = _exponents(delta)
    return b >= 1 and cmp_power(b, e, q, 2 * p) is not Ordering.GT


def max_denominator(q: int, delta: Fraction) -> int:
    p, _, e = _exponents(delta)
    return iroot(q ** (2 * p), e)


@dataclass
class Target:
    """A rational shift ``y in [0, 1)^2`` with its decay parameter ``delta``.

    Irrational targets enter only through a rational proxy such as a
    continued-fraction convergent; everything downstream is exact relative
    to that proxy.
    """

    y: tuple[Fraction, Fraction]
    delta: Fraction
    _cache: dict[int, ApproximantPair] = field(default_factory=dict, repr=False, compare=False)
    # b values whose best error beats every smaller b, as (b, a, err)
    _records: list = field(default_factory=list, repr=False, compare=False)
    _scanned: int = field(default=0, repr=False, compare=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False, compare=False)

    def __post_init__(self):
        self.y = tuple(to_rational(v) for v in self.y)
        self.delta = to_rational(self.delta)
        if len(self.y) != 2:
            raise ValueError("target must be a pair")
        if not all(0 <= v < 1 for v in self.y):
            raise ValueError(f"target coordinates must lie in [0, 1), got {self.y}")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    def approximant(self, q: int) -> ApproximantPair:
        cached = self._cache.get(q)
        if cached is None:
            cached = self._search(q)
            # Idempotent write: every thread computes the same value.
            self._cache.setdefault(q, cached)
        return cached

    def _best_for(self, b: int):
        # sup-error < 1 forces each a_i to be floor or ceil of b*y_i
        options = [sorted({math.floor(b * v), math.ceil(b * v)}) for v in self.y]
        ranked = sorted(
            itertools.product(*options),
            key=lambda a: (max(abs(b * v - ai) for v, ai in zip(self.y, a)), a),
        )
        for a in ranked:
            if math.gcd(a[0], a[1], b) == 1:
                return a, max(abs(b * v - ai) for v, ai in zip(self.y, a))
        return None

    def _extend_records(self, b_max: int) -> None:
        with self._lock:
            self._extend_records_locked(b_max)

    def _extend_records_locked(self, b_max: int) -> None:
        for b in range(self._scanned + 1, b_max + 1):
            best = self._best_for(b)
            if best is not None and (not self._records or best[1] < self._records[-1][2]):
                self._records.append((b, *best))
        self._scanned = max(self._scanned, b_max)

    def _search(self, q: int) -> ApproximantPair:
        if q < 1:
            raise ValueError("q must be positive")
        b_max = max_denominator(q, self.delta)
        self._extend_records(b_max)
        # The first admissible b always has an error below all smaller b's,
        # so only record-setting denominators need testing.
        for b, a, err in self._records:
            if b > b_max:
                break
            if error_ok(err, q, self.delta):
                return ApproximantPair(a, b, q)
        raise NoAdmissibleApproximant(f"no admissible b <= {b_max} for q={q}, y={self.y}")


def approximant(t: Target, q: int) -> ApproximantPair:
    return t.approximant(q)


@dataclass(frozen=True)
class ApproximantReport:
    error_ok: bool
    size_ok: bool
    coprime_ok: bool
    error: Fraction

    @property
    def ok(self) -> bool:
        return self.error_ok and self.size_ok and self.coprime_ok

    def __bool__(self):
        return self.ok


def validate_approximant(t: Target, pair: ApproximantPair) -> ApproximantReport:
    """Re-check all three constraints on ``pair`` directly."""
    err = pair.error(t.y)
    return ApproximantReport(
        error_ok=error_ok(err, pair.q, t.delta),
        size_ok=size_ok(pair.b, pair.q, t.delta),
        coprime_ok=math.gcd(pair.a[0], pair.a[1], pair.b) == 1,
        error=err,
    )

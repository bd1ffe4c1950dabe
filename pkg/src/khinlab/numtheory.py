"""Exact integer and multiplicative-function arithmetic.

Rationals are :class:`fractions.Fraction` throughout; they are always kept in
lowest terms with a positive denominator, which is exactly what the measures
and thresholds here need.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd, isqrt, prod

Rational = Fraction

MAX_FACTOR_INPUT = 1 << 64
TRIAL_DIVISION_BOUND = 10**6

# Deterministic Miller-Rabin witnesses for all n < 2^64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


class Ordering(enum.IntEnum):
    LT = -1
    EQ = 0
    GT = 1


def to_rational(value) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class FactorProfile:
    value: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if prod(p**k for p, k in self.factors) != self.value:
            raise ValueError("factor product does not match value")
        primes = [p for p, _ in self.factors]
        if primes != sorted(set(primes)):
            raise ValueError("primes must be strictly increasing")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)


def _small_primes(limit: int) -> list[int]:
    sieve = bytearray([1]) * (limit + 1)
    sieve[0:2] = b"\x00\x00"
    for i in range(2, isqrt(limit) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(range(i * i, limit + 1, i)))
    return [i for i in range(limit + 1) if sieve[i]]


_SMALL_PRIMES: list[int] | None = None


def _trial_primes() -> list[int]:
    global _SMALL_PRIMES
    if _SMALL_PRIMES is None:
        _SMALL_PRIMES = _small_primes(TRIAL_DIVISION_BOUND)
    return _SMALL_PRIMES


def is_prime(n: int) -> bool:
    """Deterministic primality for ``n < 2^64``."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    if n >= MAX_FACTOR_INPUT:
        raise ValueError("primality is only certified below 2^64")
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int) -> int:
    """Return a nontrivial factor of the composite odd ``n``."""
    for c in range(1, n):
        y, m, g, r, q = 2, 128, 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = gcd(abs(x - ys), n)
        if g != n:
            return g
    raise ArithmeticError(f"Pollard rho failed on {n}")


def _split_large(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = isqrt(n)
    if r * r == n:
        _split_large(r, out)
        _split_large(r, out)
        return
    f = _pollard_brent(n)
    _split_large(f, out)
    _split_large(n // f, out)


@lru_cache(maxsize=1 << 16)
def factorize(n: int) -> FactorProfile:
    """Prime factorization by trial division to 10^6, then Pollard rho."""
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"factorize needs a positive integer, got {n!r}")
    if n >= MAX_FACTOR_INPUT:
        raise ValueError("factorize is limited to n < 2^64")
    found: dict[int, int] = {}
    m = n
    for p in _trial_primes():
        if p * p > m:
            break
        if m % p == 0:
            k = 0
            while m % p == 0:
                m //= p
                k += 1
            found[p] = k
    if m > 1:
        if m <= TRIAL_DIVISION_BOUND**2:
            found[m] = found.get(m, 0) + 1
        else:
            _split_large(m, found)
    return FactorProfile(n, tuple(sorted(found.items())))


def phi(n: int) -> int:
    result = n
    for p, _ in factorize(n).factors:
        result -= result // p
    return result


def tau(n: int) -> int:
    return prod(k + 1 for _, k in factorize(n).factors)


@lru_cache(maxsize=1 << 14)
def _divisors(n: int) -> tuple[int, ...]:
    divs = [1]
    for p, k in factorize(n).factors:
        divs = [d * p**j for d in divs for j in range(k + 1)]
    return tuple(sorted(divs))


def divisors(n: int) -> list[int]:
    return list(_divisors(n))


@lru_cache(maxsize=1 << 14)
def squarefree_divisors(n: int) -> tuple[tuple[int, int], ...]:
    """Pairs ``(d, mu(d))`` over the squarefree divisors of ``n``."""
    out = [(1, 1)]
    for p, _ in factorize(n).factors:
        out += [(d * p, -mu) for d, mu in out]
    return tuple(sorted(out))


def coprime_box_density(q: int, b: int) -> Fraction:
    """Product of ``1 - p^-2`` over primes ``p | q`` with ``p`` not dividing ``b``.

    This is the fraction of residue pairs ``p mod q`` for which
    ``gcd(q, b*p + a) = 1`` whenever ``gcd(a, b) = 1``.
    """
    if q < 1 or b < 1:
        raise ValueError("q and b must be positive")
    out = Fraction(1)
    for p in factorize(q).primes:
        if b % p:
            out *= 1 - Fraction(1, p * p)
    return out


def admissible_count_oracle(q: int, a: tuple[int, int], b: int) -> int:
    """Count ``p in (Z/qZ)^2`` with ``gcd(q, b*p1 + a1, b*p2 + a2) = 1`` by enumeration."""
    a1, a2 = a
    if b < 1 or q < 1:
        raise ValueError("q and b must be positive")
    if gcd(a1, a2, b) != 1:
        raise ValueError(f"approximant must satisfy gcd(a1, a2, b) = 1, got a={a}, b={b}")
    first = [gcd(q, b * p + a1) for p in range(q)]
    second = [b * p + a2 for p in range(q)]
    return sum(1 for g in first for v in second if gcd(g, v) == 1)


def cmp_power(x, u: int, y, v: int) -> Ordering:
    """Compare ``x**u`` with ``y**v`` exactly, for nonnegative rationals."""
    x, y = to_rational(x), to_rational(y)
    if x < 0 or y < 0:
        raise ValueError("cmp_power needs nonnegative bases")
    if u < 1 or v < 1:
        raise ValueError("exponents must be positive integers")
    lhs = x.numerator**u * y.denominator**v
    rhs = y.numerator**v * x.denominator**u
    if lhs < rhs:
        return Ordering.LT
    if lhs > rhs:
        return Ordering.GT
    return Ordering.EQ


def iroot(n: int, k: int) -> int:
    """Floor of the ``k``-th root of a nonnegative integer."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    x = 1 << -(-n.bit_length() // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            break
        x = y
    while x**k > n:
        x -= 1
    while (x + 1) ** k <= n:
        x += 1
    return x


def gcd_all(*values: int) -> int:
    return reduce(gcd, values, 0)

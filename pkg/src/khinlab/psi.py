"""Approximation functions ``psi`` with exact rational values.

Values are forced onto a rational grid ``k / D`` with floor rounding, so a
power-decay function never exceeds ``c * q**-delta`` and every set built from
it is contained in the set built from the real-valued function.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Mapping

from khinlab.numtheory import Ordering, cmp_power, iroot, to_rational

DEFAULT_GRID = 1 << 32
HALF = Fraction(1, 2)


class PsiFunction:
    """An evaluable map ``q -> psi(q)`` with rational values.

    Instances are immutable; evaluations are memoised since the power-decay
    kind needs an integer root per call.
    """

    __slots__ = ("kind", "c", "delta", "grid", "support", "table", "_fn", "_memo")

    def __init__(
        self,
        kind: str,
        fn: Callable[[int], Fraction],
        *,
        c: Fraction = Fraction(1),
        delta: Fraction | None = None,
        grid: int | None = None,
        support: Callable[[int], bool] | None = None,
        table: Mapping[int, Fraction] | None = None,
    ):
        self.kind = kind
        self.c = c
        self.delta = delta
        self.grid = grid
        self.support = support
        self.table = table
        self._fn = fn
        self._memo: dict[int, Fraction] = {}

    def __call__(self, q: int) -> Fraction:
        try:
            return self._memo[q]
        except KeyError:
            pass
        if q < 1:
            raise ValueError(f"psi is defined on positive integers, got {q}")
        value = self._fn(q)
        if value < 0:
            raise ValueError(f"psi({q}) = {value} is negative")
        self._memo[q] = value
        return value

    def sum_of_squares(self, q_max: int) -> Fraction:
        return sum((self(q) ** 2 for q in range(1, q_max + 1)), Fraction(0))

    def __repr__(self):
        parts = [self.kind, f"c={self.c}"]
        if self.delta is not None:
            parts.append(f"delta={self.delta}")
        if self.grid is not None:
            parts.append(f"grid={self.grid}")
        return f"PsiFunction({', '.join(parts)})"


def power_psi(c, delta, grid: int = DEFAULT_GRID) -> PsiFunction:
    """``psi(q) = floor(c * q**-delta * grid) / grid`` computed exactly.

    With ``delta = p/s`` the floor is the largest ``k`` with
    ``k**s * q**p <= (c*grid)**s``, found by an integer ``s``-th root.
    """
    c, delta = to_rational(c), to_rational(delta)
    if c <= 0:
        raise ValueError("scale c must be positive")
    if delta <= 0:
        raise ValueError("decay exponent must be positive")
    if grid < 2:
        raise ValueError("grid denominator must be at least 2")
    p, s = delta.numerator, delta.denominator
    top = (c.numerator * grid) ** s

    def fn(q: int) -> Fraction:
        bottom = c.denominator**s * q**p
        return Fraction(iroot(top // bottom, s), grid)

    return PsiFunction("power-decay", fn, c=c, delta=delta, grid=grid)


def constant_psi(value) -> PsiFunction:
    value = to_rational(value)
    if value < 0:
        raise ValueError("psi must be nonnegative")
    return PsiFunction("constant", lambda q: value, c=value)


def table_psi(table: Mapping[int, object], default=0) -> PsiFunction:
    """Explicit-table kind; ``q`` missing from the table evaluates to ``default``."""
    frozen = {int(q): to_rational(v) for q, v in table.items()}
    fallback = to_rational(default)
    return PsiFunction(
        "explicit-table", lambda q: frozen.get(q, fallback), table=frozen
    )


def load_psi_table(path, default=0) -> PsiFunction:
    """Read a two-column CSV ``q,num/den``; a non-numeric first row is a header."""
    table: dict[int, Fraction] = {}
    with open(path, newline="") as fh:
        for i, row in enumerate(csv.reader(fh)):
            if not row or row[0].lstrip().startswith("#"):
                continue
            if len(row) != 2:
                raise ValueError(f"{path}:{i + 1}: expected two columns, got {len(row)}")
            head = row[0].strip()
            if i == 0 and not head.lstrip("+-").isdigit():
                continue
            q = int(head)
            if q < 1:
                raise ValueError(f"{path}:{i + 1}: q must be positive")
            table[q] = to_rational(row[1])
    return table_psi(table, default)


def restrict_support(f: PsiFunction, support: Callable[[int], bool]) -> PsiFunction:
    """``f(q)`` where ``support(q)`` holds, else 0."""
    zero = Fraction(0)
    return PsiFunction(
        "support-restricted",
        lambda q: f(q) if support(q) else zero,
        c=f.c,
        delta=f.delta,
        grid=f.grid,
        support=support,
    )


def normalize(f: PsiFunction, c=1) -> PsiFunction:
    """``min(c * f(q), 1/2)`` pointwise."""
    c = to_rational(c)
    if not 0 < c <= 1:
        raise ValueError("normalization scale must lie in (0, 1]")
    return PsiFunction(
        f.kind,
        lambda q: min(c * f(q), HALF),
        c=c * f.c,
        delta=f.delta,
        grid=f.grid,
        support=f.support,
        table=f.table,
    )


@dataclass(frozen=True)
class DecayCheck:
    ok: bool
    first_violation: int | None = None

    def __bool__(self):
        return self.ok


def decays_at(value: Fraction, q: int, delta: Fraction) -> bool:
    """Exact test of ``value <= q**-delta``."""
    p, s = delta.numerator, delta.denominator
    if value == 0:
        return True
    # value^s <= q^-p
    return cmp_power(value, s, Fraction(1, q), p) is not Ordering.GT


def check_decay(f: PsiFunction, delta, q_max: int) -> DecayCheck:
    """Check ``f(q) <= q**-delta`` for every ``q <= q_max``."""
    delta = to_rational(delta)
    if q_max < 1:
        raise ValueError("q_max must be at least 1")
    for q in range(1, q_max + 1):
        if not decays_at(f(q), q, delta):
            return DecayCheck(False, q)
    return DecayCheck(True)

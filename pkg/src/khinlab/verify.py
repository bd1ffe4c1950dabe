"""Computational audit of the measure, overlap and disjointness estimates.

Each check returns a :class:`LemmaReport`.  A report whose hypothesis holds
but whose conclusion fails is a falsification; :attr:`LemmaReport.falsified`
flags it and the CLI turns it into exit code 1.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable

import numpy as np

from khinlab.numtheory import (
    Ordering,
    cmp_power,
    coprime_box_density,
    divisors,
    phi,
    tau,
    to_rational,
)
from khinlab.psi import HALF, decays_at
from khinlab.sets import (
    ORACLE_CAP,
    PAIR_CAP,
    SetDescriptor,
    Variant,
    descriptor,
    measure_closed_form,
    measure_oracle,
    pair_intersection_enumerated,
    pair_intersection_measure,
)
from khinlab.target import ApproximantPair, Target


class LemmaId(str, enum.Enum):
    BASIC_SIZE = "basic-size"
    OVERLAP = "overlap"
    KEY = "key"
    DIVISOR_IDENTITY = "divisor-identity"
    DIVISOR_BOUND = "divisor-bound"
    RATIO = "ratio"


class UndefinedRatio(ArithmeticError):
    """Raised when every set up to ``Q`` is empty, so the ratio is 0/0."""


def _render(value: Any) -> Any:
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, (list, tuple)):
        return [_render(v) for v in value]
    if isinstance(value, dict):
        return {k: _render(v) for k, v in value.items()}
    return value


@dataclass
class LemmaReport:
    lemma_id: LemmaId
    parameters: dict[str, Any]
    hypothesis_satisfied: bool
    conclusion_verified: bool
    witness: dict[str, Any] | None = None
    computed_values: dict[str, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        self.lemma_id = LemmaId(self.lemma_id)
        if self.conclusion_verified and not self.hypothesis_satisfied:
            raise ValueError("a conclusion cannot be verified without its hypothesis")

    @property
    def falsified(self) -> bool:
        return self.hypothesis_satisfied and not self.conclusion_verified

    def as_dict(self) -> dict[str, Any]:
        return {
            "lemma_id": self.lemma_id.value,
            "parameters": _render(self.parameters),
            "hypothesis_satisfied": self.hypothesis_satisfied,
            "conclusion_verified": self.conclusion_verified,
            "witness": _render(self.witness),
            "computed_values": _render(self.computed_values),
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _psi_value(psi, q: int) -> Fraction:
    return psi(q) if callable(psi) else to_rational(psi)


def _threshold_exponents(delta: Fraction) -> tuple[int, int, int]:
    p, s = delta.numerator, delta.denominator
    return p, s, p + 3 * s


def gcd_exceeds_threshold(g: int, q: int, delta) -> bool:
    """``g > 4 * q**(3/(delta+3))``, i.e. ``(g/4)**(p+3s) > q**(3s)``."""
    _, s, e = _threshold_exponents(to_rational(delta))
    return cmp_power(Fraction(g, 4), e, q, 3 * s) is Ordering.GT


def verify_basic_size(
    q: int,
    psi,
    pair: ApproximantPair,
    target: Target | None = None,
    density: Callable[[int, int], Fraction] = coprime_box_density,
    cap: int | None = ORACLE_CAP,
) -> LemmaReport:
    """Closed-form measures against box enumeration, for both variants."""
    target = target or Target((0, 0), 1)
    psi_q = _psi_value(psi, q)
    params = {"q": q, "psi": psi_q, "a": list(pair.a), "b": pair.b, "y": list(target.y)}
    if not 0 <= psi_q <= HALF:
        return LemmaReport(LemmaId.BASIC_SIZE, params, False, False)
    full = SetDescriptor(q, psi_q, target, Variant.FULL)
    tilde = SetDescriptor(q, psi_q, target, Variant.TILDE, pair)
    values = {
        "full_closed": measure_closed_form(full, density),
        "full_oracle": measure_oracle(full, cap),
        "tilde_closed": measure_closed_form(tilde, density),
        "tilde_oracle": measure_oracle(tilde, cap),
    }
    ok = (
        values["full_closed"] == values["full_oracle"]
        and values["tilde_closed"] == values["tilde_oracle"]
    )
    witness = None if ok else {k: v for k, v in values.items()}
    return LemmaReport(LemmaId.BASIC_SIZE, params, True, ok, witness, values)


def overlap_bound(q: int, r: int, psi_q: Fraction, psi_r: Fraction) -> Fraction:
    g = math.gcd(q, r)
    return psi_q**2 * psi_r**2 + psi_q**2 * Fraction(g * g, q * q)


def overlap_ratio(q: int, r: int, psi, target: Target, cap: int | None = PAIR_CAP) -> Fraction:
    """``|Ã_q ∩ Ã_r|`` divided by ``psi(q)^2 psi(r)^2 + psi(q)^2 gcd(q,r)^2/q^2``."""
    if not q > r >= 1:
        raise ValueError("overlap_ratio needs q > r >= 1")
    dq = descriptor(q, psi, target, Variant.TILDE)
    dr = descriptor(r, psi, target, Variant.TILDE)
    bound = overlap_bound(q, r, dq.psi_q, dr.psi_q)
    if bound == 0:
        return Fraction(0)
    return pair_intersection_measure(dq, dr, cap) / bound


def overlap_report(
    q: int, r: int, psi, target: Target, constant=None, cap: int | None = PAIR_CAP
) -> LemmaReport:
    """Record the overlap ratio; with ``constant`` given, also check ratio <= constant."""
    psi_q, psi_r = _psi_value(psi, q), _psi_value(psi, r)
    params = {"q": q, "r": r, "constant": constant}
    if not (q > r >= 1 and psi_q <= HALF and psi_r <= HALF):
        return LemmaReport(LemmaId.OVERLAP, params, False, False)
    ratio = overlap_ratio(q, r, psi, target, cap)
    ok = constant is None or ratio <= to_rational(constant)
    values = {"ratio": ratio, "bound": overlap_bound(q, r, psi_q, psi_r), "gcd": math.gcd(q, r)}
    return LemmaReport(LemmaId.OVERLAP, params, True, ok, None if ok else {"ratio": ratio}, values)


def overlap_grid_max(q_max: int, psi, target: Target) -> tuple[Fraction, tuple[int, int]]:
    """Largest overlap ratio over ``1 <= r < q <= q_max`` and where it occurs."""
    best, where = Fraction(-1), (0, 0)
    for q in range(2, q_max + 1):
        for r in range(1, q):
            ratio = overlap_ratio(q, r, psi, target)
            if ratio > best:
                best, where = ratio, (q, r)
    return best, where


def key_hypothesis(q: int, r: int, delta, psi) -> dict[str, bool]:
    delta = to_rational(delta)
    return {
        "psi_q_decay": decays_at(_psi_value(psi, q), q, delta),
        "psi_r_decay": decays_at(_psi_value(psi, r), r, delta),
        "gcd_large": gcd_exceeds_threshold(math.gcd(q, r), q, delta),
    }


def key_disjointness(q: int, r: int, delta, psi, target: Target, cap: int | None = PAIR_CAP) -> LemmaReport:
    """Check that the restricted set at ``q`` misses all of ``A_r`` when the gcd is large.

    The stronger form (restricted ``q`` against the full set at ``r``) is
    what gets tested; it implies disjointness of the two restricted sets.
    """
    if not q > r >= 1:
        raise ValueError("key_disjointness needs q > r >= 1")
    delta = to_rational(delta)
    if delta != target.delta:
        raise ValueError("delta must match the target's decay parameter")
    parts = key_hypothesis(q, r, delta, psi)
    params = {"q": q, "r": r, "delta": delta, "gcd": math.gcd(q, r)}
    if not all(parts.values()):
        return LemmaReport(LemmaId.KEY, params | {"failed": [k for k, v in parts.items() if not v]}, False, False)
    dq = descriptor(q, psi, target, Variant.TILDE)
    dr = descriptor(r, psi, target, Variant.FULL)
    overlap = pair_intersection_measure(dq, dr, cap)
    values = {
        "intersection": overlap,
        "psi_q": dq.psi_q,
        "psi_r": dr.psi_q,
        "b_q": dq.approximant.b,
    }
    witness = None
    if overlap:
        witness = {"intersection": overlap, "a_q": list(dq.approximant.a), "b_q": dq.approximant.b}
        if q <= ORACLE_CAP:
            witness["enumerated"] = pair_intersection_enumerated(dq, dr)
    return LemmaReport(LemmaId.KEY, params, True, overlap == 0, witness, values)


def key_pairs(q_max: int, delta) -> Iterable[tuple[int, int]]:
    """All ``q_max >= q > r >= 1`` with ``gcd(q, r) > 4 q**(3/(delta+3))``."""
    for q in range(2, q_max + 1):
        for g in divisors(q):
            if g == q or not gcd_exceeds_threshold(g, q, delta):
                continue
            for r in range(g, q, g):
                if math.gcd(q, r) == g:
                    yield q, r


def gcd_square_sum(q: int) -> Fraction:
    """``sum_{r=1}^{q} gcd(q, r)^2 / q^2`` by direct summation."""
    g = np.gcd(np.arange(1, q + 1, dtype=np.int64), q)
    return Fraction(int(np.sum(g * g)), q * q)


def totient_divisor_sum(q: int) -> Fraction:
    return sum((Fraction(phi(e), e * e) for e in divisors(q)), Fraction(0))


def divisor_identity(q: int) -> LemmaReport:
    if q < 1:
        raise ValueError("q must be positive")
    lhs, rhs = gcd_square_sum(q), totient_divisor_sum(q)
    return LemmaReport(
        LemmaId.DIVISOR_IDENTITY,
        {"q": q},
        True,
        lhs == rhs,
        None if lhs == rhs else {"lhs": lhs, "rhs": rhs},
        {"lhs": lhs, "rhs": rhs},
    )


def restricted_divisor_bound(q: int, delta) -> LemmaReport:
    """Check ``L = M <= U < 4 tau(q) / q**(delta/(delta+3))`` exactly.

    ``L`` sums ``(d/q)^2 phi(q/d)`` over divisors ``d <= 4 q**(3/(delta+3))``;
    ``M`` and ``U`` sum ``phi(e)/e^2`` and ``1/e`` over divisors
    ``e >= q**(delta/(delta+3)) / 4``.
    """
    if q < 1:
        raise ValueError("q must be positive")
    delta = to_rational(delta)
    p, s, e_exp = _threshold_exponents(delta)
    L = M = U = Fraction(0)
    for d in divisors(q):
        # (d/4)^(p+3s) <= q^(3s)
        if cmp_power(Fraction(d, 4), e_exp, q, 3 * s) is not Ordering.GT:
            L += Fraction(d * d, q * q) * phi(q // d)
    for e in divisors(q):
        # (4e)^(p+3s) >= q^p
        if cmp_power(4 * e, e_exp, q, p) is not Ordering.LT:
            M += Fraction(phi(e), e * e)
            U += Fraction(1, e)
    t = tau(q)
    # U < 4 tau / q^(p/(p+3s))  <=>  (U/(4 tau))^(p+3s) < q^-p
    tail_ok = cmp_power(U / (4 * t), e_exp, Fraction(1, q), p) is Ordering.LT
    steps = {"L_eq_M": L == M, "M_le_U": M <= U, "U_lt_tail": tail_ok}
    ok = all(steps.values())
    return LemmaReport(
        LemmaId.DIVISOR_BOUND,
        {"q": q, "delta": delta},
        True,
        ok,
        None if ok else steps,
        {"L": L, "M": M, "U": U, "tau": Fraction(t)},
    )


@dataclass(frozen=True)
class RatioPoint:
    Q: int
    mass: Fraction
    pair_mass: Fraction

    @property
    def ratio(self) -> Fraction:
        return self.mass**2 / self.pair_mass


def ratio_profile(
    checkpoints: Iterable[int],
    psi,
    target: Target,
    variant=Variant.TILDE,
    cap: int | None = PAIR_CAP,
) -> list[RatioPoint]:
    """Chung-Erdős ratio ``(sum |S_q|)^2 / sum_{q,r} |S_q ∩ S_r|`` at each checkpoint.

    Diagonal terms use the closed form; each off-diagonal pair is computed
    once and counted twice.
    """
    marks = sorted(set(checkpoints))
    if not marks or marks[0] < 1:
        raise ValueError("checkpoints must be positive")
    _check = marks[-1]
    if cap is not None and _check > cap:
        raise ValueError(f"Q = {_check} exceeds the pairwise cap {cap}")
    mass = pair_mass = Fraction(0)
    built: list[SetDescriptor] = []
    out = []
    for q in range(1, marks[-1] + 1):
        d = descriptor(q, psi, target, variant)
        if d.psi_q:
            size = measure_closed_form(d)
            mass += size
            pair_mass += size
            cross = Fraction(0)
            for other in built:
                cross += pair_intersection_measure(d, other, cap)
            pair_mass += 2 * cross
            built.append(d)
        if q in marks:
            if pair_mass == 0:
                raise UndefinedRatio(f"every set up to Q = {q} is empty")
            out.append(RatioPoint(q, mass, pair_mass))
    return out


def quasi_independence_ratio(Q: int, psi, target: Target, variant=Variant.TILDE) -> Fraction:
    return ratio_profile([Q], psi, target, variant)[0].ratio


def ratio_report(Q: int, psi, target: Target, variant=Variant.TILDE) -> LemmaReport:
    """Records ``R(Q)``; the checked conclusion is ``0 < R(Q) <= 1``."""
    point = ratio_profile([Q], psi, target, variant)[0]
    R = point.ratio
    ok = 0 < R <= 1
    return LemmaReport(
        LemmaId.RATIO,
        {"Q": Q, "variant": Variant(variant)},
        True,
        ok,
        None if ok else {"R": R},
        {"R": R, "mass": point.mass, "pair_mass": point.pair_mass},
    )

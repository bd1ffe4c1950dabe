"""Exact-arithmetic toolkit for inhomogeneous simultaneous approximation on the 2-torus.

Builds the approximation sets ``A_q`` and their coprime-restricted subsets,
measures them exactly, audits the structural inequalities they satisfy, and
estimates the limsup measure by exact Monte Carlo.
"""

__version__ = "0.1.0"

from khinlab.numtheory import (
    FactorProfile,
    Ordering,
    admissible_count_oracle,
    cmp_power,
    coprime_box_density,
    divisors,
    factorize,
    phi,
    tau,
)
from khinlab.psi import PsiFunction, constant_psi, normalize, power_psi, restrict_support
from khinlab.target import ApproximantPair, Target, approximant, validate_approximant
from khinlab.torus import IntervalSet1D, TorusBox, intersect, measure, progression_set
from khinlab.sets import (
    SetDescriptor,
    Variant,
    descriptor,
    measure_closed_form,
    measure_oracle,
    member,
    pair_intersection_measure,
    window_measure,
)

__all__ = [
    "ApproximantPair",
    "FactorProfile",
    "IntervalSet1D",
    "Ordering",
    "PsiFunction",
    "SetDescriptor",
    "Target",
    "TorusBox",
    "Variant",
    "admissible_count_oracle",
    "approximant",
    "cmp_power",
    "constant_psi",
    "coprime_box_density",
    "descriptor",
    "divisors",
    "factorize",
    "intersect",
    "measure",
    "measure_closed_form",
    "measure_oracle",
    "member",
    "normalize",
    "pair_intersection_measure",
    "phi",
    "power_psi",
    "progression_set",
    "restrict_support",
    "tau",
    "validate_approximant",
    "window_measure",
]

"""
Monte Carlo view of the limsup set
==================================

Sample points of the torus and record which fall in some set with index in
a dyadic window [2^k, 2^(k+1)).  Hit detection is exact.
"""

from fractions import Fraction

import numpy as np

from khinlab.montecarlo import dyadic_hit_profile, sample, tail_hit_fraction
from khinlab.psi import normalize, power_psi
from khinlab.target import Target

psi = normalize(power_psi(1, Fraction(1, 2)), 1)
target = Target((Fraction(1, 3), Fraction(2, 3)), Fraction(1, 2))

run = sample(400, seed=7)
profile = dyadic_hit_profile(run, 10, psi, target, "tilde")
for k, frac in enumerate(profile):
    print(f"k={k:2d}  window [{2**k}, {2**(k + 1)})  hits {float(frac):.3f}")

tail = tail_hit_fraction(run, 100, 2000, psi, target, "tilde")
print("tail 100..2000:", tail, f"({float(tail):.3f})")
print("mean over windows k >= 4:", np.mean([float(f) for f in profile[4:]]).round(3))

"""
Quasi-independence on average
=============================

The ratio (sum |S_q|)^2 / sum_{q,r} |S_q & S_r| stays bounded away from 0
when the sets behave roughly independently.  By Cauchy-Schwarz it is at most 1.
"""

from fractions import Fraction

import numpy as np

from khinlab.psi import normalize, power_psi
from khinlab.target import Target
from khinlab.verify import ratio_profile

psi = normalize(power_psi(1, Fraction(1, 2)), 1)
target = Target((Fraction(1, 3), Fraction(2, 3)), Fraction(1, 2))

checkpoints = [10, 20, 40, 60]
for variant in ("full", "tilde"):
    profile = ratio_profile(checkpoints, psi, target, variant)
    ratios = np.array([float(p.ratio) for p in profile])
    print(variant, np.round(ratios, 4))
    assert all(p.ratio <= 1 for p in profile)

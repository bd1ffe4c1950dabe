"""
Disjointness when the gcd is large
==================================

When psi decays like q^-delta and gcd(q, r) is large, the restricted set at
q misses the set at r entirely, even though the unrestricted sets overlap.
"""

from khinlab.psi import power_psi
from khinlab.sets import Variant, descriptor, pair_intersection_measure
from khinlab.target import Target
from khinlab.verify import key_disjointness, key_pairs

psi = power_psi(1, 3)
target = Target((0, 0), 3)

pairs = list(key_pairs(300, 3))
print(f"{len(pairs)} pairs with q <= 300 satisfy the gcd condition")

overlapping = 0
for q, r in pairs:
    rep = key_disjointness(q, r, 3, psi, target)
    assert rep.conclusion_verified
    full = pair_intersection_measure(descriptor(q, psi, target), descriptor(r, psi, target))
    overlapping += full > 0
print(f"full sets overlap in {overlapping} of them; restricted sets in none")

# one large pair at delta = 1
psi1 = power_psi(1, 1)
shifted = Target(("1/20000", "1/30000"), 1)
rep = key_disjointness(8192, 4096, 1, psi1, shifted)
full = pair_intersection_measure(descriptor(8192, psi1, shifted, Variant.FULL),
                                 descriptor(4096, psi1, shifted, Variant.FULL))
print(f"(8192, 4096): full overlap {float(full):.3e}, restricted {rep.computed_values['intersection']}")

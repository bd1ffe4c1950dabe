"""
Sizes of the approximation sets
===============================

Each set is a union of q^2 small boxes of side 2*psi(q)/q, so its area is
4*psi(q)^2.  Keeping only boxes whose lattice index passes a coprimality
test scales that by an Euler product over the primes of q not dividing b.
"""

from fractions import Fraction

from khinlab.numtheory import coprime_box_density
from khinlab.sets import Variant, descriptor, measure_closed_form, measure_oracle
from khinlab.target import Target

# a rational shift and its decay parameter
target = Target((Fraction(1, 3), Fraction(2, 3)), 3)
psi = Fraction(1, 4)

for q in (5, 12, 30, 60):
    full = descriptor(q, psi, target, Variant.FULL)
    tilde = descriptor(q, psi, target, Variant.TILDE)
    b = tilde.approximant.b
    print(f"q={q:3d}  b={b}  |A_q|={measure_closed_form(full)}  "
          f"|A~_q|={measure_closed_form(tilde)}  density={coprime_box_density(q, b)}")
    # the closed form is checked against a sum over all boxes
    assert measure_closed_form(tilde) == measure_oracle(tilde)

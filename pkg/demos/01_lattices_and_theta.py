"""Lattices, discriminant forms and theta series.

We build L0 = U + U + A1 + A1, read off its discriminant form, cut out the
complement of one (-2)-vector and look at the theta series of that
complement against a slow count by hand.
"""

from fractions import Fraction

from modgersten.lattice import a1, direct_sum, hyperbolic_plane, orth_complement
from modgersten.qseries import theta_series

U = hyperbolic_plane()
L0 = direct_sum(U, U, a1(), a1(), name="2U+2A1")
print("L0:", L0.rank, "coordinates, signature", L0.signature, "det", L0.det)

D = L0.disc
print("discriminant group orders", D.orders)
for el in D.elements:
    print("  q%s = %s  (mod 2)" % (el, D.q(el)))

# delta = e1 - f1 has norm -2 but is not in the A1 block
delta = [1, -1, 0, 0, 0, 0]
_, basis = orth_complement(L0, [delta])
L3 = L0.sublattice(basis)
print("\ndelta^perp: rank", L3.rank, "det", L3.det, "signature", L3.signature)

# the complement of L3 in L0 is spanned by delta; it is definite
K = L0.sublattice([delta])
th = theta_series(K, 4)
for el in K.disc.elements:
    print("theta component", el, ", ".join("%s q^%s" % (c, e) for e, c in th.component(el)))

# the same numbers by brute force: x = (k + s) * delta with s the coset shift
for s in (Fraction(0), Fraction(1, 2)):
    counts = {}
    for k in range(-4, 5):
        e = (k + s) ** 2           # -(x, x)/2 for (delta, delta) = -2
        if e <= 4:
            counts[e] = counts.get(e, 0) + 1
    print("by hand, shift %s:" % s, ", ".join("%d q^%s" % (c, e) for e, c in sorted(counts.items())))

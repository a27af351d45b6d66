"""Classes of special divisors under two groups.

Under the discriminant kernel the three (-2)-vectors a1, a2 and e1 - f1
give three different divisors; the full group swaps a1 and a2, so only
two remain.  Each class carries a stabilizer image and a ramification
index, which the boundary maps need later.
"""

from modgersten.lattice import a1, direct_sum, hyperbolic_plane
from modgersten.orbits import (Ambient, classify_corank1, classify_corank2, ramification_index,
                               stabilizer_action)

U = hyperbolic_plane()
L0 = direct_sum(U, U, a1(), a1())

for gamma in ("hat", "full"):
    ctx = Ambient(L0, gamma)
    print("gamma = %s" % gamma)
    for P in classify_corank1(ctx, 1):
        print("  %s  norm %s  div %s  rep %s  r = %d  |G| = %d" % (
            P.label, P.info["norm"], P.info["div"], P.vector,
            ramification_index(ctx, P.vector), stabilizer_action(ctx, P).order))
    minus_two = sum(1 for P in classify_corank1(ctx, 1) if P.info["norm"] == -2)
    print("  (-2)-classes: %d, corank-2 classes: %d" % (minus_two, len(classify_corank2(ctx, 1))))

# a deeper pole bound lets more divisors appear
ctx = Ambient(L0, "hat")
print("\nhat, pole bound 2:", len(classify_corank1(ctx, 2)), "corank-1 classes")

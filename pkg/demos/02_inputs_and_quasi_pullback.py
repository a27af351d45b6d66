"""Principal parts, orders along special divisors and the quasi-pullback.

An input is a finite principal part on L0.  Its order along l^perp is a
weighted count of lattice points on the line through l; restricting to
l^perp shifts the constant term by twice that order.
"""

from fractions import Fraction

from modgersten import intmat as im
from modgersten.lattice import a1, direct_sum, hyperbolic_plane, orth_complement
from modgersten.mspace import make_input, nutilde, quasi_pullback

U = hyperbolic_plane()
L0 = direct_sum(U, U, a1(), a1())

f = make_input(L0, {((0, 0), -1): 7, ((0, 1), Fraction(-1, 4)): 2, ((1, 0), Fraction(-1, 4)): -1})
print("f has", len(f.pp), "principal part terms, depth", f.depth)

a2 = [0, 0, 0, 0, 0, 1]
delta = [1, -1, 0, 0, 0, 0]
for name, l in (("a2", a2), ("delta", delta)):
    print("order of f along %s^perp: %s" % (name, nutilde(f, l)))

_, sub = orth_complement(L0, [a2])
g = quasi_pullback(f, sub)
print("\nf restricted to a2^perp:")
for (el, n), c in g.pp:
    print("  e_%s q^%s  x %s" % (el, n, c))
print("c00 went from", f.c00, "to", g.c00, "= 2 x", nutilde(f, a2))



def show(h):
    return "  ".join("%s q^%s x %s" % (el, n, c) for (el, n), c in h.pp) + "  c00 %s" % h.c00


# restricting in two steps gives the same as restricting at once
_, both = orth_complement(L0, [a2, delta])
L1 = L0.sublattice(sub)
delta_in_L1 = im.solve(im.from_columns(sub, L0.rank), [Fraction(x) for x in delta])
_, inner = orth_complement(L1, [delta_in_L1])
print("\ntwo steps:", show(quasi_pullback(g, inner)))
print("at once:  ", show(quasi_pullback(f, both)))

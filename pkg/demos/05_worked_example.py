"""A three-term cocycle on U + U + A1 + A1.

On each of L1 = a2^perp, L2 = a1^perp and L3 = delta^perp we solve for an
input with prescribed orders along the pairwise intersections.  The
orders cancel in pairs, which is the cocycle condition.  The chain-map
check then compares the boundary with the tame-symbol side.
"""

import os

from modgersten import example_gn
from modgersten.bgcomplex import cocycle_check_p1
from modgersten.cli import read_input
from modgersten.orbits import classify_corank1, classify_corank2, whole_class
from modgersten.shadow import chain_map_check

data = example_gn.solve_inputs(example_gn.build("hat", 1))
for name in ("L1", "L2", "L3"):
    f = data.inputs[name]
    terms = "  ".join("%s q^%s x %s" % (el, n, c) for (el, n), c in f.pp)
    print("%s (%s): %s" % (name, data.classes[name].label, terms))

print()
for name in ("L1", "L2", "L3"):
    orders = example_gn.divisor_by_name(data, name)
    print("orders of the %s input:" % name, "  ".join("%s: %s" % kv for kv in sorted(orders.items())))

chain = [(data.classes[n], data.inputs[n]) for n in ("L1", "L2", "L3")]
ok, residual = cocycle_check_p1(data.ctx, chain, 1)
print("\ncocycle:", "PASS" if ok else "FAIL")
ok, residual = cocycle_check_p1(data.ctx, chain[:2], 1)
print("dropping the L3 term:", "PASS" if ok else "FAIL", "residual", [str(v) for v in sorted(residual.values())])

# the same boundary seen from the symbol side: route A sums over classes
# with transfer indices, route B over components of the preimage
ctx = data.ctx
print("\nchain map from L1 into its corank-2 targets:")
for T in classify_corank2(ctx, 1):
    same, a, b = chain_map_check(ctx, data.classes["L1"], [data.inputs["L1"]], T, 1)
    if a:
        print("  %s: route A %s, route B %s, agree %s" % (T.label, a, b, same))

# a pair of inputs on L0: the tame symbol along each divisor class
here = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")
f, h = (read_input(os.path.join(here, n), ctx.L0) for n in ("f.json", "h.json"))
print("\n{f, h} from L0:")
for P in classify_corank1(ctx, 1):
    same, a, _ = chain_map_check(ctx, whole_class(ctx), [f, h], P, 1)
    print("  %s: %d wedge terms, routes agree %s" % (P.label, len(a.terms), same))

"""The truncated complex in degrees 0, 1, 2 and its boundary maps.

Degree 0 holds wedge squares of inputs on L0, degree 1 holds inputs on
every corank-1 class, degree 2 holds numbers on corank-2 classes.  The
two boundary matrices are exact; their product must vanish.
"""

import os

from modgersten.bgcomplex import assemble_complex, cohomology_ranks, verify_d2
from modgersten.lattice import a1, direct_sum, hyperbolic_plane, lattice_hash
from modgersten.mspace import loads_obstructions
from modgersten.orbits import Ambient

U = hyperbolic_plane()
L0 = direct_sum(U, U, a1(), a1())

for gamma in ("hat", "full"):
    inst = assemble_complex(Ambient(L0, gamma), 2, 1)
    rep = verify_d2(inst)
    print("%-4s dims %s  boundary products zero: %s  ranks %s" % (
        gamma, inst.dims(), rep["zero"], cohomology_ranks(inst, rep)))

# realizable mode reads obstruction functionals per lattice; the shipped
# file has none, so the spaces (and the answer) are unchanged
path = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data", "obstructions_gn.json")
with open(path) as fh:
    ob = loads_obstructions(fh.read())
inst = assemble_complex(Ambient(L0, "hat"), 2, 1, obstructions={lattice_hash(ob.lattice): ob})
print("realizable mode:", inst.mode, inst.dims(), verify_d2(inst)["zero"])

# pole bound 2 is larger but still exact
inst = assemble_complex(Ambient(L0, "hat"), 2, 2)
print("pole bound 2: dims %s, zero: %s" % (inst.dims(), verify_d2(inst)["zero"]))

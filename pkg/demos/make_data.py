"""Write the small input files used by the other demos and the CLI examples.

Run from anywhere; files land in demos/data next to this script.  The
contents are deterministic, so rerunning leaves them byte-identical.
"""

import json
import os
from fractions import Fraction

from modgersten import example_gn
from modgersten.lattice import a1, direct_sum, dumps_lattice, hyperbolic_plane
from modgersten.mspace import ObstructionBasis, dumps_input, dumps_obstructions, make_input

HERE = os.path.join(os.path.dirname(os.path.abspath(__file__)), "data")


def write(name, text):
    with open(os.path.join(HERE, name), "w") as fh:
        fh.write(text + "\n")


def main():
    os.makedirs(HERE, exist_ok=True)
    U = hyperbolic_plane()
    gn = example_gn.gn_lattice()
    two_u = direct_sum(U, U, name="2U")
    write("gn.json", dumps_lattice(gn))
    write("2u.json", dumps_lattice(two_u))
    write("a1.json", dumps_lattice(a1()))

    # two inputs on L0 with poles in all three kinds of component
    f = make_input(gn, {((0, 0), -1): 7, ((0, 1), Fraction(-1, 4)): 2, ((1, 0), Fraction(-1, 4)): -1})
    h = make_input(gn, {((0, 0), -1): 1, ((1, 1), Fraction(-1, 2)): 3})
    write("f.json", dumps_input(f))
    write("h.json", dumps_input(h))
    # a2^perp: drop the last coordinate
    write("a2perp.json", json.dumps([[int(i == j) for j in range(6)] for i in range(5)]))

    # the three inputs of the worked cocycle, in the class labels the classifier assigns
    data = example_gn.solve_inputs(example_gn.build("hat", 1))
    chain = []
    for name in ("L1", "L2", "L3"):
        write("%s.json" % name, dumps_input(data.inputs[name]))
        chain.append({"class": data.classes[name].label, "input": "%s.json" % name})
    write("chain.json", json.dumps(chain))
    write("chain_broken.json", json.dumps(chain[:1]))

    # empty obstruction lists: every principal part is accepted
    write("obstructions_gn.json", dumps_obstructions(ObstructionBasis(gn, 3, 5, [], None)))
    write("obstructions_2u.json", dumps_obstructions(ObstructionBasis(two_u, 2, 5, [], None)))


if __name__ == "__main__":
    main()

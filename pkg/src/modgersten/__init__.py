"""Exact computations for a Borcherds-product cycle complex on orthogonal lattices."""

from .lattice import Lattice, a1, direct_sum, hyperbolic_plane, make_lattice, rank_one
from .mspace import ModularInput, make_input, nutilde, quasi_pullback, solve_principal_part
from .orbits import FULL, HAT, Ambient, UnsupportedRegime, classify_corank1, classify_corank2
from .bgcomplex import assemble_complex, cohomology_ranks, verify_d2

__version__ = "0.1.0"

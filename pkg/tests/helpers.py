"""Shared constructions for the tests (no library search code)."""

from fractions import Fraction

from hypothesis import strategies as st

from modgersten import intmat as im
from modgersten.lattice import a1, direct_sum, hyperbolic_plane, orth_complement, rank_one
from modgersten.mspace import admissible_keys, from_coordinates

U = hyperbolic_plane()


def gn():
    return direct_sum(U, U, a1(), a1())


def two_u_plus(m):
    return direct_sum(U, U, rank_one(m))


def random_input(data, L, B, lo=-6, hi=6, c00=0):
    keys = admissible_keys(L, B)
    vec = [data.draw(st.integers(lo, hi)) for _ in keys]
    return from_coordinates(L, keys, vec, c00)


def negative_vectors(L, h=2, max_norm=-8):
    """Primitive vectors of norm in [max_norm, -2] in a box (coordinates of L)."""
    import itertools
    out = []
    for v in itertools.product(range(-h, h + 1), repeat=L.rank):
        if not any(v) or im.content(v) != 1:
            continue
        if max_norm <= L.norm(v) < 0:
            out.append(list(v))
    return out


def nested_pair(L, l1, l2):
    """Bases of L' = l1^perp (in L) and of L'' = <l1,l2>^perp (in L and in L')."""
    _, b1 = orth_complement(L, [l1])
    _, b2 = orth_complement(L, [l1, l2])
    E = im.from_columns(b1, L.rank)
    inner = [[int(x) for x in im.solve(E, [Fraction(y) for y in v])] for v in b2]
    return b1, b2, inner


def definite_plane(L, l1, l2):
    G = [[L.ip(a, b) for b in (l1, l2)] for a in (l1, l2)]
    return G[0][0] < 0 and G[0][0] * G[1][1] - G[0][1] ** 2 > 0


# --- isometries and transport of inputs ------------------------------------------

def apply_int(M, v):
    return [sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M))]


def matmul_int(A, B):
    return [[sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))] for i in range(len(A))]


def disc_map_ambient(L, sigma):
    """el -> class of sigma(lift(el)) on A_L."""
    D = L.disc
    return {el: D.residue(apply_int(sigma, D.lift(el))) for el in D.elements}


def disc_map_sub(L, basis, sigma):
    """The map induced on A_{L'} by an isometry of L preserving L' = span(basis)."""
    Lp = L.sublattice(basis)
    E = im.from_columns(basis, L.rank)
    D = Lp.disc
    out = {}
    for el in D.elements:
        amb = im.matvec(E, D.lift(el))
        img = im.solve(E, apply_int(sigma, amb))
        out[el] = D.residue(img)
    return out


def transport(f, dmap):
    from modgersten.mspace import make_input
    return make_input(f.lattice, {(dmap[el], n): c for (el, n), c in f.pp}, f.c00)

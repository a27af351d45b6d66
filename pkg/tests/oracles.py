"""Independent brute-force oracles used by the tests.

Nothing here calls the library's search code: enumeration is by bounding
box, orbits by union-find under explicit generators.
"""

import itertools
from fractions import Fraction


def gram_norm(G, v):
    return sum(v[i] * G[i][j] * v[j] for i in range(len(v)) for j in range(len(v)))


def box(n, h):
    return itertools.product(range(-h, h + 1), repeat=n)


def box_short_vectors(G, bound, shift=None, h=6):
    """Nonzero x in shift + Z^n with 0 < x^T G x <= bound, by box search."""
    n = len(G)
    # same coset, centred representative
    shift = [Fraction(s) - (Fraction(s).numerator // Fraction(s).denominator) for s in (shift or [0] * n)]
    out = []
    for c in box(n, h):
        x = [Fraction(a) + Fraction(s) for a, s in zip(c, shift)]
        nrm = gram_norm(G, x)
        if 0 < nrm <= bound:
            out.append((tuple(x), nrm))
    return sorted(out, key=lambda t: (t[1], t[0]))


def box_theta(K_gram, disc_lifts, trunc, h=6):
    """{(index of coset, exponent): count} for -(x,x)/2 <= trunc, x in coset + K."""
    n = len(K_gram)
    out = {}
    for i, lift in enumerate(disc_lifts):
        lift = [Fraction(s) - (Fraction(s).numerator // Fraction(s).denominator) for s in lift]
        for c in box(n, h):
            x = [Fraction(a) + Fraction(s) for a, s in zip(c, lift)]
            e = -gram_norm(K_gram, x) / 2
            if e <= trunc:
                out[(i, e)] = out.get((i, e), 0) + 1
    return out


def brute_aut_count(G, h=2):
    """|O(L)| for a definite Gram matrix by trying all images of the basis."""
    n = len(G)
    cands = {}
    for i in range(n):
        cands[i] = [v for v in box(n, h) if gram_norm(G, v) == G[i][i]]
    count = 0
    for imgs in itertools.product(*[cands[i] for i in range(n)]):
        ok = True
        for i in range(n):
            for j in range(i + 1, n):
                if sum(imgs[i][a] * G[a][b] * imgs[j][b] for a in range(n) for b in range(n)) != G[i][j]:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            # unimodular image
            M = [list(r) for r in zip(*imgs)]
            if abs(_det(M)) == 1:
                count += 1
    return count


def _det(M):
    n = len(M)
    M = [[Fraction(x) for x in r] for r in M]
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if M[i][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            M[c], M[p] = M[p], M[c]
            d = -d
        d *= M[c][c]
        for i in range(c + 1, n):
            f = M[i][c] / M[c][c]
            M[i] = [a - f * b for a, b in zip(M[i], M[c])]
    return d


# ---------------------------------------------------------------------------
# orbits of lattice vectors on U + U + K0


def eichler_transvection(G, e, a):
    """x -> x - (a,x) e + (e,x) a - (a,a)/2 (e,x) e  (e isotropic, a orthogonal to e)."""
    n = len(G)

    def ip(x, y):
        return sum(x[i] * G[i][j] * y[j] for i in range(n) for j in range(n))
    aa = ip(a, a)
    cols = []
    for k in range(n):
        x = [int(i == k) for i in range(n)]
        ax, ex = ip(a, x), ip(e, x)
        cols.append([x[i] - ax * e[i] + ex * a[i] - Fraction(aa, 2) * ex * e[i] for i in range(n)])
    return [[int(cols[j][i]) for j in range(n)] for i in range(n)]


def generators(G, k0_auts=(), extra=()):
    """Eichler transvections for both hyperbolic planes, -id, and K0 automorphisms."""
    n = len(G)
    unit = [[int(i == j) for j in range(n)] for i in range(n)]
    gens = []
    planes = [(0, 1), (2, 3)]
    for p, (ie, jf) in enumerate(planes):
        other = [k for k in range(n) if k not in (ie, jf)]
        for e in (unit[ie], unit[jf]):
            for k in other:
                gens.append(eichler_transvection(G, e, unit[k]))
    gens.append([[-int(i == j) for j in range(n)] for i in range(n)])
    for X in list(k0_auts) + list(extra):
        gens.append(X)
    return gens


def _apply(M, v):
    return tuple(sum(M[i][j] * v[j] for j in range(len(v))) for i in range(len(M)))


def _inverse_int(M):
    n = len(M)
    A = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M)]
    for c in range(n):
        p = next(i for i in range(c, n) if A[i][c] != 0)
        A[c], A[p] = A[p], A[c]
        piv = A[c][c]
        A[c] = [x / piv for x in A[c]]
        for i in range(n):
            if i != c and A[i][c]:
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[c])]
    return [[int(x) for x in r[n:]] for r in A]


def brute_orbits(G, norms, h, gens, h_walk=None):
    """Partition of primitive vectors (up to sign) of the given norms in a box.

    Union-find over the box of height h_walk (>= h); returns the list of
    components restricted to the small box, each as a sorted list.
    """
    from math import gcd
    n = len(G)
    h_walk = h_walk or h
    norms = set(norms)

    def canon(v):
        return max(v, tuple(-x for x in v))

    nodes = set()
    for v in box(n, h_walk):
        if not any(v):
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if g != 1 or gram_norm(G, v) not in norms:
            continue
        nodes.add(canon(v))
    parent = {v: v for v in nodes}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v
    mats = list(gens) + [_inverse_int(M) for M in gens]
    for v in nodes:
        for M in mats:
            w = canon(_apply(M, v))
            if w in parent:
                a, b = find(v), find(w)
                if a != b:
                    parent[a] = b
    comps = {}
    for v in nodes:
        if max(abs(x) for x in v) <= h:
            comps.setdefault(find(v), []).append(v)
    return sorted(sorted(c) for c in comps.values())

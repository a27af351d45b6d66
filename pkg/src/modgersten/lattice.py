"""Even integral lattices with an explicit basis.

A :class:`Lattice` is just its Gram matrix.  Sublattices never get a lattice
type of their own: they are an embedding matrix (basis vectors as columns, in
ambient coordinates) plus the lattice of their Gram matrix.
"""

import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

from . import intmat as im


class LatticeError(ValueError):
    code = "lattice"


class NotSymmetricError(LatticeError):
    code = "not-symmetric"


class SingularError(LatticeError):
    code = "singular"


class OddLatticeError(LatticeError):
    code = "odd"


class NotDefiniteError(LatticeError):
    code = "not-definite"


class GlueError(LatticeError):
    code = "glue"


def mod1(x):
    x = Fraction(x)
    return x - math.floor(x)


def mod2(x):
    x = Fraction(x)
    return x - 2 * math.floor(x / 2)


@dataclass(frozen=True)
class Lattice:
    gram: tuple
    name: str = field(default="", compare=False)

    @property
    def rank(self):
        return len(self.gram)

    @cached_property
    def signature(self):
        return im.signature(self.gram)

    @property
    def even(self):
        return all(self.gram[i][i] % 2 == 0 for i in range(self.rank))

    @cached_property
    def det(self):
        return int(im.det(self.gram))

    @property
    def is_negative_definite(self):
        return self.signature == (0, self.rank)

    @property
    def is_positive_definite(self):
        return self.signature == (self.rank, 0)

    @cached_property
    def disc(self):
        return DiscriminantForm(self)

    def ip(self, x, y):
        return im.bilinear(self.gram, x, y)

    def norm(self, x):
        return im.bilinear(self.gram, x, x)

    def divisor(self, v):
        """div(v): the positive generator of (v, L)."""
        return im.content(im.matvec(self.gram, v))

    def scaled(self, c):
        return Lattice(tuple(tuple(c * x for x in row) for row in self.gram), self.name)

    def sublattice(self, basis):
        """Lattice carried by the given basis vectors (ambient coordinates)."""
        G = [[self.ip(u, v) for v in basis] for u in basis]
        return Lattice(tuple(tuple(int(x) for x in row) for row in G))

    def __repr__(self):
        label = self.name or "Lattice"
        return "%s(rank=%d, sig=%s, det=%d)" % (label, self.rank, self.signature, self.det)


def make_lattice(gram, name=""):
    G = [[int(x) for x in row] for row in gram]
    n = len(G)
    if any(len(row) != n for row in G):
        raise NotSymmetricError("Gram matrix is not square")
    if any(G[i][j] != G[j][i] for i in range(n) for j in range(n)):
        raise NotSymmetricError("Gram matrix is not symmetric")
    if n == 0 or im.det(G) == 0:
        raise SingularError("Gram matrix is singular")
    if any(G[i][i] % 2 for i in range(n)):
        raise OddLatticeError("lattice is odd")
    return Lattice(tuple(tuple(row) for row in G), name)


def direct_sum(*lattices, name=""):
    n = sum(L.rank for L in lattices)
    G = im.zeros(n, n)
    off = 0
    for L in lattices:
        for i in range(L.rank):
            for j in range(L.rank):
                G[off + i][off + j] = L.gram[i][j]
        off += L.rank
    return make_lattice(G, name or "+".join(L.name or "?" for L in lattices))


def hyperbolic_plane():
    return make_lattice([[0, 1], [1, 0]], "U")


def rank_one(m):
    return make_lattice([[m]], "<%d>" % m)


def a1():
    return make_lattice([[-2]], "A1")


# ---------------------------------------------------------------------------
# discriminant forms


class DiscriminantForm:
    """The finite quadratic module L^v/L with q: A -> Q/2Z.

    Elements are tuples of residues modulo ``orders`` (the invariant factors
    bigger than 1, in Smith order).
    """

    def __init__(self, lattice):
        self.lattice = lattice
        G = [list(r) for r in lattice.gram]
        D, U, V = im.smith(G)
        n = lattice.rank
        self._U = U
        self._G = G
        self._slots = [i for i in range(n) if D[i][i] > 1]
        self.orders = tuple(D[i][i] for i in self._slots)
        self.generator_lifts = tuple(
            tuple(Fraction(V[r][i], D[i][i]) for r in range(n)) for i in self._slots)
        self.zero = tuple(0 for _ in self.orders)

    @property
    def size(self):
        return math.prod(self.orders)

    @cached_property
    def elements(self):
        return tuple(itertools.product(*[range(d) for d in self.orders]))

    @cached_property
    def index(self):
        return {x: i for i, x in enumerate(self.elements)}

    def reduce(self, el):
        return tuple(int(a) % d for a, d in zip(el, self.orders))

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def neg(self, x):
        return tuple((-a) % d for a, d in zip(x, self.orders))

    def scale(self, k, x):
        return tuple((k * a) % d for a, d in zip(x, self.orders))

    def order(self, x):
        o = 1
        for a, d in zip(x, self.orders):
            o = o * (d // math.gcd(a, d)) // math.gcd(o, d // math.gcd(a, d))
        return o

    def lift(self, x):
        """A representative of x in L^v (rational coordinates in the basis of L)."""
        n = self.lattice.rank
        v = [Fraction(0)] * n
        for a, g in zip(x, self.generator_lifts):
            for i in range(n):
                v[i] += a * g[i]
        return v

    def in_dual(self, v):
        return im.is_integral(im.matvec(self._G, v))

    def residue(self, v):
        """Class of a dual-lattice vector v (rational coordinates)."""
        z = im.matvec(self._U, im.matvec(self._G, v))
        z = im.as_int_vec(z)
        return tuple(z[i] % self.orders[k] for k, i in enumerate(self._slots))

    def q(self, x):
        v = self.lift(x)
        return mod2(im.bilinear(self._G, v, v))

    def b(self, x, y):
        return mod1(im.bilinear(self._G, self.lift(x), self.lift(y)))

    @cached_property
    def q_values(self):
        return {x: self.q(x) for x in self.elements}

    @cached_property
    def generators(self):
        return tuple(tuple(int(i == j) for j in range(len(self.orders)))
                     for i in range(len(self.orders)))

    def orbit_rep(self, x):
        """Canonical representative of x modulo +-1."""
        return min(x, self.neg(x))

    @cached_property
    def isometries(self):
        """O(A): all automorphisms preserving q, as tuples of generator images."""
        return tuple(_disc_isometries(self))

    def apply(self, images, x):
        out = self.zero
        for a, img in zip(x, images):
            out = self.add(out, self.scale(a, img))
        return out

    def permutation(self, images):
        idx = self.index
        return tuple(idx[self.apply(images, x)] for x in self.elements)

    def __repr__(self):
        return "DiscriminantForm(orders=%s)" % (self.orders,)


def _disc_isometries(D):
    gens = D.generators
    k = len(gens)
    if k == 0:
        yield ()
        return
    qg = [D.q(g) for g in gens]
    bg = [[D.b(g, h) for h in gens] for g in gens]
    cands = []
    for i, g in enumerate(gens):
        d = D.orders[i]
        cands.append([x for x in D.elements
                      if D.scale(d, x) == D.zero and D.q(x) == qg[i]])
    chosen = []

    def rec(i):
        if i == k:
            yield tuple(chosen)
            return
        for x in cands[i]:
            if all(D.b(x, chosen[j]) == bg[i][j] for j in range(i)):
                chosen.append(x)
                yield from rec(i + 1)
                chosen.pop()

    yield from rec(0)


# ---------------------------------------------------------------------------
# sublattices


def orth_complement(L, S):
    """Primitive sublattice {x in L : (x, s) = 0 for s in S}.

    Returns (lattice, embedding) where embedding is the list of basis vectors
    in the coordinates of L.
    """
    S = [list(s) for s in S if any(s)]
    if not S:
        basis = [[int(i == j) for j in range(L.rank)] for i in range(L.rank)]
        return L, basis
    d = im.common_denominator([x for s in S for x in s])
    A = [[int(Fraction(x) * d) for x in im.matvec(L.gram, s)] for s in S]
    basis = im.integer_kernel(A, L.rank)
    basis = reduce_basis_indefinite(L, basis)
    return L.sublattice(basis), basis


def reduce_basis_indefinite(L, basis):
    """Cosmetic size reduction of a sublattice basis (coordinates only)."""
    if not basis:
        return basis
    H = im.hnf_rows(basis)
    return H if len(H) == len(basis) else basis


def saturation(L, S):
    """Smallest primitive sublattice containing the vectors S."""
    return im.saturate([list(s) for s in S], L.rank)


def is_primitive(L, S):
    sat = saturation(L, S)
    return len(sat) == len([s for s in S if any(s)]) and im.lattice_index(S, L.rank) == 1


@dataclass
class GlueData:
    ambient: Lattice
    sub_basis: list
    comp_basis: list
    sub: Lattice
    comp: Lattice
    index: int
    glue_group: list
    coset_lift_map: dict

    def split(self, v):
        """Coordinates of an ambient rational vector in the basis sub + comp."""
        return self._solve(v)

    def __post_init__(self):
        cols = self.sub_basis + self.comp_basis
        self._inv = im.inverse(im.from_columns(cols, self.ambient.rank))
        self._r = len(self.sub_basis)

    def _solve(self, v):
        c = im.matvec(self._inv, v)
        return c[:self._r], c[self._r:]

    def pair_of(self, v):
        """(class in A_sub, class in A_comp) of a vector of L^v."""
        a, b = self._solve(v)
        return self.sub.disc.residue(a), self.comp.disc.residue(b)


def glue(L, sub_basis, comp_basis):
    """Finite-index decomposition data for sub + comp inside L.

    ``coset_lift_map`` sends each element (beta, delta) of A_sub x A_comp
    lying in L^v/(sub + comp) to its class in A_L.
    """
    sub_basis = [list(v) for v in sub_basis]
    comp_basis = [list(v) for v in comp_basis]
    if len(sub_basis) + len(comp_basis) != L.rank:
        raise GlueError("sublattices do not have full rank together")
    for u in sub_basis:
        for w in comp_basis:
            if L.ip(u, w) != 0:
                raise GlueError("sublattices are not orthogonal")
    M = im.from_columns(sub_basis + comp_basis, L.rank)
    index = abs(int(im.det(M)))
    if index == 0:
        raise GlueError("sublattices do not span a finite-index sublattice")
    sub = L.sublattice(sub_basis) if sub_basis else Lattice(())
    comp = L.sublattice(comp_basis) if comp_basis else Lattice(())
    gd = GlueData(L, sub_basis, comp_basis, sub, comp, index, [], {})
    Ds, Dk = _disc_or_trivial(sub), _disc_or_trivial(comp)
    # glue group: images of the standard basis of L
    H = {(Ds.zero, Dk.zero)}
    for i in range(L.rank):
        e = [int(i == j) for j in range(L.rank)]
        g = gd.pair_of(e)
        H |= {(Ds.add(h[0], Ds.scale(k, g[0])), Dk.add(h[1], Dk.scale(k, g[1])))
              for h in H for k in range(1, index + 1)}
    gd.glue_group = sorted(H)
    DL = L.disc
    n = L.rank
    # work with integer vectors scaled by a common denominator N
    sl = [_ambient_lift(Ds.lift(b), sub_basis, n) for b in Ds.elements]
    kl = [_ambient_lift(Dk.lift(d), comp_basis, n) for d in Dk.elements]
    N = im.common_denominator([x for v in sl + kl for x in v])
    sl = [[int(x * N) for x in v] for v in sl]
    kl = [[int(x * N) for x in v] for v in kl]
    G = [list(r) for r in L.gram]
    Gs = [im.matvec(G, v) for v in sl]
    Gk = [im.matvec(G, v) for v in kl]
    UG = [im.matvec(DL._U, v) for v in Gs], [im.matvec(DL._U, v) for v in Gk]
    slots = DL._slots
    cmap = {}
    for i, beta in enumerate(Ds.elements):
        for j, delta in enumerate(Dk.elements):
            if any((a + b) % N for a, b in zip(Gs[i], Gk[j])):
                continue
            z = [(a + b) // N for a, b in zip(UG[0][i], UG[1][j])]
            cmap[(beta, delta)] = tuple(z[s] % DL.orders[k] for k, s in enumerate(slots))
    gd.coset_lift_map = cmap
    return gd


def _ambient_lift(coords, basis, n):
    out = [Fraction(0)] * n
    for c, v in zip(coords, basis):
        for i in range(n):
            out[i] += c * v[i]
    return out


def _disc_or_trivial(L):
    if L.rank == 0:
        return _TrivialDisc()
    return L.disc


class _TrivialDisc:
    orders = ()
    zero = ()
    elements = ((),)
    size = 1

    def add(self, x, y):
        return ()

    def scale(self, k, x):
        return ()

    def residue(self, v):
        return ()

    def lift(self, x):
        return []


# ---------------------------------------------------------------------------
# definite lattices: enumeration and isometries


def short_vectors(L, bound, shift=None, include_zero=False):
    """All x in shift + Z^n with 0 < x^T G x <= bound, for positive definite G.

    Returns a list of (vector, norm) with exact rational entries.  This is a
    Fincke-Pohst search on the exact LDL^T decomposition; floating point only
    widens the per-coordinate ranges, which are re-checked exactly.
    """
    G = [[Fraction(x) for x in row] for row in L.gram]
    n = len(G)
    if im.signature(G) != (n, 0):
        raise NotDefiniteError("short_vectors needs a positive definite lattice")
    bound = Fraction(bound)
    c = [Fraction(x) for x in shift] if shift is not None else [Fraction(0)] * n
    # x^T G x = sum_i d_i (y_i + sum_{j>i} m_ij y_j)^2
    d = [Fraction(0)] * n
    m = [[Fraction(0)] * n for _ in range(n)]
    A = [row[:] for row in G]
    for i in range(n):
        d[i] = A[i][i]
        for j in range(i + 1, n):
            m[i][j] = A[i][j] / d[i]
        for j in range(i + 1, n):
            for k in range(i + 1, n):
                A[j][k] -= A[i][j] * A[i][k] / d[i]
    out = []
    x = [Fraction(0)] * n

    def rec(i, budget):
        if i < 0:
            nrm = bound - budget
            if include_zero or any(x):
                out.append((tuple(x), nrm))
            return
        center = sum(m[i][j] * x[j] for j in range(i + 1, n))
        # y_i = k + c_i, want (k + c_i + center)^2 <= budget / d_i
        t = budget / d[i]
        s = math.sqrt(float(t)) if t > 0 else 0.0
        mid = -(c[i] + center)
        lo = math.floor(float(mid) - s) - 1
        hi = math.ceil(float(mid) + s) + 1
        for k in range(lo, hi + 1):
            y = k + c[i]
            r = (y + center) ** 2 * d[i]
            if r <= budget:
                x[i] = y
                rec(i - 1, budget - r)
        x[i] = Fraction(0)

    rec(n - 1, bound)
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def lll_gram(G, delta=Fraction(3, 4)):
    """LLL reduction of a positive definite Gram matrix.

    Returns T (columns = new basis in old coordinates), exact arithmetic.
    """
    n = len(G)
    G = [[Fraction(x) for x in r] for r in G]
    B = [[int(i == j) for j in range(n)] for i in range(n)]  # rows = basis vectors

    def ip(u, v):
        return im.bilinear(G, u, v)

    k = 1
    while k < n:
        # Gram-Schmidt on the fly
        bstar = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in B[i]]
            for j in range(i):
                mu[i][j] = ip(B[i], bstar[j]) / ip(bstar[j], bstar[j])
                v = [a - mu[i][j] * b for a, b in zip(v, bstar[j])]
            bstar.append(v)
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                B[k] = [a - q * b for a, b in zip(B[k], B[j])]
                for l in range(j + 1):
                    mu[k][l] -= q * (mu[j][l] if l < j else 1)
        nk = ip(bstar[k], bstar[k])
        nk1 = ip(bstar[k - 1], bstar[k - 1])
        if nk >= (delta - mu[k][k - 1] ** 2) * nk1:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            k = max(k - 1, 1)
    return im.transpose(B)


def canonical_bases(L):
    """Canonical Gram matrix of a definite lattice and all bases realising it.

    The canonical Gram is the lexicographically smallest sequence
    (N(b1); N(b2), (b1,b2); N(b3), (b1,b3), (b2,b3); ...) over all bases of
    |L|.  Each basis is returned as a matrix T whose columns are the basis
    vectors in the coordinates of L.  The number of bases equals |O(L)|.
    """
    n = L.rank
    sign = 1
    if L.is_negative_definite:
        sign = -1
    elif not L.is_positive_definite:
        raise NotDefiniteError("canonical form needs a definite lattice")
    P = L.scaled(sign)
    T0 = lll_gram(P.gram)
    R = Lattice(tuple(tuple(int(x) for x in row) for row in im.matmul(im.matmul(im.transpose(T0), [list(r) for r in P.gram]), T0)))
    bound = max(R.gram[i][i] for i in range(n))
    vecs = [tuple(int(a) for a in v) for v, _ in short_vectors(R, bound)]
    norms = {v: R.norm(v) for v in vecs}
    vecs.sort(key=lambda v: (norms[v], v))
    best = [None]
    found = []
    chosen = []

    def seq_for(v):
        return [norms[v]] + [R.ip(u, v) for u in chosen]

    def rec(i, prefix):
        if i == n:
            if best[0] is None or prefix < best[0]:
                best[0] = prefix
                found.clear()
            if prefix == best[0]:
                found.append([list(u) for u in chosen])
            return
        for v in vecs:
            if chosen and norms[v] < norms[chosen[-1]]:
                continue
            cand = prefix + seq_for(v)
            if best[0] is not None and cand > best[0][:len(cand)]:
                continue
            basis = [list(u) for u in chosen] + [list(v)]
            if im.rank(basis) < len(basis) or im.lattice_index(basis, n) != 1:
                continue
            chosen.append(v)
            rec(i + 1, cand)
            chosen.pop()

    rec(0, [])
    seq = best[0]
    C = im.zeros(n, n)
    pos = 0
    for i in range(n):
        C[i][i] = seq[pos]
        pos += 1
        for j in range(i):
            C[j][i] = C[i][j] = seq[pos]
            pos += 1
    C = [[sign * x for x in row] for row in C]
    bases = [im.matmul(T0, im.from_columns(b, n)) for b in found]
    return C, bases


def definite_isometry(a, b):
    """An integer matrix X with X^T G_a X = G_b (columns: images of b's basis), or None."""
    if a.rank != b.rank or a.det != b.det or a.signature != b.signature:
        return None
    Ca, Ta = canonical_bases(a)
    Cb, Tb = canonical_bases(b)
    if Ca != Cb:
        return None
    X = im.matmul(Ta[0], im.inverse(Tb[0]))
    return [[int(x) for x in row] for row in X]


def definite_aut_group(a):
    """All elements of O(a) as integer matrices (acting on coordinates)."""
    C, T = canonical_bases(a)
    T0inv = im.inverse(T[0])
    out = [[[int(x) for x in row] for row in im.matmul(t, T0inv)] for t in T]
    out.sort()
    return out


def group_generators(elements, compose, identity_el):
    """Greedy generating subset of a finite group given by all its elements."""
    gens = []
    span = {identity_el}
    for g in elements:
        if g in span:
            continue
        gens.append(g)
        frontier = list(span)
        span = set(span)
        while frontier:
            nxt = []
            for x in frontier:
                for h in gens:
                    y = compose(h, x)
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
    return gens


# ---------------------------------------------------------------------------
# lattice files


def lattice_record(L, labels=None):
    rec = {"name": L.name, "gram": [list(r) for r in L.gram]}
    if labels:
        rec["labels"] = list(labels)
    return rec


def dumps_lattice(L, labels=None):
    return json.dumps(lattice_record(L, labels), sort_keys=True, separators=(",", ":"))


def loads_lattice(text):
    rec = json.loads(text)
    return make_lattice(rec["gram"], rec.get("name", ""))


def load_lattice(path):
    with open(path) as fh:
        return loads_lattice(fh.read())


def save_lattice(L, path, labels=None):
    with open(path, "w") as fh:
        fh.write(dumps_lattice(L, labels) + "\n")


def lattice_hash(L):
    payload = json.dumps([list(r) for r in L.gram], separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()[:16]

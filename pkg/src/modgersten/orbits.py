"""Classes of primitive sublattices under Gamma, and the finite groups they carry.

Everything here assumes the ambient lattice is written as U + U + K0 in its
given basis (first four coordinates), which is what makes classes decidable:
a primitive sublattice L with definite complement K is determined up to
Gamma by the isometry class of K together with the way K^v meets L0^v,
read off in the discriminant group of L0 and taken modulo the image of
Gamma there.  A *flag* (a sublattice inside a corank-1 sublattice) adds a
marked line in K.
"""

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import intmat as im
from .lattice import (Lattice, canonical_bases, definite_aut_group, glue, group_generators,
                      make_lattice, orth_complement, rank_one)


class UnsupportedRegime(ValueError):
    code = "unsupported-regime"


HAT = "hat"
FULL = "full"


@dataclass(frozen=True)
class GroupLabel:
    kind: str

    def __post_init__(self):
        if self.kind not in (HAT, FULL):
            raise ValueError("gamma must be 'hat' or 'full'")

    def __str__(self):
        return {HAT: "hat-O-plus", FULL: "O-plus"}[self.kind]


def _is_2u_block(G):
    n = len(G)
    if n < 4:
        return False
    U2 = [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]]
    if any(G[i][j] != U2[i][j] for i in range(4) for j in range(4)):
        return False
    return all(G[i][j] == 0 for i in range(4) for j in range(4, n))


def _leading_plane(G):
    return (tuple(G[0][:2]) == (0, 1) and tuple(G[1][:2]) == (1, 0)
            and all(G[i][j] == 0 for i in (0, 1) for j in range(2, len(G))))


class FiniteActionGroup:
    """A group of permutations of the elements of a discriminant group, mod +-1."""

    def __init__(self, disc, perms):
        self.disc = disc
        neg = tuple(disc.index[disc.neg(x)] for x in disc.elements)
        self._neg = neg
        self.elements = sorted({self._canon(p) for p in perms})
        ident = tuple(range(len(disc.elements)))
        self.identity = self._canon(ident)
        self.generators = group_generators(self.elements, self.compose, self.identity)

    def _canon(self, p):
        q = tuple(self._neg[i] for i in p)
        return min(p, q)

    def compose(self, p, q):
        return self._canon(tuple(p[i] for i in q))

    @property
    def order(self):
        return len(self.elements)

    def act(self, p, el):
        """Image of an element; defined up to sign, so callers work mod +-1."""
        return self.disc.elements[p[self.disc.index[el]]]

    def __repr__(self):
        return "FiniteActionGroup(order=%d, gens=%d)" % (self.order, len(self.generators))


class Ambient:
    """L0 = U + U + K0 together with the image of Gamma in O(A_L0)."""

    def __init__(self, L0, gamma):
        if not isinstance(gamma, GroupLabel):
            gamma = GroupLabel(gamma)
        if not _is_2u_block(L0.gram):
            raise UnsupportedRegime("ambient lattice must start with a U + U block")
        if L0.signature[0] != 2:
            raise UnsupportedRegime("ambient lattice must have signature (2, n)")
        self.L0 = L0
        self.gamma = gamma
        self.n = L0.rank - 2
        D = L0.disc
        self.disc = D
        ident = tuple(range(len(D.elements)))
        neg = tuple(D.index[D.neg(x)] for x in D.elements)
        if gamma.kind == HAT:
            perms = {ident, neg}
        else:
            perms = {D.permutation(img) for img in D.isometries}
            perms |= {tuple(neg[i] for i in p) for p in perms}
        self.gamma_perms = sorted(perms)
        self._gamma_set = set(perms)
        self._key_cache = {}
        self._pair_cache = {}

    def in_gamma(self, perm):
        return tuple(perm) in self._gamma_set

    @property
    def group(self):
        return FiniteActionGroup(self.disc, self.gamma_perms)

    def unit_vector(self, i):
        return [int(i == j) for j in range(self.L0.rank)]

    # -- invariants ---------------------------------------------------------

    def complement_key(self, comp_basis, marked=None):
        """Gamma-invariant of a primitive definite sublattice K (optionally with a line).

        comp_basis: basis of K in L0 coordinates; marked: a vector of K in L0
        coordinates whose line is remembered.
        """
        comp_basis = [list(v) for v in comp_basis]
        ck = (tuple(tuple(v) for v in comp_basis), tuple(marked) if marked else None)
        if ck in self._key_cache:
            return self._key_cache[ck]
        L0 = self.L0
        r = len(comp_basis)
        K = L0.sublattice(comp_basis)
        C, Ts = canonical_bases(K)
        # Lambda = {c in Q^r : G0 E c integral}
        M = im.matmul([list(row) for row in L0.gram], im.from_columns(comp_basis, L0.rank))
        D, U, V = im.smith(M)
        lam = [[Fraction(V[i][j], D[j][j]) for i in range(r)] for j in range(r)]
        mk = None
        if marked is not None:
            mk = im.solve(im.from_columns(comp_basis, L0.rank), [Fraction(x) for x in marked])
        best = None
        for T in Ts:
            Tinv = im.inverse(T)
            lam_new = im.hnf_rational_columns([im.matvec(Tinv, v) for v in lam])
            iota = []
            for v in lam_new:
                amb = im.matvec(im.from_columns(comp_basis, L0.rank), im.matvec(T, v))
                iota.append(self.disc.index[self.disc.residue(amb)])
            mnew = None
            if mk is not None:
                a = tuple(im.matvec(Tinv, mk))
                mnew = min(a, tuple(-x for x in a))
            for g in self.gamma_perms:
                cand = (r, tuple(tuple(row) for row in C), tuple(tuple(v) for v in lam_new),
                        tuple(g[i] for i in iota), mnew)
                if best is None or cand < best:
                    best = cand
        self._key_cache[ck] = best
        return best


@dataclass
class SublatticeClass:
    """A Gamma-class of primitive sublattices L of L0, with a representative.

    ``basis`` spans the representative (L0 coordinates), ``comp_basis`` its
    orthogonal complement.  For corank 1 ``vector`` spans the complement.
    """
    ambient: Ambient = field(repr=False)
    corank: int
    key: tuple = field(repr=False)
    basis: list = field(repr=False)
    comp_basis: list = field(repr=False)
    label: str = ""
    vector: list = None
    info: dict = field(default_factory=dict)

    @property
    def lattice(self):
        return self.ambient.L0.sublattice(self.basis)

    @property
    def invariant_key(self):
        return self.key

    def __eq__(self, other):
        return isinstance(other, SublatticeClass) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


def whole_class(ctx):
    n = ctx.L0.rank
    basis = [ctx.unit_vector(i) for i in range(n)]
    return SublatticeClass(ctx, 0, ("whole",), basis, [], "L0")


def _eichler_vectors(D, pole_bound):
    """(element, div, norm / div^2 as rational) triples allowed at this depth."""
    B = Fraction(pole_bound)
    seen = set()
    out = []
    for el in D.elements:
        rep = D.orbit_rep(el)
        if rep in seen:
            continue
        seen.add(rep)
        d = D.order(rep)
        q = D.q(rep)
        # norm N = d^2 (q + 2j) with -2B d^2 <= N < 0
        t = q - 2 * ((q // 2) + 1)  # largest value < 0 congruent to q mod 2
        while t >= -2 * B:
            out.append((rep, d, t))
            t -= 2
    return out


def _coset_vector(lat, D, el, d, t, hyper):
    """Primitive l in lat with div d, l/d = el in A, (l,l) = d^2 t.

    ``hyper`` = (i, j) coordinates of a hyperbolic plane orthogonal to the
    other coordinates.  Returns None if no small choice is primitive.
    """
    i, j = hyper
    n = lat.rank
    base = D.lift(el)
    base = [Fraction(0) if k in (i, j) else base[k] for k in range(n)]
    others = [k for k in range(n) if k not in (i, j)]
    shifts = [[0] * n]
    for k in others:
        for s in (1, -1):
            v = [0] * n
            v[k] = s
            shifts.append(v)
    for sh in shifts:
        lam = [b + s for b, s in zip(base, sh)]
        nl = lat.norm(lam)
        tt = (t - nl) / 2
        if tt.denominator != 1:
            continue
        v = [d * x for x in lam]
        v[i] += d
        v[j] += d * tt
        if not im.is_integral(v):
            continue
        v = [int(x) for x in v]
        if im.content(v) == 1 and lat.divisor(v) == d:
            return v
    return None


def classify_corank1(ctx, pole_bound):
    """Corank-1 classes l^perp that can carry a nonzero order at this pole depth."""
    L0 = ctx.L0
    D = ctx.disc
    found = {}
    for el, d, t in _eichler_vectors(D, pole_bound):
        l = _coset_vector(L0, D, el, d, t, (0, 1))
        if l is None:
            raise UnsupportedRegime("no primitive representative for %s" % (el,))
        key = ctx.complement_key([l])
        if key in found:
            continue
        found[key] = _corank1_class(ctx, l, key, el, d, t)
    classes = sorted(found.values(), key=lambda c: (c.info["norm"] * -1, c.info["div"], c.key))
    for i, c in enumerate(classes):
        c.label = "P%d" % (i + 1)
    return classes


def _corank1_class(ctx, l, key, el=None, d=None, t=None):
    L0 = ctx.L0
    n = L0.rank
    # l lives in U1 + K0; its complement there, plus U2 up front.
    idx = [0, 1] + list(range(4, n))
    sub = L0.sublattice([ctx.unit_vector(i) for i in idx])
    lsub = [l[i] for i in idx]
    _, mb = orth_complement(sub, [lsub])
    M1 = []
    for v in mb:
        w = [0] * n
        for k, i in enumerate(idx):
            w[i] = v[k]
        M1.append(w)
    basis = [ctx.unit_vector(2), ctx.unit_vector(3)] + M1
    d = L0.divisor(l)
    info = {"norm": L0.norm(l), "div": d}
    return SublatticeClass(ctx, 1, key, basis, [list(l)], "", list(l), info)


def class_of_vector(ctx, l):
    return _corank1_class(ctx, l, ctx.complement_key([l]))


# ---------------------------------------------------------------------------
# flags: corank-1 sublattices of a corank-1 class


@dataclass
class Flag:
    parent: SublatticeClass = field(repr=False)
    w: list             # in parent coordinates
    w_ambient: list     # in L0 coordinates
    comp_basis: list = field(repr=False)   # K'' in L0 coordinates
    flag_key: tuple = field(repr=False)
    class_key: tuple = field(repr=False)
    info: dict = field(default_factory=dict)

    @property
    def basis(self):
        """Basis of L''_alpha inside the parent (parent coordinates)."""
        return self.info["sub_basis"]


def sub_flags(ctx, parent, pole_bound):
    """Gamma_parent-classes of corank-1 sublattices L'' of ``parent``.

    Only those that can carry a nonzero order at the pole depth are listed.
    For parent = L0 these are the corank-1 classes themselves.
    """
    if parent.corank > 1:
        raise UnsupportedRegime("flags are only enumerated inside corank <= 1")
    P = parent.lattice
    if not _leading_plane(P.gram):
        raise UnsupportedRegime("parent representative must start with a hyperbolic plane")
    D = P.disc
    out = {}
    E = parent.basis
    for el, d, t in _eichler_vectors(D, pole_bound):
        w = _coset_vector(P, D, el, d, t, (0, 1))
        if w is None:
            raise UnsupportedRegime("no primitive representative inside %s" % parent.label)
        W = im.matvec(im.from_columns(E, ctx.L0.rank), w)
        W = [int(x) for x in W]
        comp = im.saturate(parent.comp_basis + [W], ctx.L0.rank)
        comp = _reduce_definite_basis(ctx.L0, comp)
        if parent.corank == 0:
            fkey = ctx.complement_key(comp)
        else:
            fkey = ctx.complement_key(comp, marked=parent.vector)
        if fkey in out:
            continue
        ckey = ctx.complement_key(comp)
        _, sb = orth_complement(P, [w])
        out[fkey] = Flag(parent, w, W, comp, fkey, ckey,
                         {"norm": P.norm(w), "div": P.divisor(w), "sub_basis": sb})
    return sorted(out.values(), key=lambda f: (-f.info["norm"], f.info["div"], f.flag_key))


def _reduce_definite_basis(L0, basis):
    from .lattice import lll_gram
    K = L0.sublattice(basis)
    G = K.scaled(-1).gram if K.is_negative_definite else K.gram
    T = lll_gram(G)
    return [[int(x) for x in im.matvec(im.from_columns(basis, L0.rank), c)] for c in im.columns(T)]


def classify_corank2(ctx, pole_bound):
    """Corank-2 classes reached as flags inside corank-1 classes."""
    found = {}
    for P in classify_corank1(ctx, pole_bound):
        for fl in sub_flags(ctx, P, pole_bound):
            if fl.class_key not in found:
                basis, _ = _ambient_basis_of_flag(ctx, fl)
                found[fl.class_key] = SublatticeClass(ctx, 2, fl.class_key, basis, fl.comp_basis, "",
                                                      None, {"via": P.key})
    classes = sorted(found.values(), key=lambda c: c.key)
    for i, c in enumerate(classes):
        c.label = "Q%d" % (i + 1)
    return classes


def _ambient_basis_of_flag(ctx, fl):
    E = im.from_columns(fl.parent.basis, ctx.L0.rank)
    basis = [[int(x) for x in im.matvec(E, v)] for v in fl.basis]
    return basis, fl.comp_basis


def c_set(ctx, target, parent, pole_bound):
    """The flags of ``parent`` lying in the class ``target``.

    For parent = target this is the single trivial flag.
    """
    if parent.key == target.key:
        return [None]
    if target.corank != parent.corank + 1:
        return []
    if parent.corank == 0:
        return [f for f in sub_flags(ctx, parent, pole_bound) if f.class_key == target.key]
    return [f for f in sub_flags(ctx, parent, pole_bound) if f.class_key == target.key]


# ---------------------------------------------------------------------------
# stabilizer images


class _PairData:
    def __init__(self, ctx, sub_basis, comp_basis):
        L0 = ctx.L0
        self.ctx = ctx
        self.gd = glue(L0, sub_basis, comp_basis)
        self.sub = self.gd.sub
        self.comp = self.gd.comp
        self.H = set(self.gd.glue_group)
        D0 = ctx.disc
        self.z_pairs = [self.gd.pair_of(D0.lift(z)) for z in D0.elements]
        self.coset_of = {}
        for i, p in enumerate(self.z_pairs):
            self.coset_of[self._coset(p)] = i

    def _coset(self, p):
        Ds, Dk = self.sub.disc, self.comp.disc if self.comp.rank else None
        cands = []
        for h in self.H:
            a = Ds.add(p[0], h[0])
            b = Dk.add(p[1], h[1]) if Dk else ()
            cands.append((a, b))
        return min(cands)


def _comp_disc_action(K, X):
    D = K.disc
    return {el: D.residue(im.matvec(X, D.lift(el))) for el in D.elements}


def valid_pairs(ctx, sub_basis, comp_basis, line=None):
    """Pairs (a in O(A_sub), X in O(K)) that glue to an element of Gamma.

    ``line`` (L0 coordinates, inside K) restricts X to those fixing the line.
    Returns (pair data, list of (a as dict, X)).
    """
    ck = (tuple(map(tuple, sub_basis)), tuple(map(tuple, comp_basis)), tuple(line) if line else None)
    if ck not in ctx._pair_cache:
        ctx._pair_cache[ck] = _valid_pairs(ctx, sub_basis, comp_basis, line)
    return ctx._pair_cache[ck]


def _valid_pairs(ctx, sub_basis, comp_basis, line):
    pd = _PairData(ctx, sub_basis, comp_basis)
    Ds = pd.sub.disc
    K = pd.comp
    auts = definite_aut_group(K) if K.rank else [[]]
    if line is not None:
        lc = im.solve(im.from_columns(comp_basis, ctx.L0.rank), [Fraction(x) for x in line])
        auts = [X for X in auts if im.matvec(X, lc) in (lc, [-x for x in lc])]
    kacts = [(X, _comp_disc_action(K, X) if K.rank else {(): ()}) for X in auts]
    out = []
    sub_isos = Ds.isometries
    for img in sub_isos:
        amap = {el: Ds.apply(img, el) for el in Ds.elements}
        for X, bmap in kacts:
            if any((amap[h[0]], bmap[h[1]]) not in pd.H for h in pd.H):
                continue
            perm = []
            for p in pd.z_pairs:
                q = (amap[p[0]], bmap[p[1]])
                perm.append(pd.coset_of[pd._coset(q)])
            if ctx.in_gamma(perm):
                out.append((amap, X))
    return pd, out


def stabilizer_action(ctx, cls_or_basis, comp_basis=None, line=None):
    """Image of Stab_Gamma(L) in O(A_L) / +-1, as a FiniteActionGroup.

    Computed from pairs (a, X) with a in O(A_L), X in O(K) that are
    compatible with the glue group and induce an element of Gamma on A_L0.
    """
    if isinstance(cls_or_basis, SublatticeClass):
        if cls_or_basis.corank == 0:
            return ctx.group
        basis, comp_basis = cls_or_basis.basis, cls_or_basis.comp_basis
    else:
        basis = cls_or_basis
    pd, pairs = valid_pairs(ctx, basis, comp_basis, line)
    Ds = pd.sub.disc
    perms = {tuple(Ds.index[a[x]] for x in Ds.elements) for a, _ in pairs}
    return FiniteActionGroup(Ds, perms)


def transfer_index(ctx, flag):
    """[G_{L''} : G_{L''/L}] for the flag L'' inside its parent L."""
    sb, _ = _ambient_basis_of_flag(ctx, flag)
    full = stabilizer_action(ctx, sb, flag.comp_basis)
    if flag.parent.corank == 0:
        return 1
    part = stabilizer_action(ctx, sb, flag.comp_basis, line=flag.parent.vector)
    if full.order % part.order:
        raise AssertionError("stabilizer of the flag is not a subgroup")
    return full.order // part.order


def ramification_index(ctx, w, parent=None):
    """2 if the reflection in w (in L0 coordinates), combined with some
    automorphism of the parent's complement, lies in Gamma; else 1."""
    L0 = ctx.L0
    n = L0.rank
    G = [list(r) for r in L0.gram]
    w = [Fraction(x) for x in w]
    nw = im.bilinear(G, w, w)
    Gw = im.matvec(G, w)
    refl = [[Fraction(int(i == j)) - 2 * w[i] * Gw[j] / nw for j in range(n)] for i in range(n)]
    extras = [im.identity(n)]
    if parent is not None and parent.corank > 0:
        extras = _complement_extensions(ctx, parent)
    D = ctx.disc
    for Y in extras:
        g = im.matmul(refl, Y)
        if not all(im.is_integral(row) for row in g):
            continue
        perm = tuple(D.index[D.residue(im.matvec(g, D.lift(z)))] for z in D.elements)
        if ctx.in_gamma(perm):
            return 2
    return 1


def _complement_extensions(ctx, parent):
    """Maps of L0 acting as X on the parent's complement and as identity on the parent."""
    n = ctx.L0.rank
    cols = parent.basis + parent.comp_basis
    B = im.from_columns(cols, n)
    Binv = im.inverse(B)
    K = ctx.L0.sublattice(parent.comp_basis)
    r = len(parent.basis)
    out = []
    for X in definite_aut_group(K):
        k = len(X)
        blk = im.identity(n)
        for i in range(k):
            for j in range(k):
                blk[r + i][r + j] = X[i][j]
        out.append(im.matmul(im.matmul(B, blk), Binv))
    return out


def transfer_average(terms, group, subgroup, act):
    """sum over G/G~ of gamma(omega) for a G~-invariant omega.

    ``terms`` is any value supporting ``act(g, terms)``, ``+`` via the
    caller's ``add``; here we take dict-valued vectors.
    """
    for h in subgroup.elements:
        if act(h, terms) != terms:
            raise ValueError("input is not invariant under the subgroup")
    reps = coset_representatives(group, subgroup)
    out = {}
    for g in reps:
        for k, v in act(g, terms).items():
            out[k] = out.get(k, 0) + v
    return {k: v for k, v in out.items() if v != 0}


def coset_representatives(group, subgroup):
    sub = set(subgroup.elements)
    covered = set()
    reps = []
    for g in group.elements:
        if g in covered:
            continue
        reps.append(g)
        for h in sub:
            covered.add(group.compose(g, h))
    return reps


# ---------------------------------------------------------------------------
# definite lattices up to isometry


def classify_definite(rank, det_bound):
    """Negative definite even lattices of the given rank with |det| <= bound."""
    seen = {}
    if rank == 1:
        for m in range(2, det_bound + 1, 2):
            L = rank_one(-m)
            seen[(L.gram,)] = L
        return list(seen.values())
    if rank not in (2, 3):
        raise ValueError("classify_definite supports rank <= 3")
    # Minkowski reduced positive forms: |2 G_ij| <= G_ii, and the product of
    # the diagonal is at most (4/3) det in rank 2, 2 det in rank 3.
    hermite = {2: Fraction(4, 3), 3: 2}[rank]
    cands = []
    maxdiag = int(hermite * det_bound)
    diags = list(range(2, maxdiag + 1, 2))
    for ds in itertools.combinations_with_replacement(diags, rank):
        prod = 1
        for a in ds:
            prod *= a
        if prod > hermite * det_bound:
            continue
        pairs = [(i, j) for i in range(rank) for j in range(i + 1, rank)]
        ranges = [range(-(ds[i] // 2), ds[i] // 2 + 1) for i, _ in pairs]
        for offs in itertools.product(*ranges):
            G = [[0] * rank for _ in range(rank)]
            for i in range(rank):
                G[i][i] = ds[i]
            for (i, j), x in zip(pairs, offs):
                G[i][j] = G[j][i] = x
            if im.signature(G) != (rank, 0):
                continue
            dt = int(im.det(G))
            if dt > det_bound:
                continue
            cands.append(G)
    for G in cands:
        L = make_lattice([[-x for x in row] for row in G])
        C, _ = canonical_bases(L)
        key = tuple(tuple(r) for r in C)
        if key not in seen:
            seen[key] = make_lattice(C)
    return sorted(seen.values(), key=lambda L: (abs(L.det), L.gram))

"""The truncated complex: wedge spaces, residues, boundaries, and checks.

Wedges are stored over a fixed ordered basis of a :class:`TruncatedSpace`
as sparse maps from strictly increasing index tuples to coefficients.
"""

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import intmat as im
from .mspace import (InputError, admissible_keys, coordinates, from_coordinates, lin_comb,
                     nutilde, quasi_pullback, realizable_subspace)
from .orbits import (UnsupportedRegime, classify_corank1, classify_corank2, ramification_index,
                     stabilizer_action, sub_flags, transfer_index, whole_class)


class NotInSpace(ValueError):
    pass


class RangeError(ValueError):
    code = "range"


# ---------------------------------------------------------------------------
# spaces and wedges


class TruncatedSpace:
    """M(L) cut off at pole order B, with an explicit ordered basis.

    In formal mode the basis is the symmetric coordinate basis; with an
    obstruction basis it is the exact kernel of the obstruction functionals.
    """

    def __init__(self, lattice, pole_bound, ob=None):
        self.lattice = lattice
        self.pole_bound = Fraction(pole_bound)
        self.keys = admissible_keys(lattice, pole_bound)
        self.mode = "formal" if ob is None else "realizable"
        self.rows = [[Fraction(x) for x in r] for r in realizable_subspace(lattice, pole_bound, ob)]
        self.basis = [from_coordinates(lattice, self.keys, r) for r in self.rows]
        self._key_index = {k: i for i, k in enumerate(self.keys)}
        self._solver = None

    @property
    def dim(self):
        return len(self.rows)

    def coords(self, f):
        """Coordinates of the principal part of f in this basis."""
        try:
            v = coordinates(f, self.keys)
        except InputError as e:
            raise NotInSpace(str(e))
        if self.mode == "formal":
            return v
        x = im.solve(im.transpose(self.rows), v) if self.rows else None
        if x is None:
            if not any(v):
                return []
            raise NotInSpace("input is not in the realizable subspace")
        return x

    def key_action(self, group, g):
        D = self.lattice.disc
        perm = []
        for el, n in self.keys:
            img = D.orbit_rep(group.act(g, el))
            perm.append(self._key_index[(img, n)])
        return perm

    def action_matrix(self, group, g):
        """Matrix (columns = images of basis vectors) of g on this space."""
        perm = self.key_action(group, g)
        cols = []
        for r in self.rows:
            img = [Fraction(0)] * len(self.keys)
            for i, x in enumerate(r):
                img[perm[i]] += x
            if self.mode == "formal":
                cols.append(img)
            else:
                x = im.solve(im.transpose(self.rows), img)
                if x is None:
                    raise NotInSpace("group action does not preserve the space")
                cols.append(x)
        return cols


@dataclass
class WedgeElement:
    degree: int
    terms: dict = field(default_factory=dict)

    def __post_init__(self):
        self.terms = {tuple(k): Fraction(v) for k, v in self.terms.items() if v != 0}
        for k in self.terms:
            if len(k) != self.degree or any(a >= b for a, b in zip(k, k[1:])):
                raise ValueError("wedge index %s is not strictly increasing of length %d" % (k, self.degree))

    def is_zero(self):
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return WedgeElement(self.degree, out)

    def scale(self, a):
        return WedgeElement(self.degree, {k: a * v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + other.scale(-1)

    def __eq__(self, other):
        return isinstance(other, WedgeElement) and self.degree == other.degree and self.terms == other.terms

    def vector(self, index):
        return [self.terms.get(k, Fraction(0)) for k in index]


def wedge_index(dim, q):
    return list(itertools.combinations(range(dim), q))


def _perm_sign(seq):
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


def wedge_of_vectors(vectors, coeff=1):
    """v_1 ^ ... ^ v_q for coordinate vectors, expanded multilinearly."""
    q = len(vectors)
    supports = [[(i, x) for i, x in enumerate(v) if x] for v in vectors]
    out = {}
    for combo in itertools.product(*supports):
        idx = [i for i, _ in combo]
        if len(set(idx)) < q:
            continue
        c = Fraction(coeff)
        for _, x in combo:
            c *= x
        key = tuple(sorted(idx))
        out[key] = out.get(key, 0) + _perm_sign(idx) * c
    return WedgeElement(q, out)


def wedge_inputs(space, omega):
    """Yield (coefficient, list of ModularInputs) for each term of omega."""
    for k, c in sorted(omega.terms.items()):
        yield c, [space.basis[i] for i in k]


def act_on_wedge(space, group, g, omega):
    cols = space.action_matrix(group, g)
    out = WedgeElement(omega.degree)
    for k, c in omega.terms.items():
        out = out + wedge_of_vectors([cols[i] for i in k], c)
    return out


def invariant_wedge_basis(space, q, group=None):
    """Basis of the G-invariants in the q-th exterior power (Reynolds + RREF)."""
    index = wedge_index(space.dim, q)
    if not index:
        return []
    if group is None or group.order == 1:
        return [WedgeElement(q, {k: 1}) for k in index]
    mats = [space.action_matrix(group, g) for g in group.elements]
    rows = []
    for k in index:
        acc = {}
        for cols in mats:
            w = wedge_of_vectors([cols[i] for i in k])
            for kk, v in w.terms.items():
                acc[kk] = acc.get(kk, 0) + v
        rows.append([acc.get(kk, Fraction(0)) / group.order for kk in index])
    R, piv = im.rref(rows)
    return [WedgeElement(q, dict(zip(index, R[i]))) for i in range(len(piv))]


def coords_in_basis(omega, basis, index):
    """Coordinates of omega in a list of wedge basis elements."""
    if not basis:
        if omega.is_zero():
            return []
        raise NotInSpace("nonzero wedge in a zero space")
    A = im.transpose([b.vector(index) for b in basis])
    x = im.solve(A, omega.vector(index))
    if x is None:
        raise NotInSpace("wedge is not in the span of the invariant basis")
    return x


# ---------------------------------------------------------------------------
# residues


def _nu(f, w, r):
    return nutilde(f, w) / r


def residue_inputs(fs, w, r, sub_basis, trunc=None, pivot="first", check_c00=True):
    """Res of f_1 ^ ... ^ f_q along w^perp as (scalar, list of pulled-back inputs).

    A slot with nonzero order is used as pivot; the other slots are made
    order-free by subtracting multiples of it, so every factor that gets
    pulled back has order zero.  ``pivot`` is 'first', 'last', or an index.
    Returns None when every order vanishes.
    """
    nus = [_nu(f, w, r) for f in fs]
    live = [i for i, x in enumerate(nus) if x != 0]
    if not live:
        return None
    if pivot == "first":
        p = live[0]
    elif pivot == "last":
        p = live[-1]
    else:
        p = pivot
        if nus[p] == 0:
            raise ValueError("pivot slot has order zero")
    out = []
    for j, f in enumerate(fs):
        if j == p:
            continue
        g = lin_comb([(1, f), (-nus[j] / nus[p], fs[p])])
        pb = quasi_pullback(g, sub_basis, trunc)
        if check_c00 and f.c00 == 0 and fs[p].c00 == 0 and pb.c00 != 0:
            raise AssertionError("pulled-back factor has nonzero constant term")
        out.append(pb)
    return (-1) ** p * nus[p], out


def residue(space, omega, w, r, sub_basis, target, trunc=None, pivot="first"):
    """Res: wedge^q M(L) -> wedge^{q-1} M(L') for L' = w^perp (w in L coordinates)."""
    out = WedgeElement(omega.degree - 1)
    for c, fs in wedge_inputs(space, omega):
        res = residue_inputs(fs, w, r, sub_basis, trunc, pivot)
        if res is None:
            continue
        scal, pbs = res
        out = out + wedge_of_vectors([target.coords(g) for g in pbs], c * scal)
    return out


def residue_direct(fs, w, r, sub_basis, target, trunc=None):
    """The unnormalized formula sum_i (-1)^(i-1) nu(f_i) ^_{j != i} f_j|_{L'}."""
    out = WedgeElement(len(fs) - 1)
    for i, f in enumerate(fs):
        nu = _nu(f, w, r)
        if nu == 0:
            continue
        pbs = [quasi_pullback(g, sub_basis, trunc) for j, g in enumerate(fs) if j != i]
        out = out + wedge_of_vectors([target.coords(g) for g in pbs], (-1) ** i * nu)
    return out


# ---------------------------------------------------------------------------
# the complex


@dataclass
class Term:
    label: str
    cls: object
    space: TruncatedSpace
    group: object
    basis: list      # invariant wedge basis
    q: int

    @property
    def dim(self):
        return len(self.basis)


@dataclass
class ComplexInstance:
    params: dict
    terms: list          # per degree: list of Term
    boundaries: list     # boundaries[k]: matrix from degree k to k+1 (rows = target)
    mode: str = "formal"

    def dims(self):
        return [sum(t.dim for t in ts) for ts in self.terms]


def _spaces_for(lattice, B, obstructions):
    from .lattice import lattice_hash
    ob = None
    if obstructions:
        ob = obstructions.get(lattice_hash(lattice))
    return TruncatedSpace(lattice, B, ob)


def _deg0_block(src_space, src_basis, w, r, sub_basis, space, basis, q, trunc):
    idx = wedge_index(space.dim, q)
    return [coords_in_basis(residue(src_space, b, w, r, sub_basis, space, trunc), basis, idx)
            for b in src_basis]


def _deg1_block(space, basis, flags, trunc):
    """Per (row key, column j) the transferred scalar residues of one corank-1 term."""
    out = {}
    for key, w, rr, ix, fbasis in flags:
        for j, b in enumerate(basis):
            v = ix * residue(space, b, w, rr, fbasis, None, trunc).terms.get((), 0)
            if v:
                out[(key, j)] = out.get((key, j), 0) + v
    return out


def _run_jobs(fn, tasks, jobs):
    """Map ``fn`` over argument tuples, in a process pool when jobs > 1; order is kept."""
    if jobs and jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, *zip(*tasks)))
    return [fn(*t) for t in tasks]


def assemble_complex(ctx, p, pole_bound, trunc=None, obstructions=None, jobs=1):
    """Degrees 0..p of the truncated complex for the ambient ``ctx``.

    Supported for p <= 2 (p <= n is required in any case).  With jobs > 1
    the residue blocks are computed in worker processes; blocks are merged
    in class order, so the result does not depend on scheduling.
    """
    if p > ctx.n:
        raise RangeError("p = %d exceeds n = %d" % (p, ctx.n))
    if p < 1:
        raise RangeError("p must be at least 1")
    if p > 2:
        raise UnsupportedRegime("complexes are assembled for p <= 2")
    B = Fraction(pole_bound)
    trunc = Fraction(trunc) if trunc is not None else B
    if trunc < B:
        raise RangeError("theta truncation must cover the pole bound")
    mode = "realizable" if obstructions else "formal"
    L0cls = whole_class(ctx)
    G0 = ctx.group
    S0 = _spaces_for(ctx.L0, B, obstructions)
    terms = [[Term("L0", L0cls, S0, G0, invariant_wedge_basis(S0, p, G0), p)]]
    deg1 = []
    for P in classify_corank1(ctx, B):
        G = stabilizer_action(ctx, P)
        S = _spaces_for(P.lattice, B, obstructions)
        deg1.append(Term(P.label, P, S, G, invariant_wedge_basis(S, p - 1, G), p - 1))
    terms.append(deg1)
    if p == 2:
        terms.append([Term(Q.label, Q, None, None, [WedgeElement(0, {(): 1})], 0)
                      for Q in classify_corank2(ctx, B)])
    bounds = []
    # degree 0 -> 1
    src = terms[0][0]
    tasks = [(src.space, src.basis, t.cls.vector, ramification_index(ctx, t.cls.vector),
              t.cls.basis, t.space, t.basis, t.q, trunc) for t in deg1]
    rows = []
    for t, block in zip(deg1, _run_jobs(_deg0_block, tasks, jobs)):
        rows.extend(im.transpose(block) if block and t.dim else [[] for _ in range(t.dim)])
    bounds.append(rows)
    if p == 2:
        qindex = {t.cls.key: i for i, t in enumerate(terms[2])}
        nsrc = sum(t.dim for t in deg1)
        M = [[Fraction(0)] * nsrc for _ in terms[2]]
        tasks = []
        for t in deg1:
            P = t.cls
            flags = [(fl.class_key, fl.w, ramification_index(ctx, fl.w_ambient, P),
                      transfer_index(ctx, fl), fl.basis)
                     for fl in sub_flags(ctx, P, B) if fl.class_key in qindex]
            tasks.append((t.space, t.basis, flags, trunc))
        col = 0
        for t, block in zip(deg1, _run_jobs(_deg1_block, tasks, jobs)):
            for (key, j), v in block.items():
                M[qindex[key]][col + j] += v
            col += t.dim
        bounds.append(M)
    params = {"gram": [list(r) for r in ctx.L0.gram], "gamma": ctx.gamma.kind, "p": p,
              "pole_bound": B, "trunc": trunc}
    return ComplexInstance(params, terms, bounds, mode)


def _product(A, B):
    if not A or not B or not B[0]:
        return [[Fraction(0)] * (len(B[0]) if B and B[0] else 0) for _ in A]
    return im.matmul(A, B)


def verify_d2(inst):
    """Exact check that consecutive boundaries compose to zero."""
    report = {"zero": True, "products": [], "directions": []}
    for k in range(len(inst.boundaries) - 1):
        P = _product(inst.boundaries[k + 1], inst.boundaries[k])
        nz = [(i, j, v) for i, row in enumerate(P) for j, v in enumerate(row) if v != 0]
        report["products"].append({"degree": k, "nonzero": len(nz)})
        if nz:
            report["zero"] = False
            report["directions"].extend(sorted({(k, j) for _, j, _ in nz}))
    return report


def cohomology_ranks(inst, report=None):
    if report is None:
        report = verify_d2(inst)
    if not report["zero"]:
        raise ValueError("boundary maps do not square to zero")
    dims = inst.dims()
    ranks = [im.rank(M) if M and M[0] else 0 for M in inst.boundaries]
    out = []
    for k, d in enumerate(dims):
        rk_out = ranks[k] if k < len(ranks) else 0
        rk_in = ranks[k - 1] if k > 0 else 0
        out.append(d - rk_out - rk_in)
    return out


# ---------------------------------------------------------------------------
# cocycle checks for p = 2


def cocycle_check_p1(ctx, chain, pole_bound):
    """Boundary of sum_i [f_i on P_i] in degree 2; passes iff it vanishes.

    ``chain`` is a list of (corank-1 class, ModularInput on its representative).
    Returns (passed, residual) with residual a dict class key -> rational.
    """
    residual = {}
    for P, f in chain:
        if P.corank != 1:
            raise ValueError("cocycle entries must sit on corank-1 classes")
        if f.lattice != P.lattice:
            raise ValueError("input does not live on the class representative")
        for fl in sub_flags(ctx, P, pole_bound):
            rr = ramification_index(ctx, fl.w_ambient, P)
            ix = transfer_index(ctx, fl)
            v = ix * nutilde(f, fl.w) / rr
            if v:
                residual[fl.class_key] = residual.get(fl.class_key, 0) + v
    residual = {k: v for k, v in residual.items() if v != 0}
    return not residual, residual


def cocycle_check_p2(ctx, chain, pole_bound, trunc=None):
    """Boundary of sum_i f_i ^ g_i on L0 in degree 1.

    Per corank-1 class the residual is (sum nu(f_i) g_i - nu(g_i) f_i)|_{L'}.
    """
    residual = {}
    for P in classify_corank1(ctx, pole_bound):
        r = ramification_index(ctx, P.vector)
        acc = None
        for cls, (f, g) in chain:
            if cls.corank != 0:
                raise ValueError("degree-0 chain entries must sit on L0")
            nf, ng = nutilde(f, P.vector) / r, nutilde(g, P.vector) / r
            term = lin_comb([(nf, g), (-ng, f)])
            acc = term if acc is None else acc + term
        if acc is None:
            continue
        pb = quasi_pullback(acc, P.basis, trunc)
        if not pb.is_zero():
            residual[P.key] = pb
    return not residual, residual


# ---------------------------------------------------------------------------
# export


def _sparse(M):
    return [[i, j, [v.numerator, v.denominator]] for i, row in enumerate(M)
            for j, v in enumerate(row) if v != 0]


def export_bundle(inst):
    def frac(x):
        x = Fraction(x)
        return [x.numerator, x.denominator]
    params = dict(inst.params)
    params["pole_bound"] = frac(params["pole_bound"])
    params["trunc"] = frac(params["trunc"])
    degrees = []
    for k, ts in enumerate(inst.terms):
        degrees.append([{"label": t.label, "gram": [list(r) for r in t.cls.lattice.gram],
                         "dim": t.dim,
                         "basis": [[[list(i), frac(c)] for i, c in sorted(b.terms.items())] for b in t.basis]}
                        for t in ts])
    bundle = {"params": params, "mode": inst.mode, "degrees": degrees,
              "boundaries": [{"shape": [len(M), len(M[0]) if M else 0], "entries": _sparse(M)}
                             for M in inst.boundaries]}
    return json.dumps(bundle, sort_keys=True, separators=(",", ":"))

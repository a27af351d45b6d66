"""Principal parts of weakly holomorphic forms and the maps that read them.

A :class:`ModularInput` stores the negative-exponent coefficients c(lam, n)
and the constant term c(0, 0).  Everything downstream (orders of vanishing,
quasi-pullbacks, residues) only ever reads this data.
"""

import json
from dataclasses import dataclass
from fractions import Fraction

from . import intmat as im
from .lattice import Lattice, glue, make_lattice, mod1, orth_complement
from .qseries import preimages, theta_series


class InputError(ValueError):
    code = "input"


class SymmetryError(InputError):
    code = "symmetry"


class CongruenceError(InputError):
    code = "congruence"


class TruncShortfall(ValueError):
    code = "trunc-shortfall"


class Infeasible(ValueError):
    code = "infeasible"

    def __init__(self, message, rows=()):
        super().__init__(message)
        self.rows = list(rows)


class CoverageGap(ValueError):
    code = "coverage"


@dataclass(frozen=True)
class ModularInput:
    lattice: Lattice
    pp: tuple  # sorted ((element, n), c) pairs, c != 0
    c00: Fraction = Fraction(0)

    @property
    def coeffs(self):
        return dict(self.pp)

    def c(self, el, n):
        return self.coeffs.get((tuple(el), Fraction(n)), Fraction(0))

    @property
    def depth(self):
        """Largest pole order -n."""
        return max((-n for (_, n), _ in self.pp), default=Fraction(0))

    def is_zero(self):
        return not self.pp and self.c00 == 0

    def __add__(self, other):
        return lin_comb([(1, self), (1, other)])

    def __sub__(self, other):
        return lin_comb([(1, self), (-1, other)])

    def __rmul__(self, a):
        return lin_comb([(a, self)])

    def __neg__(self):
        return lin_comb([(-1, self)])

    def __repr__(self):
        terms = ", ".join("c(%s,%s)=%s" % (el, n, c) for (el, n), c in self.pp)
        return "ModularInput({%s}, c00=%s)" % (terms, self.c00)


def _freeze(L, pp, c00):
    pp = {(tuple(el), Fraction(n)): Fraction(c) for (el, n), c in pp.items()}
    items = tuple(sorted((k, v) for k, v in pp.items() if v != 0))
    return ModularInput(L, items, Fraction(c00))


def make_input(L, pp, c00=0):
    """Validated input.  ``pp`` maps (element, n) with n < 0 to c(element, n)."""
    D = L.disc
    clean = {}
    for (el, n), c in pp.items():
        el = D.reduce(el)
        n = Fraction(n)
        if n >= 0:
            raise InputError("principal part exponent %s is not negative" % n)
        if mod1(n - D.q(el) / 2) != 0:
            raise CongruenceError("exponent %s not congruent to q(%s)/2 mod 1" % (n, el))
        clean[(el, n)] = clean.get((el, n), 0) + Fraction(c)
    for (el, n), c in clean.items():
        if clean.get((D.neg(el), n), 0) != c:
            raise SymmetryError("c(%s,%s) differs from c(-%s,%s)" % (el, n, el, n))
    return _freeze(L, clean, c00)


def zero_input(L):
    return ModularInput(L, (), Fraction(0))


def lin_comb(pairs):
    """sum a_i f_i for inputs on the same lattice."""
    pairs = list(pairs)
    L = pairs[0][1].lattice
    out = {}
    c00 = Fraction(0)
    for a, f in pairs:
        if f.lattice != L:
            raise InputError("inputs live on different lattices")
        a = Fraction(a)
        for k, v in f.pp:
            out[k] = out.get(k, 0) + a * v
        c00 += a * f.c00
    return _freeze(L, out, c00)


# ---------------------------------------------------------------------------
# admissible coordinates


def admissible_keys(L, pole_bound):
    """Pairs (lam, n), lam up to sign, with -pole_bound <= n < 0 allowed by q.

    Sorted by (|n|, lam): shallow poles first.
    """
    D = L.disc
    B = Fraction(pole_bound)
    keys = []
    for el in D.elements:
        if D.orbit_rep(el) != el:
            continue
        base = mod1(D.q(el) / 2)
        n = base - 1 if base != 0 else Fraction(-1)
        while n >= -B:
            keys.append((el, n))
            n -= 1
    keys.sort(key=lambda k: (-k[1], k[0]))
    return keys


def coordinates(f, keys):
    """Coordinates of f in the symmetric basis indexed by ``keys``."""
    co = f.coeffs
    known = set(keys)
    D = f.lattice.disc
    for (el, n) in co:
        if (D.orbit_rep(el), n) not in known:
            raise InputError("input has a pole outside the coordinate range")
    return [co.get(k, Fraction(0)) for k in keys]


def from_coordinates(L, keys, vec, c00=0):
    D = L.disc
    pp = {}
    for (el, n), c in zip(keys, vec):
        if c:
            pp[(el, n)] = c
            pp[(D.neg(el), n)] = c
    return _freeze(L, pp, c00)


def basis_input(L, key):
    D = L.disc
    el, n = key
    return _freeze(L, {(el, n): 1, (D.neg(el), n): 1}, 0)


# ---------------------------------------------------------------------------
# orders of vanishing


def nutilde(f, l):
    """Sum over alpha > 0 with alpha*l in L^v of c(alpha*l, alpha^2 (l,l)/2)."""
    L = f.lattice
    l = [int(x) for x in l]
    nrm = L.norm(l)
    if nrm >= 0:
        raise InputError("nutilde needs a vector of negative norm")
    if im.content(l) != 1:
        raise InputError("nutilde needs a primitive vector")
    d = L.divisor(l)
    D = L.disc
    co = f.coeffs
    depth = f.depth
    total = Fraction(0)
    k = 1
    while True:
        a = Fraction(k, d)
        n = a * a * nrm / 2
        if -n > depth:
            break
        el = D.residue([a * x for x in l])
        total += co.get((el, n), 0)
        k += 1
    return total


def nutilde_functional(L, l, keys):
    """Row vector r with nutilde(f, l) = r . coordinates(f, keys)."""
    return [nutilde(basis_input(L, k), l) for k in keys]


# ---------------------------------------------------------------------------
# quasi-pullback


class _PullbackPlan:
    """Everything about (L, L') needed to contract with a theta series."""

    def __init__(self, L, sub_basis, trunc):
        self.L = L
        self.sub_basis = [list(v) for v in sub_basis]
        self.sub = L.sublattice(self.sub_basis)
        K, kb = orth_complement(L, self.sub_basis)
        self.comp_basis = kb
        self.K = K
        self.gd = glue(L, self.sub_basis, kb)
        self.theta = theta_series(K, trunc)
        self.pre = preimages(self.gd)
        self.trunc = Fraction(trunc)


_PLANS = {}


def pullback_plan(L, sub_basis, trunc):
    key = (L.gram, tuple(tuple(v) for v in sub_basis), Fraction(trunc))
    plan = _PLANS.get(key)
    if plan is None:
        plan = _PLANS[key] = _PullbackPlan(L, sub_basis, trunc)
    return plan


def quasi_pullback(f, sub_basis, trunc=None):
    """f|_{L'} for the primitive sublattice spanned by ``sub_basis``.

    Contraction of f lifted to L' + K with the theta series of K(-1).  Only
    the principal part and c(0, 0) of the result are returned; both are
    exact as soon as ``trunc`` covers the pole depth of f.
    """
    depth = f.depth
    if trunc is None:
        trunc = depth
    trunc = Fraction(trunc)
    if trunc < depth:
        raise TruncShortfall("theta truncation %s below pole depth %s" % (trunc, depth))
    plan = pullback_plan(f.lattice, sub_basis, trunc)
    sub = plan.sub
    theta = {}
    for (delta, e), c in plan.theta.coeffs.items():
        theta.setdefault(delta, []).append((e, c))
    out = {}
    c00 = Fraction(f.c00)  # only (0,0) in the glue group has trivial comp part
    zero_sub = sub.disc.zero
    for (lam, n), c in f.pp:
        for beta, delta in plan.pre.get(lam, ()):
            for e, t in theta.get(delta, ()):
                m = n + e
                if m < 0:
                    out[(beta, m)] = out.get((beta, m), 0) + c * t
                elif m == 0 and beta == zero_sub:
                    c00 += c * t
    return _freeze(sub, out, c00)


# ---------------------------------------------------------------------------
# prescribing divisors


def solve_principal_part(L, targets, pole_bound, others=()):
    """Principal part with prescribed nutilde values.

    ``targets`` is a list of (vector l, value); ``others`` lists vectors on
    which nutilde must vanish.  Unknowns are ordered shallow poles first and
    free unknowns are set to zero, so the solution is deterministic.
    """
    keys = admissible_keys(L, pole_bound)
    rows, rhs, labels = [], [], []
    for i, (l, val) in enumerate(targets):
        rows.append(nutilde_functional(L, l, keys))
        rhs.append(Fraction(val))
        labels.append(("target", i))
    for j, l in enumerate(others):
        rows.append(nutilde_functional(L, l, keys))
        rhs.append(Fraction(0))
        labels.append(("other", j))
    if not keys:
        if any(rhs):
            raise Infeasible("no admissible poles", labels)
        return zero_input(L)
    x = im.solve(rows, rhs) if rows else [Fraction(0)] * len(keys)
    if x is None:
        raise Infeasible("prescribed orders are inconsistent", _inconsistent_rows(rows, rhs, labels))
    return from_coordinates(L, keys, x)


def _inconsistent_rows(rows, rhs, labels):
    """A small set of equations that is already inconsistent."""
    chosen = []
    for i in range(len(rows)):
        chosen.append(i)
        if im.solve([rows[j] for j in chosen], [rhs[j] for j in chosen]) is None:
            # drop rows that are not needed for the contradiction
            for j in list(chosen[:-1]):
                trial = [k for k in chosen if k != j]
                if im.solve([rows[k] for k in trial], [rhs[k] for k in trial]) is None:
                    chosen = trial
            return [labels[j] for j in chosen]
    return []


# ---------------------------------------------------------------------------
# obstructions


@dataclass
class ObstructionBasis:
    lattice: Lattice
    weight: Fraction
    bound: Fraction
    functionals: list  # dicts (element, n > 0) -> a
    c00_functional: dict = None


def obstruction_pair(f, ob):
    if f.depth > ob.bound:
        raise CoverageGap("obstruction tables cover n <= %s, input has depth %s" % (ob.bound, f.depth))
    out = []
    for a in ob.functionals:
        out.append(sum((c * a.get((el, -n), 0) for (el, n), c in f.pp), Fraction(0)))
    return out


def realizable_subspace(L, pole_bound, ob=None):
    """Rows spanning the pp-coordinate vectors killed by every functional.

    With a c00-functional present (c00(f) = pairing with that table), the
    condition c00 = 0 is imposed as well.  Coordinates are with respect to
    ``admissible_keys(L, pole_bound)``.
    """
    keys = admissible_keys(L, pole_bound)
    n = len(keys)
    if ob is None:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    if ob.bound < pole_bound:
        raise CoverageGap("obstruction tables cover n <= %s, need %s" % (ob.bound, pole_bound))
    tables = list(ob.functionals)
    if ob.c00_functional:
        tables.append(ob.c00_functional)
    rows = []
    for a in tables:
        rows.append([obstruction_pair(basis_input(L, k),
                                      ObstructionBasis(L, ob.weight, ob.bound, [a]))[0] for k in keys])
    if not rows:
        return realizable_subspace(L, pole_bound)
    return im.hnf_rational_columns(im.nullspace(rows, n))


# ---------------------------------------------------------------------------
# files


def _frac(x):
    return [x.numerator, x.denominator]


def input_record(f):
    return {"gram": [list(r) for r in f.lattice.gram],
            "pp": [[list(el), _frac(n), _frac(c)] for (el, n), c in f.pp],
            "c00": _frac(f.c00)}


def dumps_input(f):
    return json.dumps(input_record(f), sort_keys=True, separators=(",", ":"))


def loads_input(text, L=None):
    rec = json.loads(text)
    if L is None:
        L = make_lattice(rec["gram"])
    elif [list(r) for r in L.gram] != rec["gram"]:
        raise InputError("input was written for a different Gram matrix")
    pp = {(tuple(el), Fraction(*n)): Fraction(*c) for el, n, c in rec["pp"]}
    return make_input(L, pp, Fraction(*rec.get("c00", [0, 1])))


def obstruction_record(ob):
    def table(a):
        return [[list(el), _frac(Fraction(n)), _frac(Fraction(v))] for (el, n), v in sorted(a.items())]
    return {"gram": [list(r) for r in ob.lattice.gram], "weight": _frac(Fraction(ob.weight)),
            "bound": _frac(Fraction(ob.bound)),
            "functionals": [table(a) for a in ob.functionals],
            "c00_functional": table(ob.c00_functional) if ob.c00_functional else None}


def loads_obstructions(text):
    rec = json.loads(text)

    def table(rows):
        return {(tuple(el), Fraction(*n)): Fraction(*v) for el, n, v in rows}
    L = make_lattice(rec["gram"])
    c0 = rec.get("c00_functional")
    return ObstructionBasis(L, Fraction(*rec["weight"]), Fraction(*rec["bound"]),
                            [table(t) for t in rec["functionals"]], table(c0) if c0 else None)


def dumps_obstructions(ob):
    return json.dumps(obstruction_record(ob), sort_keys=True, separators=(",", ":"))

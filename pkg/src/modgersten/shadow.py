"""Divisor-level model of the K-theory side.

A symbol {psi(f_1), ..., psi(f_q)} on a cycle Z_L is recorded by its labels
f_i.  Nothing is ever reduced by Steinberg relations: two sides agree when
their label wedges agree in the truncated coordinate space.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from . import intmat as im
from .bgcomplex import TruncatedSpace, WedgeElement, residue_inputs, wedge_of_vectors
from .lattice import Lattice, orth_complement, short_vectors
from .mspace import lin_comb, nutilde, quasi_pullback
from .orbits import (UnsupportedRegime, classify_corank1, ramification_index, sub_flags,
                     transfer_index, valid_pairs)


@dataclass(frozen=True)
class FunctionSymbol:
    carrier: object = field(compare=False)
    label: object

    def __post_init__(self):
        if self.label.lattice != self.carrier.lattice:
            raise ValueError("label does not live on the carrier's lattice")


@dataclass
class DivisorOnCycle:
    carrier: object
    multiplicities: dict          # component key -> nu
    orders: dict                  # component key -> nutilde
    classes: dict = field(default_factory=dict)   # component key -> class key
    names: dict = field(default_factory=dict)     # component key -> short description

    def __add__(self, other):
        def add(a, b):
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + v
            return {k: v for k, v in out.items() if v != 0}
        return DivisorOnCycle(self.carrier, add(self.multiplicities, other.multiplicities),
                              add(self.orders, other.orders), {**self.classes, **other.classes},
                              {**self.names, **other.names})

    def is_zero(self):
        return not self.multiplicities


def divisor_of(ctx, symbol, pole_bound=None):
    """div psi(f) on its carrier: nu = nutilde / r on every component."""
    f = symbol.label
    B = pole_bound if pole_bound is not None else f.depth
    carrier = symbol.carrier
    mult, orders, classes, names = {}, {}, {}, {}
    if B <= 0:
        return DivisorOnCycle(carrier, {}, {})
    if carrier.corank == 0:
        for P in classify_corank1(ctx, B):
            v = nutilde(f, P.vector)
            if v:
                r = ramification_index(ctx, P.vector)
                orders[P.key] = v
                mult[P.key] = v / r
                classes[P.key] = P.key
                names[P.key] = P.label
    elif carrier.corank == 1:
        for fl in sub_flags(ctx, carrier, B):
            v = nutilde(f, fl.w)
            if v:
                r = ramification_index(ctx, fl.w_ambient, carrier)
                orders[fl.flag_key] = v
                mult[fl.flag_key] = v / r
                classes[fl.flag_key] = fl.class_key
                names[fl.flag_key] = "w=%s" % (fl.w,)
    else:
        raise UnsupportedRegime("divisors are computed on cycles of corank <= 1")
    return DivisorOnCycle(carrier, mult, orders, classes, names)


def tame_symbol_shadow(ctx, carrier, labels, target, pole_bound, trunc=None):
    """Boundary of {psi(f_1),...,psi(f_q)} along the component of Z_target.

    Returns a list of (coefficient, labels on the target representative).
    For q = 2 this is the valuation formula b^{v(a)}/a^{v(b)} written
    additively; for larger q a pivot with nonzero valuation is moved to the
    front and the remaining labels are made into units first.
    """
    if carrier.corank != 0:
        raise UnsupportedRegime("tame symbols are modelled from L0 only")
    r = ramification_index(ctx, target.vector)
    l = target.vector
    q = len(labels)
    if q == 1:
        return [(nutilde(labels[0], l) / r, [])]
    if q == 2:
        a, b = labels
        va, vb = nutilde(a, l) / r, nutilde(b, l) / r
        unit = lin_comb([(va, b), (-vb, a)])
        return [(Fraction(1), [quasi_pullback(unit, target.basis, trunc)])]
    res = residue_inputs(labels, l, r, target.basis, trunc, pivot="last")
    if res is None:
        return []
    return [res]


def _as_wedge(space, pieces):
    out = None
    for c, fs in pieces:
        w = wedge_of_vectors([space.coords(g) for g in fs], c)
        out = w if out is None else out + w
    return out


@dataclass
class _Line:
    """Corank-1 sublattice u^perp seen from the ambient, for ramification tests."""
    basis: list
    comp_basis: list
    corank: int = 1


def _preimage_components(ctx, carrier, target):
    """Components of the preimage of Z_target in Z_carrier, from the K side.

    Returns a list of (line vector u in L0 coordinates, index [G : G_u]).
    """
    K = ctx.L0.sublattice(target.comp_basis)
    lnorm = ctx.L0.norm(carrier.vector)
    E = im.from_columns(target.comp_basis, ctx.L0.rank)
    pd, pairs = valid_pairs(ctx, target.basis, target.comp_basis)
    Ds = pd.sub.disc
    full = {tuple(Ds.index[a[x]] for x in Ds.elements) for a, _ in pairs}
    full = _mod_sign(Ds, full)
    lines = []
    seen = set()
    for v, nrm in short_vectors(K.scaled(-1), -lnorm):
        if nrm != -lnorm:
            continue
        v = [int(x) for x in v]
        if im.content(v) != 1:
            continue
        key = min(tuple(v), tuple(-x for x in v))
        if key in seen:
            continue
        u = [int(x) for x in im.matvec(E, v)]
        if ctx.complement_key([u]) != carrier.key:
            continue
        # orbit of the line under the complement parts of valid pairs
        orbit = set()
        for _, X in pairs:
            img = im.matvec(X, v)
            orbit.add(min(tuple(img), tuple(-x for x in img)))
        seen |= orbit
        stab = {tuple(Ds.index[a[x]] for x in Ds.elements) for a, X in pairs
                if im.matvec(X, v) in (v, [-x for x in v])}
        stab = _mod_sign(Ds, stab)
        lines.append((u, len(full) // len(stab)))
    return lines


def _mod_sign(D, perms):
    neg = [D.index[D.neg(x)] for x in D.elements]
    return {min(p, tuple(neg[i] for i in p)) for p in perms}


def route_a(ctx, carrier, labels, target, pole_bound, trunc=None):
    """Boundary as the complex computes it: residues through C(target, carrier), then transfers."""
    if carrier.corank == 0:
        r = ramification_index(ctx, target.vector)
        res = residue_inputs(labels, target.vector, r, target.basis, trunc)
        return [] if res is None else [res]
    if len(labels) != 1:
        raise UnsupportedRegime("from corank 1 only q = 1 is modelled")
    total = Fraction(0)
    for fl in sub_flags(ctx, carrier, pole_bound):
        if fl.class_key != target.key:
            continue
        r = ramification_index(ctx, fl.w_ambient, carrier)
        total += transfer_index(ctx, fl) * nutilde(labels[0], fl.w) / r
    return [(total, [])]


def route_b(ctx, carrier, labels, target, pole_bound, trunc=None):
    """Boundary via tame symbols on the components of the preimage of Z_target."""
    if carrier.corank == 0:
        return tame_symbol_shadow(ctx, carrier, labels, target, pole_bound, trunc)
    if len(labels) != 1:
        raise UnsupportedRegime("from corank 1 only q = 1 is modelled")
    flags = {fl.flag_key: fl for fl in sub_flags(ctx, carrier, pole_bound)}
    total = Fraction(0)
    for u, index in _preimage_components(ctx, carrier, target):
        fkey = ctx.complement_key(target.comp_basis, marked=u)
        fl = flags.get(fkey)
        if fl is None:
            continue  # a component deeper than the pole bound: order zero
        # the ramification along this component, seen from u^perp
        w = _orth_in(ctx, target.comp_basis, u)
        _, ub = orth_complement(ctx.L0, [u])
        r = ramification_index(ctx, w, _Line(ub, [u]))
        total += index * nutilde(labels[0], fl.w) / r
    return [(total, [])]


def _orth_in(ctx, comp_basis, u):
    """The primitive vector of K orthogonal to u (K of rank 2)."""
    K = ctx.L0.sublattice(comp_basis)
    E = im.from_columns(comp_basis, ctx.L0.rank)
    uc = im.solve(E, [Fraction(x) for x in u])
    _, wb = orth_complement(K, [uc])
    if len(wb) != 1:
        raise UnsupportedRegime("complement of rank %d" % (len(wb) + 1))
    return [int(x) for x in im.matvec(E, wb[0])]


def chain_map_check(ctx, carrier, labels, target, pole_bound, trunc=None, ctx_b=None):
    """Compare the two routes for one symbol; returns (passed, value_a, value_b)."""
    a = route_a(ctx, carrier, labels, target, pole_bound, trunc)
    b = route_b(ctx_b or ctx, carrier, labels, target, pole_bound, trunc)
    if len(labels) == 1 or carrier.corank != 0:
        va = sum((c for c, _ in a), Fraction(0))
        vb = sum((c for c, _ in b), Fraction(0))
        return va == vb, va, vb
    space = TruncatedSpace(target.lattice, pole_bound)
    wa = _as_wedge(space, a) or WedgeElement(len(labels) - 1)
    wb = _as_wedge(space, b) or WedgeElement(len(labels) - 1)
    return wa == wb, wa, wb

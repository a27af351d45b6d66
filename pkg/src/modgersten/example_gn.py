"""The worked example on L0 = U + U + A1 + A1.

Basis of L0: e1, f1, e2, f2, a1, a2 with (a_i, a_i) = -2.  The three
corank-1 cycles are L1 = a2^perp, L2 = a1^perp, L3 = delta^perp with
delta = e1 - f1; their pairwise intersections are L12, L13, L23.
"""

from dataclasses import dataclass, field

from .bgcomplex import assemble_complex, cocycle_check_p1, verify_d2
from .lattice import a1, direct_sum, hyperbolic_plane
from .mspace import solve_principal_part
from .orbits import Ambient, classify_corank1, sub_flags
from .shadow import FunctionSymbol, divisor_of

E1 = [1, 0, 0, 0, 0, 0]
F1 = [0, 1, 0, 0, 0, 0]
A_1 = [0, 0, 0, 0, 1, 0]
A_2 = [0, 0, 0, 0, 0, 1]
DELTA = [1, -1, 0, 0, 0, 0]


def gn_lattice():
    U = hyperbolic_plane()
    return direct_sum(U, U, a1(), a1(), name="2U+2A1")


@dataclass
class GNData:
    ctx: Ambient
    pole_bound: int
    classes: dict                      # name -> corank-1 class
    flags: dict                        # (carrier name, target name) -> flag
    inputs: dict = field(default_factory=dict)   # name -> ModularInput on its representative
    divisors: dict = field(default_factory=dict)


def _pick(ctx, classes, vector):
    key = ctx.complement_key([vector])
    for c in classes:
        if c.key == key:
            return c
    raise LookupError("no class for %s" % (vector,))


def _pick_flag(ctx, carrier, comp, B):
    key = ctx.complement_key(comp)
    hits = [fl for fl in sub_flags(ctx, carrier, B) if fl.class_key == key]
    if len(hits) != 1:
        raise LookupError("expected one flag, found %d" % len(hits))
    return hits[0]


def build(gamma="hat", pole_bound=1):
    ctx = Ambient(gn_lattice(), gamma)
    B = pole_bound
    cls = classify_corank1(ctx, B)
    classes = {"L1": _pick(ctx, cls, A_2), "L2": _pick(ctx, cls, A_1), "L3": _pick(ctx, cls, DELTA)}
    pairs = {"L12": [A_1, A_2], "L13": [A_2, DELTA], "L23": [A_1, DELTA]}
    flags = {}
    for name, carrier in classes.items():
        for tname, comp in pairs.items():
            if name[1] in tname[1:]:
                flags[(name, tname)] = _pick_flag(ctx, carrier, comp, B)
    return GNData(ctx, B, classes, flags)


def _solve_on(data, carrier_name, targets):
    ctx, B = data.ctx, data.pole_bound
    carrier = data.classes[carrier_name]
    chosen = {data.flags[(carrier_name, t)].flag_key for t in targets}
    others = [fl.w for fl in sub_flags(ctx, carrier, B) if fl.flag_key not in chosen]
    tv = [(data.flags[(carrier_name, t)].w, v) for t, v in targets.items()]
    return solve_principal_part(carrier.lattice, tv, B, others=others)


def solve_inputs(data):
    """The three inputs of the cocycle: f on L1, -f' on L2, and the quotient on L3."""
    data.inputs["L1"] = _solve_on(data, "L1", {"L12": 6, "L13": -1})
    data.inputs["L2"] = -_solve_on(data, "L2", {"L12": 6, "L23": -1})
    data.inputs["L3"] = _solve_on(data, "L3", {"L13": 1, "L23": -1})
    for name, f in data.inputs.items():
        data.divisors[name] = divisor_of(data.ctx, FunctionSymbol(data.classes[name], f), data.pole_bound)
    return data


def divisor_by_name(data, name):
    """{target name: nutilde} for the named input, using the pair names."""
    div = data.divisors[name]
    out = {}
    for (carrier, tname), fl in data.flags.items():
        if carrier == name and fl.flag_key in div.orders:
            out[tname] = div.orders[fl.flag_key]
    extra = set(div.orders) - {fl.flag_key for (c, _), fl in data.flags.items() if c == name}
    if extra:
        out["other"] = sorted(div.orders[k] for k in extra)
    return out


def run(gamma="hat", pole_bound=1, with_complex=True):
    """The whole pipeline; returns a list of (name, value) report lines."""
    data = solve_inputs(build(gamma, pole_bound))
    lines = []
    for name in ("L1", "L2", "L3"):
        lines.append(("input %s" % name, data.inputs[name]))
    for name in ("L1", "L2", "L3"):
        lines.append(("div(%s input)" % name, divisor_by_name(data, name)))
    chain = [(data.classes[n], data.inputs[n]) for n in ("L1", "L2", "L3")]
    ok, residual = cocycle_check_p1(data.ctx, chain, data.pole_bound)
    lines.append(("cocycle", "PASS" if ok else "FAIL"))
    lines.append(("cocycle residual", sorted(residual.values())))
    if with_complex:
        inst = assemble_complex(data.ctx, 2, data.pole_bound)
        rep = verify_d2(inst)
        lines.append(("dims", inst.dims()))
        lines.append(("d2", "PASS" if rep["zero"] else "FAIL"))
    return data, lines

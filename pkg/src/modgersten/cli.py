"""Command line interface: ``modgersten <subcommand> [flags]``.

Exit codes: 0 ok, 1 a check failed, 2 usage or bad input, 3 infeasible,
4 unsupported regime, 5 truncation shortfall.
"""

import argparse
import json
import os
import sys
from fractions import Fraction

from . import bgcomplex as bc
from .cache import Cache, content_key
from .lattice import (LatticeError, a1, direct_sum, dumps_lattice, hyperbolic_plane, lattice_hash,
                      load_lattice, make_lattice, rank_one)
from .mspace import (CoverageGap, Infeasible, InputError, TruncShortfall, dumps_input, loads_input,
                     loads_obstructions, nutilde, quasi_pullback)
from .orbits import (Ambient, UnsupportedRegime, classify_corank1, classify_corank2,
                     ramification_index, stabilizer_action, sub_flags, transfer_index, whole_class)
from .qseries import dumps_series, loads_series, theta_series

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INFEASIBLE, EXIT_UNSUPPORTED, EXIT_TRUNC = 0, 1, 2, 3, 4, 5


class UsageError(ValueError):
    pass


def _builtin(name):
    U = hyperbolic_plane()
    table = {
        "gn": lambda: direct_sum(U, U, a1(), a1(), name="2U+2A1"),
        "2u": lambda: direct_sum(U, U, name="2U"),
        "2u+a1": lambda: direct_sum(U, U, a1(), name="2U+A1"),
        "a1": a1,
    }
    if name in table:
        return table[name]()
    if name.startswith("2u+<") and name.endswith(">"):
        return direct_sum(U, U, rank_one(int(name[4:-1])), name="2U+" + name[3:])
    raise UsageError("unknown builtin lattice %r" % name)


def read_lattice(source):
    if source is None:
        raise UsageError("--lattice is required")
    if source.startswith("builtin:"):
        return _builtin(source[len("builtin:"):])
    if not os.path.exists(source):
        raise UsageError("lattice file %s not found" % source)
    return load_lattice(source)


def read_input(path, L):
    with open(path) as fh:
        f = loads_input(fh.read(), L)
    return f


def fr(x):
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else "%d/%d" % (x.numerator, x.denominator)


def vec(v):
    return "[" + ",".join(fr(x) for x in v) + "]"


class Out:
    """Line-oriented writer; machine format is tab separated with exact fractions."""

    def __init__(self, fmt, stream):
        self.fmt = fmt
        self.stream = stream

    def rec(self, *fields):
        if self.fmt == "machine":
            self.stream.write("\t".join(str(f) for f in fields) + "\n")
        else:
            head, rest = fields[0], fields[1:]
            self.stream.write("%-14s %s\n" % (head, "  ".join(str(f) for f in rest)))


def _parse_vector(text):
    return [int(x) for x in text.replace("[", "").replace("]", "").split(",") if x.strip()]


def _context(args):
    L0 = read_lattice(args.lattice)
    return Ambient(L0, args.gamma)


def _find_class(ctx, label, B):
    if label in (None, "L0"):
        return whole_class(ctx)
    for c in classify_corank1(ctx, B) + classify_corank2(ctx, B):
        if c.label == label:
            return c
    raise UsageError("no class labelled %s at pole bound %s" % (label, B))


# ---------------------------------------------------------------------------
# subcommands


def cmd_info(args, out, cache):
    L = read_lattice(args.lattice)
    out.rec("rank", L.rank)
    out.rec("signature", "%d,%d" % L.signature)
    out.rec("even", str(L.even).lower())
    out.rec("det", L.det)
    out.rec("disc_order", L.disc.size)
    out.rec("hash", lattice_hash(L))


def cmd_disc(args, out, cache):
    L = read_lattice(args.lattice)
    D = L.disc
    out.rec("orders", vec(D.orders))
    for el in D.elements:
        out.rec("q", vec(el), fr(D.q(el)))


def _theta_cached(K, trunc, cache):
    key = content_key("theta", lattice_hash(K), fr(trunc))
    return cache.fetch(key, lambda: theta_series(K, trunc), dumps_series,
                       lambda t: loads_series(t, K.disc))


def cmd_theta(args, out, cache):
    K = read_lattice(args.lattice)
    s = _theta_cached(K, Fraction(args.trunc), cache)
    out.rec("trunc", fr(s.trunc))
    for (el, e), c in s.items():
        out.rec("theta", vec(el), fr(e), fr(c))


def _classify_records(ctx, B):
    recs = []
    for P in classify_corank1(ctx, B):
        G = stabilizer_action(ctx, P)
        recs.append(["class", P.label, 1, fr(P.info["norm"]), P.info["div"], vec(P.vector),
                     ramification_index(ctx, P.vector), G.order])
    if args_corank2(ctx):
        for Q in classify_corank2(ctx, B):
            recs.append(["class", Q.label, 2, "-", "-", vec([abs(Q.lattice.det)]), "-",
                         stabilizer_action(ctx, Q).order])
    return recs


def args_corank2(ctx):
    return ctx.n >= 2


def cmd_classify(args, out, cache):
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    key = content_key("classify", lattice_hash(ctx.L0), ctx.gamma.kind, fr(B))
    recs = cache.fetch(key, lambda: _classify_records(ctx, B), json.dumps, json.loads)
    out.rec("fields", "label", "corank", "norm", "div", "vector|det", "r", "|G_L|")
    for r in recs:
        out.rec(*r)


def cmd_nutilde(args, out, cache):
    L = read_lattice(args.lattice)
    f = read_input(args.input, L)
    out.rec("nutilde", fr(nutilde(f, _parse_vector(args.vector))))


def cmd_qp(args, out, cache):
    L = read_lattice(args.lattice)
    f = read_input(args.input, L)
    with open(args.sublattice) as fh:
        basis = json.load(fh)
    g = quasi_pullback(f, basis, Fraction(args.trunc) if args.trunc else None)
    for (el, n), c in g.pp:
        out.rec("pp", vec(el), fr(n), fr(c))
    out.rec("c00", fr(g.c00))
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(dumps_input(g) + "\n")


def cmd_res(args, out, cache):
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    P = _find_class(ctx, args.target, B)
    if P.corank != 1:
        raise UsageError("res needs a corank-1 target")
    fs = [read_input(p, ctx.L0) for p in args.inputs.split(",")]
    r = ramification_index(ctx, P.vector)
    res = bc.residue_inputs(fs, P.vector, r, P.basis, Fraction(args.trunc) if args.trunc else None)
    out.rec("ramification", r)
    if res is None:
        out.rec("residue", "0")
        return
    scal, pbs = res
    out.rec("scalar", fr(scal))
    for i, g in enumerate(pbs):
        for (el, n), c in g.pp:
            out.rec("factor%d" % (i + 1), vec(el), fr(n), fr(c))
        out.rec("factor%d" % (i + 1), "c00", fr(g.c00))


def cmd_boundary(args, out, cache):
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    carrier = _find_class(ctx, args.carrier, B)
    fs = [read_input(p, carrier.lattice) for p in args.inputs.split(",")]
    if carrier.corank == 0:
        for P in classify_corank1(ctx, B):
            r = ramification_index(ctx, P.vector)
            res = bc.residue_inputs(fs, P.vector, r, P.basis)
            if res is None:
                continue
            scal, pbs = res
            out.rec("target", P.label, "scalar", fr(scal), "factors", len(pbs))
            for i, g in enumerate(pbs):
                for (el, n), c in g.pp:
                    out.rec("factor%d" % (i + 1), vec(el), fr(n), fr(c))
        return
    if len(fs) != 1:
        raise UsageError("boundary from a corank-1 class takes one input")
    totals = {}
    for fl in sub_flags(ctx, carrier, B):
        r = ramification_index(ctx, fl.w_ambient, carrier)
        v = transfer_index(ctx, fl) * nutilde(fs[0], fl.w) / r
        totals[fl.class_key] = totals.get(fl.class_key, 0) + v
    for Q in classify_corank2(ctx, B):
        v = totals.get(Q.key, 0)
        if v:
            out.rec("target", Q.label, fr(v))


def read_obstructions(paths):
    """Comma separated obstruction files -> ({lattice hash: basis}, content digests)."""
    if not paths:
        return None, []
    table, digests = {}, []
    for path in paths.split(","):
        with open(path) as fh:
            text = fh.read()
        ob = loads_obstructions(text)
        table[lattice_hash(ob.lattice)] = ob
        digests.append(content_key(text))
    return table, sorted(digests)


def _instance_bundle(ctx, p, B, trunc, cache, obstructions=None, jobs=1):
    table, digests = read_obstructions(obstructions)
    # the worker count never changes the result, so it is not part of the key
    key = content_key("complex", lattice_hash(ctx.L0), ctx.gamma.kind, p, fr(B), fr(trunc), digests)
    text = cache.get(key)
    if text is None:
        text = bc.export_bundle(bc.assemble_complex(ctx, p, B, trunc, table, jobs=jobs))
        cache.put(key, text)
    return json.loads(text)


class _Matrices:
    """Just enough of a ComplexInstance for the checks: dims and boundaries."""

    def __init__(self, bundle):
        self.degrees = bundle["degrees"]
        self.boundaries = []
        for b in bundle["boundaries"]:
            m, n = b["shape"]
            M = [[Fraction(0)] * n for _ in range(m)]
            for i, j, (a, d) in b["entries"]:
                M[i][j] = Fraction(a, d)
            self.boundaries.append(M)

    def dims(self):
        return [sum(t["dim"] for t in ts) for ts in self.degrees]


def _jobs(args):
    if args.jobs < 0:
        raise UsageError("--jobs must be non-negative")
    return args.jobs or os.cpu_count() or 1


def _load_instance(args, cache):
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    trunc = Fraction(args.trunc) if args.trunc else B
    if args.p > ctx.n:
        raise bc.RangeError("p = %d exceeds n = %d" % (args.p, ctx.n))
    bundle = _instance_bundle(ctx, args.p, B, trunc, cache, args.obstructions, _jobs(args))
    return bundle, _Matrices(bundle)


def cmd_assemble(args, out, cache):
    bundle, inst = _load_instance(args, cache)
    out.rec("mode", bundle["mode"])
    for k, ts in enumerate(bundle["degrees"]):
        out.rec("degree", k, "terms", len(ts), "dim", sum(t["dim"] for t in ts))
    for k, M in enumerate(inst.boundaries):
        nz = sum(1 for row in M for x in row if x)
        out.rec("boundary", k, "shape", "%dx%d" % (len(M), len(M[0]) if M else 0), "nonzero", nz)
    if args.export:
        with open(args.export, "w") as fh:
            fh.write(json.dumps(bundle, sort_keys=True, separators=(",", ":")) + "\n")


def cmd_d2(args, out, cache):
    _, inst = _load_instance(args, cache)
    rep = bc.verify_d2(inst)
    for p in rep["products"]:
        out.rec("product", p["degree"], "nonzero", p["nonzero"])
    for k, j in rep["directions"]:
        out.rec("direction", k, j)
    out.rec("d2", "PASS" if rep["zero"] else "FAIL")
    return EXIT_OK if rep["zero"] else EXIT_FAIL


def cmd_ranks(args, out, cache):
    _, inst = _load_instance(args, cache)
    rep = bc.verify_d2(inst)
    if not rep["zero"]:
        out.rec("d2", "FAIL")
        return EXIT_FAIL
    out.rec("dims", vec(inst.dims()))
    out.rec("ranks", vec(bc.cohomology_ranks(inst, rep)))


def cmd_cocycle(args, out, cache):
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    with open(args.chain) as fh:
        entries = json.load(fh)
    base = os.path.dirname(os.path.abspath(args.chain))
    chain = []
    for e in entries:
        P = _find_class(ctx, e["class"], B)
        chain.append((P, read_input(os.path.join(base, e["input"]), P.lattice)))
    ok, residual = bc.cocycle_check_p1(ctx, chain, B)
    labels = {c.key: c.label for c in classify_corank2(ctx, B)}
    for k, v in sorted(residual.items(), key=lambda kv: labels.get(kv[0], "")):
        out.rec("residual", labels.get(k, "?"), fr(v))
    out.rec("cocycle", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_divisor(args, out, cache):
    from .shadow import FunctionSymbol, divisor_of
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    carrier = _find_class(ctx, args.carrier, B)
    f = read_input(args.input, carrier.lattice)
    div = divisor_of(ctx, FunctionSymbol(carrier, f), B)
    labels = {c.key: c.label for c in classify_corank1(ctx, B) + classify_corank2(ctx, B)}
    for k in sorted(div.orders, key=lambda k: (labels.get(div.classes[k], ""), str(k))):
        out.rec("component", labels.get(div.classes[k], "?"), "nutilde", fr(div.orders[k]),
                "nu", fr(div.multiplicities[k]))


def cmd_chainmap(args, out, cache):
    from .shadow import chain_map_check
    ctx = _context(args)
    B = Fraction(args.pole_bound)
    carrier = _find_class(ctx, args.carrier, B)
    target = _find_class(ctx, args.target, B)
    fs = [read_input(p, carrier.lattice) for p in args.inputs.split(",")]
    ok, a, b = chain_map_check(ctx, carrier, fs, target, B)
    out.rec("route_a", _show(a))
    out.rec("route_b", _show(b))
    out.rec("chainmap", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_FAIL


def _show(x):
    if isinstance(x, bc.WedgeElement):
        return ";".join("%s:%s" % (vec(k), fr(v)) for k, v in sorted(x.terms.items())) or "0"
    return fr(x)


def cmd_example_gn(args, out, cache):
    from . import example_gn
    B = int(args.pole_bound)
    data = example_gn.solve_inputs(example_gn.build(args.gamma, B))
    for name in ("L1", "L2", "L3"):
        for (el, n), c in data.inputs[name].pp:
            out.rec("input", name, vec(el), fr(n), fr(c))
    for name in ("L1", "L2", "L3"):
        div = example_gn.divisor_by_name(data, name)
        for t in sorted(div):
            out.rec("divisor", name, t, fr(div[t]) if t != "other" else div[t])
    chain = [(data.classes[n], data.inputs[n]) for n in ("L1", "L2", "L3")]
    ok, residual = bc.cocycle_check_p1(data.ctx, chain, B)
    bundle = _instance_bundle(data.ctx, 2, Fraction(B), Fraction(B), cache, jobs=_jobs(args))
    rep = bc.verify_d2(_Matrices(bundle))
    d1 = example_gn.divisor_by_name(data, "L1")
    summary = "cocycle: %s, d2: %s, div(L1 input) = %s\u00b7[L12] \u2212 %s\u00b7[L13]" % (
        "PASS" if ok else "FAIL", "PASS" if rep["zero"] else "FAIL",
        fr(d1.get("L12", 0)), fr(-d1.get("L13", 0)))
    out.rec("summary", summary)
    return EXIT_OK if ok and rep["zero"] else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lattice", help="lattice file, or builtin:gn / builtin:2u / builtin:a1 / ...")
    common.add_argument("--gamma", choices=["hat", "full"], default="hat")
    common.add_argument("--p", type=int, default=2)
    common.add_argument("--pole-bound", default="1")
    common.add_argument("--trunc", default=None)
    common.add_argument("--obstructions", default=None)
    common.add_argument("--cache-dir", default=None)
    common.add_argument("--format", choices=["human", "machine"], default="human")
    common.add_argument("--jobs", type=int, default=0, help="worker processes (0: all cores)")
    parser = argparse.ArgumentParser(prog="modgersten")
    sub = parser.add_subparsers(dest="command", required=True)
    flags = {
        "info": [], "disc": [], "theta": [], "classify": [],
        "nutilde": [("--input", True), ("--vector", True)],
        "qp": [("--input", True), ("--sublattice", True), ("--output", False)],
        "res": [("--inputs", True), ("--target", True)],
        "boundary": [("--inputs", True), ("--carrier", False)],
        "assemble": [("--export", False)], "d2": [], "ranks": [],
        "cocycle": [("--chain", True)],
        "divisor": [("--input", True), ("--carrier", False)],
        "chainmap": [("--inputs", True), ("--carrier", False), ("--target", True)],
        "example-gn": [],
    }
    for name, extra in flags.items():
        p = sub.add_parser(name, parents=[common])
        for flag, req in extra:
            p.add_argument(flag, required=req)
    return parser


COMMANDS = {
    "info": cmd_info, "disc": cmd_disc, "theta": cmd_theta, "classify": cmd_classify,
    "nutilde": cmd_nutilde, "qp": cmd_qp, "res": cmd_res, "boundary": cmd_boundary,
    "assemble": cmd_assemble, "d2": cmd_d2, "ranks": cmd_ranks, "cocycle": cmd_cocycle,
    "divisor": cmd_divisor, "chainmap": cmd_chainmap, "example-gn": cmd_example_gn,
}


def main(argv=None, stdout=None, stderr=None):
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.command == "theta" and args.trunc is None:
        args.trunc = "3"
    out = Out(args.format, stdout)
    cache = Cache(args.cache_dir)
    try:
        code = COMMANDS[args.command](args, out, cache)
    except (UsageError, LatticeError, InputError, CoverageGap, bc.RangeError, OSError) as e:
        stderr.write("error\tusage\t%s\n" % e)
        return EXIT_USAGE
    except Infeasible as e:
        stderr.write("error\tinfeasible\t%s\t%s\n" % (e, e.rows))
        return EXIT_INFEASIBLE
    except UnsupportedRegime as e:
        stderr.write("error\tunsupported-regime\t%s\n" % e)
        return EXIT_UNSUPPORTED
    except TruncShortfall as e:
        stderr.write("error\ttrunc-shortfall\t%s\n" % e)
        return EXIT_TRUNC
    return code or EXIT_OK


def main_exit():
    sys.exit(main())

import random
from fractions import Fraction

import pytest

from modgersten import example_gn
from modgersten.bgcomplex import TruncatedSpace, WedgeElement, cocycle_check_p1, wedge_of_vectors
from modgersten.mspace import (Infeasible, admissible_keys, from_coordinates, lin_comb, make_input,
                               nutilde, quasi_pullback, solve_principal_part)
from modgersten.orbits import (Ambient, UnsupportedRegime, classify_corank1, classify_corank2,
                               ramification_index, sub_flags, whole_class)
from modgersten.shadow import (DivisorOnCycle, FunctionSymbol, chain_map_check, divisor_of,
                               tame_symbol_shadow)

from helpers import gn, two_u_plus

L0 = gn()
HAT = Ambient(L0, "hat")
FULL = Ambient(L0, "full")


def random_on(rng, L, B, lo=-5, hi=5):
    keys = admissible_keys(L, B)
    return from_coordinates(L, keys, [rng.randint(lo, hi) for _ in keys])


@pytest.fixture(scope="module")
def example():
    return example_gn.solve_inputs(example_gn.build("hat", 1))


# --- divisor_of -----------------------------------------------------------------

def test_divisor_of_l1_input(example):
    assert example_gn.divisor_by_name(example, "L1") == {"L12": 6, "L13": -1}
    div = example.divisors["L1"]
    # both components are ramified twice in L1, so nu is half of nutilde
    assert sorted(div.multiplicities.values()) == [Fraction(-1, 2), 3]


def test_divisor_of_other_inputs(example):
    assert example_gn.divisor_by_name(example, "L2") == {"L12": -6, "L23": 1}
    assert example_gn.divisor_by_name(example, "L3") == {"L13": 1, "L23": -1}


def test_divisor_of_empty_input():
    W = whole_class(HAT)
    assert divisor_of(HAT, FunctionSymbol(W, make_input(L0, {})), 1).is_zero()
    P = classify_corank1(HAT, 1)[0]
    assert divisor_of(HAT, FunctionSymbol(P, make_input(P.lattice, {})), 1).is_zero()


def test_divisor_of_linear():
    rng = random.Random(3)
    W = whole_class(HAT)
    for _ in range(10):
        f, g = random_on(rng, L0, 2), random_on(rng, L0, 2)
        df = divisor_of(HAT, FunctionSymbol(W, f), 2)
        dg = divisor_of(HAT, FunctionSymbol(W, g), 2)
        dfg = divisor_of(HAT, FunctionSymbol(W, f + g), 2)
        assert dfg.multiplicities == (df + dg).multiplicities
        assert dfg.orders == (df + dg).orders


def test_divisor_of_matches_class_by_class_nu():
    rng = random.Random(4)
    f = random_on(rng, L0, 1)
    div = divisor_of(HAT, FunctionSymbol(whole_class(HAT), f), 1)
    for P in classify_corank1(HAT, 1):
        want = nutilde(f, P.vector) / ramification_index(HAT, P.vector)
        assert div.multiplicities.get(P.key, 0) == want


def test_divisor_of_rejects_deep_carriers():
    P2 = classify_corank2(HAT, 1)[0]
    with pytest.raises(UnsupportedRegime):
        divisor_of(HAT, FunctionSymbol(P2, make_input(P2.lattice, {})), 1)


def test_symbol_label_must_live_on_carrier():
    P = classify_corank1(HAT, 1)[0]
    with pytest.raises(ValueError):
        FunctionSymbol(P, make_input(L0, {}))


def test_solve_then_divisor_round_trip():
    # random targets on every corank-1 carrier of the example, others forced to zero
    rng = random.Random(5)
    for P in classify_corank1(HAT, 1):
        flags = sub_flags(HAT, P, 1)
        for _ in range(3):
            chosen = rng.sample(flags, min(2, len(flags)))
            vals = {fl.flag_key: rng.choice([-3, -1, 1, 2, 6]) for fl in chosen}
            others = [fl.w for fl in flags if fl.flag_key not in vals]
            try:
                f = solve_principal_part(P.lattice, [(fl.w, vals[fl.flag_key]) for fl in chosen], 1,
                                         others=others)
            except Infeasible:
                continue
            div = divisor_of(HAT, FunctionSymbol(P, f), 1)
            assert div.orders == vals


def test_cocycle_divisors_cancel(example):
    chain = [(example.classes[n], example.inputs[n]) for n in ("L1", "L2", "L3")]
    ok, residual = cocycle_check_p1(example.ctx, chain, 1)
    assert ok and residual == {}
    total = DivisorOnCycle(None, {}, {})
    for n in ("L1", "L2", "L3"):
        total = total + example.divisors[n]
    per_class = {}
    for k, v in total.orders.items():
        c = total.classes[k]
        per_class[c] = per_class.get(c, 0) + v
    assert all(v == 0 for v in per_class.values())


# --- tame symbols -----------------------------------------------------------------

def test_tame_symbol_q1_is_the_order():
    rng = random.Random(6)
    W = whole_class(HAT)
    for P in classify_corank1(HAT, 1):
        f = random_on(rng, L0, 1)
        r = ramification_index(HAT, P.vector)
        assert tame_symbol_shadow(HAT, W, [f], P, 1) == [(nutilde(f, P.vector) / r, [])]


def test_tame_symbol_unit_pair_vanishes():
    W = whole_class(HAT)
    rng = random.Random(7)
    seen = 0
    for P in classify_corank1(HAT, 2):
        for _ in range(10):
            f, g = random_on(rng, L0, 2), random_on(rng, L0, 2)
            if nutilde(f, P.vector) or nutilde(g, P.vector):
                continue
            seen += 1
            [(c, [u])] = tame_symbol_shadow(HAT, W, [f, g], P, 2)
            assert u.is_zero() or c == 0
    assert seen > 0


def test_tame_symbol_q2_shape():
    W = whole_class(HAT)
    rng = random.Random(8)
    for P in classify_corank1(HAT, 1):
        f, g = random_on(rng, L0, 1), random_on(rng, L0, 1)
        r = ramification_index(HAT, P.vector)
        nf, ng = nutilde(f, P.vector) / r, nutilde(g, P.vector) / r
        [(c, [u])] = tame_symbol_shadow(HAT, W, [f, g], P, 1)
        assert c == 1
        assert u == quasi_pullback(lin_comb([(nf, g), (-ng, f)]), P.basis)


def test_tame_symbol_needs_the_whole_lattice():
    P = classify_corank1(HAT, 1)[0]
    with pytest.raises(UnsupportedRegime):
        tame_symbol_shadow(HAT, P, [make_input(P.lattice, {})], classify_corank2(HAT, 1)[0], 1)


# --- chain map --------------------------------------------------------------------

@pytest.mark.parametrize("gamma", ["hat", "full"])
@pytest.mark.parametrize("B", [1, 2])
def test_chain_map_from_l0(gamma, B):
    ctx = HAT if gamma == "hat" else FULL
    W = whole_class(ctx)
    rng = random.Random(9 + B)
    live = 0
    for P in classify_corank1(ctx, B):
        for q in (1, 2):
            for _ in range(3):
                ok, a, b = chain_map_check(ctx, W, [random_on(rng, L0, B) for _ in range(q)], P, B)
                assert ok, (P.label, q, a, b)
                live += (a != 0) if q == 1 else not a.is_zero()
    assert live >= 10


@pytest.mark.parametrize("gamma", ["hat", "full"])
def test_chain_map_from_corank1(gamma):
    ctx = HAT if gamma == "hat" else FULL
    rng = random.Random(12)
    live = 0
    for P in classify_corank1(ctx, 1):
        for T in classify_corank2(ctx, 1):
            ok, a, b = chain_map_check(ctx, P, [random_on(rng, P.lattice, 1)], T, 1)
            assert ok, (P.label, T.label, a, b)
            live += a != 0
    assert live >= 5


def test_chain_map_on_a_rank_one_complement():
    L = two_u_plus(-4)
    ctx = Ambient(L, "hat")
    W = whole_class(ctx)
    rng = random.Random(13)
    for P in classify_corank1(ctx, 1):
        for q in (1, 2):
            ok, _, _ = chain_map_check(ctx, W, [random_on(rng, L, 1) for _ in range(q)], P, 1)
            assert ok


def test_chain_map_zero_input_passes():
    W = whole_class(HAT)
    zero = make_input(L0, {})
    for P in classify_corank1(HAT, 1):
        assert chain_map_check(HAT, W, [zero], P, 1) == (True, 0, 0)
        ok, a, _ = chain_map_check(HAT, W, [zero, zero], P, 1)
        assert ok and a == WedgeElement(1)
    for P in classify_corank1(HAT, 1):
        for T in classify_corank2(HAT, 1):
            assert chain_map_check(HAT, P, [make_input(P.lattice, {})], T, 1)[0]


def test_chain_map_mismatched_gamma_fails():
    # route B evaluated with the other group: the transfer bookkeeping must disagree somewhere
    rng = random.Random(14)
    failures = 0
    for P in classify_corank1(HAT, 1):
        for T in classify_corank2(HAT, 1):
            ok, _, _ = chain_map_check(HAT, P, [random_on(rng, P.lattice, 1)], T, 1, ctx_b=FULL)
            failures += not ok
    assert failures > 0


def test_chain_map_q3_from_corank1_unsupported():
    P = classify_corank1(HAT, 1)[0]
    T = classify_corank2(HAT, 1)[0]
    f = make_input(P.lattice, {})
    with pytest.raises(UnsupportedRegime):
        chain_map_check(HAT, P, [f, f], T, 1)


def test_wedge_normal_form_is_label_level():
    # two different label pairs with the same wedge compare equal
    S = TruncatedSpace(L0, 1)
    rng = random.Random(15)
    f, g = random_on(rng, L0, 1), random_on(rng, L0, 1)
    w1 = wedge_of_vectors([S.coords(f), S.coords(g)])
    w2 = wedge_of_vectors([S.coords(f + g), S.coords(g)])
    assert w1 == w2

import io
import json
import os
import shutil
import subprocess
import sys
from fractions import Fraction

import pytest

from modgersten.cache import Cache, content_key
from modgersten.cli import main
from modgersten.lattice import a1
from modgersten.mspace import loads_input

from oracles import box_theta

DATA = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "demos", "data")


def data(name):
    return os.path.join(DATA, name)


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def records(text):
    return [line.split("\t") for line in text.splitlines()]


GN = ("--lattice", "builtin:gn")


# --- subcommands ------------------------------------------------------------------

def test_info():
    code, out, _ = run("info", *GN, "--format", "machine")
    assert code == 0
    rec = dict((r[0], r[1]) for r in records(out))
    assert rec["rank"] == "6" and rec["signature"] == "2,4" and rec["det"] == "4"
    assert rec["disc_order"] == "4" and rec["even"] == "true"


def test_info_from_file_matches_builtin():
    a = run("info", "--lattice", data("gn.json"), "--format", "machine")[1]
    b = run("info", *GN, "--format", "machine")[1]
    assert a == b


def test_disc_a1():
    code, out, _ = run("disc", "--lattice", "builtin:a1", "--format", "machine")
    assert code == 0
    assert records(out) == [["orders", "[2]"], ["q", "[0]", "0"], ["q", "[1]", "3/2"]]


def test_theta_a1_table_against_box():
    code, out, _ = run("theta", "--lattice", data("a1.json"), "--trunc", "3", "--format", "machine")
    assert code == 0
    rows = records(out)
    assert rows[0] == ["trunc", "3"]
    got = {(r[1], Fraction(r[2])): int(r[3]) for r in rows[1:]}
    K = a1()
    lifts = [[Fraction(0)], [Fraction(1, 2)]]
    want = {("[%d]" % i, e): c for (i, e), c in box_theta([list(r) for r in K.gram], lifts, 3).items()}
    assert got == want
    assert got == {("[0]", 0): 1, ("[0]", 1): 2, ("[1]", Fraction(1, 4)): 2, ("[1]", Fraction(9, 4)): 2}


def test_classify_gn_counts():
    code, out, _ = run("classify", *GN, "--format", "machine")
    assert code == 0
    rows = [r for r in records(out) if r[0] == "class"]
    corank1 = [r for r in rows if r[2] == "1"]
    assert sum(1 for r in corank1 if r[3] == "-2") == 3
    code, out, _ = run("classify", *GN, "--gamma", "full", "--format", "machine")
    rows = [r for r in records(out) if r[0] == "class" and r[2] == "1"]
    assert sum(1 for r in rows if r[3] == "-2") == 2


def test_nutilde_and_qp(tmp_path):
    code, out, _ = run("nutilde", "--lattice", data("gn.json"), "--input", data("f.json"),
                       "--vector", "0,0,0,0,0,1", "--format", "machine")
    assert code == 0 and records(out) == [["nutilde", "9"]]
    target = tmp_path / "g.json"
    code, out, _ = run("qp", "--lattice", data("gn.json"), "--input", data("f.json"),
                       "--sublattice", data("a2perp.json"), "--output", str(target), "--format", "machine")
    assert code == 0
    assert ["c00", "18"] in records(out)       # twice the order along a2
    g = loads_input(target.read_text())
    assert g.c00 == 18 and g.lattice.rank == 5


def test_res_and_boundary():
    code, out, _ = run("res", "--lattice", data("gn.json"), "--inputs", data("f.json") + "," + data("h.json"),
                       "--target", "P2", "--format", "machine")
    assert code == 0
    rows = records(out)
    assert rows[0] == ["ramification", "2"] and rows[1] == ["scalar", "9/2"]
    code, out, _ = run("boundary", "--lattice", data("gn.json"), "--inputs", data("L1.json"),
                       "--carrier", "P2", "--format", "machine")
    assert code == 0
    assert records(out) == [["target", "Q4", "3"], ["target", "Q5", "-1/2"]]


def test_assemble_d2_ranks(tmp_path):
    code, out, _ = run("assemble", *GN, "--format", "machine", "--export", str(tmp_path / "b.json"))
    assert code == 0
    assert ["mode", "formal"] in records(out)
    bundle = json.loads((tmp_path / "b.json").read_text())
    assert [sum(t["dim"] for t in d) for d in bundle["degrees"]] == [6, 15, 9]
    code, out, _ = run("d2", *GN, "--format", "machine")
    assert code == 0 and records(out)[-1] == ["d2", "PASS"]
    code, out, _ = run("ranks", *GN, "--format", "machine")
    assert code == 0 and records(out) == [["dims", "[6,15,9]"], ["ranks", "[1,1,0]"]]


def test_realizable_mode_flag():
    code, out, _ = run("assemble", "--lattice", data("gn.json"), "--obstructions",
                       data("obstructions_gn.json"), "--format", "machine")
    assert code == 0 and ["mode", "realizable"] in records(out)


def test_cocycle_pass_and_fail():
    code, out, _ = run("cocycle", "--lattice", data("gn.json"), "--chain", data("chain.json"), "--format", "machine")
    assert code == 0 and records(out) == [["cocycle", "PASS"]]
    code, out, _ = run("cocycle", "--lattice", data("gn.json"), "--chain", data("chain_broken.json"),
                       "--format", "machine")
    assert code == 1 and records(out)[-1] == ["cocycle", "FAIL"]


def test_divisor_of_l1_input():
    code, out, _ = run("divisor", "--lattice", data("gn.json"), "--input", data("L1.json"),
                       "--carrier", "P2", "--format", "machine")
    assert code == 0
    assert sorted(r[3] for r in records(out)) == ["-1", "6"]


def test_chainmap():
    code, out, _ = run("chainmap", "--lattice", data("gn.json"), "--inputs", data("f.json") + "," + data("h.json"),
                       "--target", "P2", "--format", "machine")
    assert code == 0
    rows = records(out)
    assert rows[0][1] == rows[1][1] and rows[-1] == ["chainmap", "PASS"]


def test_example_gn_summary():
    code, out, _ = run("example-gn")
    assert code == 0
    assert out.splitlines()[-1].split(None, 1)[1] == \
        "cocycle: PASS, d2: PASS, div(L1 input) = 6·[L12] − 1·[L13]"


# --- exit codes -------------------------------------------------------------------

def test_p_above_n_is_a_usage_error():
    code, _, err = run("d2", "--lattice", "builtin:2u", "--p", "3")
    assert code == 2 and err.startswith("error\tusage")


def test_unsupported_regime_exit_code():
    code, _, err = run("d2", *GN, "--p", "3")
    assert code == 4 and "unsupported-regime" in err


def test_infeasible_exit_code():
    code, _, err = run("example-gn", "--gamma", "full")
    assert code == 3 and "infeasible" in err


def test_trunc_shortfall_exit_code():
    code, _, err = run("qp", "--lattice", data("gn.json"), "--input", data("f.json"),
                       "--sublattice", data("a2perp.json"), "--trunc", "0")
    assert code == 5 and "trunc-shortfall" in err


@pytest.mark.parametrize("argv", [
    ("info",),
    ("info", "--lattice", "builtin:nonsense"),
    ("info", "--lattice", "/nonexistent/lattice.json"),
    ("nutilde", "--lattice", "builtin:2u", "--input", os.path.join(DATA, "f.json"), "--vector", "1,0,0,0"),
    ("assemble", "--lattice", "builtin:gn", "--jobs", "-1"),
    ("divisor", "--lattice", "builtin:gn", "--input", os.path.join(DATA, "L1.json"), "--carrier", "P99"),
    ("nosuchcommand",),
    ("nutilde", "--lattice", "builtin:gn"),
])
def test_usage_errors(argv):
    assert run(*argv)[0] == 2


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "modgersten", "info", "--lattice", "builtin:a1",
                           "--format", "machine"], capture_output=True, text=True)
    assert proc.returncode == 0 and "rank\t1\n" in proc.stdout
    proc = subprocess.run([sys.executable, "-m", "modgersten", "d2", "--lattice", "builtin:2u", "--p", "3"],
                          capture_output=True, text=True)
    assert proc.returncode == 2


# --- determinism and caching ------------------------------------------------------

def test_machine_output_repeatable():
    a = run("classify", *GN, "--format", "machine")[1]
    b = run("classify", *GN, "--format", "machine")[1]
    assert a == b


def test_jobs_do_not_change_output():
    a = run("assemble", *GN, "--format", "machine", "--jobs", "1")[1]
    b = run("assemble", *GN, "--format", "machine", "--jobs", "2")[1]
    assert a == b


def test_cache_hit_is_identical(tmp_path):
    cache = str(tmp_path / "cache")
    plain = run("theta", "--lattice", data("a1.json"), "--trunc", "5", "--format", "machine")[1]
    first = run("theta", "--lattice", data("a1.json"), "--trunc", "5", "--format", "machine", "--cache-dir", cache)[1]
    files = sorted(os.listdir(cache))
    assert len(files) == 1
    second = run("theta", "--lattice", data("a1.json"), "--trunc", "5", "--format", "machine", "--cache-dir", cache)[1]
    assert plain == first == second
    assert sorted(os.listdir(cache)) == files


def test_changed_trunc_makes_a_new_key(tmp_path):
    cache = str(tmp_path / "cache")
    run("theta", "--lattice", data("a1.json"), "--trunc", "5", "--cache-dir", cache)
    run("theta", "--lattice", data("a1.json"), "--trunc", "6", "--cache-dir", cache)
    assert len(os.listdir(cache)) == 2


def test_tampered_entry_is_recomputed(tmp_path):
    cache = str(tmp_path / "cache")
    argv = ("classify", *GN, "--format", "machine", "--cache-dir", cache)
    clean = run(*argv)[1]
    [name] = os.listdir(cache)
    path = os.path.join(cache, name)
    head, body = open(path).read().split("\n", 1)
    with open(path, "w") as fh:
        fh.write(head + "\n" + body.replace("P1", "P9"))
    assert run(*argv)[1] == clean
    # the entry was rewritten with a valid checksum
    assert Cache(cache).get(name[:-5]) == body


def test_example_gn_cache_on_off(tmp_path):
    cache = str(tmp_path / "cache")
    off = run("example-gn", "--format", "machine")[1]
    cold = run("example-gn", "--format", "machine", "--cache-dir", cache)[1]
    warm = run("example-gn", "--format", "machine", "--cache-dir", cache)[1]
    assert off == cold == warm


def test_cache_directory_can_be_copied(tmp_path):
    cache = tmp_path / "cache"
    run("d2", *GN, "--cache-dir", str(cache))
    shutil.copytree(cache, tmp_path / "copy")
    a = run("d2", *GN, "--format", "machine", "--cache-dir", str(tmp_path / "copy"))[1]
    b = run("d2", *GN, "--format", "machine")[1]
    assert a == b


# --- the cache class itself ---------------------------------------------------------

def test_cache_fetch_counts(tmp_path):
    c = Cache(str(tmp_path))
    calls = []

    def producer():
        calls.append(1)
        return {"x": [1, 2]}
    key = content_key("demo", 1)
    v1 = c.fetch(key, producer, json.dumps, json.loads)
    v2 = c.fetch(key, producer, json.dumps, json.loads)
    assert v1 == v2 == {"x": [1, 2]}
    assert (c.hits, c.misses, len(calls)) == (1, 1, 1)


def test_cache_checksum_mismatch_is_a_miss(tmp_path):
    c = Cache(str(tmp_path))
    c.put("k", "hello")
    assert c.get("k") == "hello"
    with open(os.path.join(str(tmp_path), "k.json"), "a") as fh:
        fh.write("!")
    assert c.get("k") is None
    with open(os.path.join(str(tmp_path), "k.json"), "w") as fh:
        fh.write("no header at all")
    assert c.get("k") is None


def test_cache_disabled():
    c = Cache(None)
    c.put("k", "v")
    assert c.get("k") is None


def test_content_key_sensitivity():
    assert content_key("theta", "abc", "3") != content_key("theta", "abc", "4")
    assert content_key("theta", "abc", "3") == content_key("theta", "abc", "3")

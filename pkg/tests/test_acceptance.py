"""Acceptance criteria 1-10; each prints one PASS/FAIL line (also collected in the terminal summary)."""

import json
import os
import random
import subprocess
import sys
from itertools import combinations, product
from math import ceil

from bitree.bigraph import U, V, BipartiteGraph, canonical_key, new_graph
from bitree.embed import (
    PRESERVED, SWAPPED, constructive_embed_balanced, constructive_embed_unbalanced, contains_tree, naive_contains,
    verify_certificate,
)
from bitree.formulas import conjecture_value, figure_graphs, union_blocks
from bitree.hamilton import check_cycle, chvatal_condition, is_hamiltonian, pendant_extremal, verify_c2n_extremal
from bitree.search import (
    MATCH, MISMATCH, cache_get, cache_put, conjecture_tuples, ex_bruteforce, verify_theorem, _params_of,
)
from bitree.treegen import enumerate_trees, make_double_star, tree_family
from oracles import prufer_classes, tree_ahu

RESULTS = []


def record(num, ok, detail):
    line = f"ACCEPTANCE {num:>2} {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    print(line)
    return ok


def _class_problems(rep):
    return [mm for mm in rep["mismatches"] if mm.get("kind") in ("extra", "omission")]


def _value_problems(rep):
    return [mm for mm in rep["mismatches"] if mm.get("kind") == "value"]


def test_criterion_01_spanning():
    rep = verify_theorem("spanning")
    tuples = {(r["n"], r["m"]) for r in rep["rows"]}
    want = {(n, m) for n in range(1, 10) for m in range(1, n + 1) if n + m <= 10}
    values_ok = all(r["brute"] == (r["n"] - 1) * r["m"] for r in rep["rows"])
    ok = tuples == want and values_ok and rep["mismatches"] == [] and rep["complete"]
    assert record(1, ok, f"{len(rep['rows'])} tuples n+m<=10, ex=(n-1)m, {len(rep['mismatches'])} value/class mismatches")


def test_criterion_02_t33_table():
    rep = verify_theorem("t33")
    got = {(r["n"], r["m"]): r["brute"] for r in rep["rows"]}
    table = {(3, 3): 6, (4, 3): 8, (4, 4): 9, (5, 3): 10, (5, 4): 10, (5, 5): 12}
    ok = got == table and not _value_problems(rep)
    assert record(2, ok, f"brute {sorted(got.items())}, {len(_value_problems(rep))} value mismatches")


def test_criterion_03_l2():
    rep = verify_theorem("l2")
    vals = _value_problems(rep)
    cls = _class_problems(rep)
    detail = (f"{len(rep['rows'])} tuples n*m<=30 k<=5: {len(vals)} value mismatches; "
              f"{len(cls)} class discrepancies against the published characterizations")
    if cls:
        detail += " at " + ", ".join(f"{mm['kind']}@({mm['n']},{mm['m']},{mm['k']})" for mm in cls)
    ok = not vals and not cls and rep["complete"]
    assert record(3, ok, detail)


def test_criterion_04_c2n():
    problems = []
    for n in (2, 3, 4):
        rep = verify_c2n_extremal(n)
        if rep.ex != n * n - n + 1 or rep.violations or len(rep.extremal_keys) != 1:
            problems.append(n)
        # independent labeled scan of every balanced graph
        best, classes = -1, set()
        for rows in product(range(1 << n), repeat=n):
            g = BipartiteGraph(n, n, rows)
            if g.edge_count < best or is_hamiltonian(g).is_hamiltonian:
                continue
            if g.edge_count > best:
                best, classes = g.edge_count, set()
            classes.add(canonical_key(g, allow_side_swap=True))
        if best != n * n - n + 1 or classes != {canonical_key(pendant_extremal(n), allow_side_swap=True)}:
            problems.append(n)
    rep5 = verify_c2n_extremal(5)
    if rep5.ex != 21 or rep5.violations or len(rep5.extremal_keys) != 1:
        problems.append(5)
    assert record(4, not problems, f"ex(n,n;C_2n)=n^2-n+1 with unique class for n=2..5; problems at {problems}")


def test_criterion_05_degree_condition_soundness():
    bad = 0
    checked = 0
    for n in (2, 3, 4):
        for rows in product(range(1 << n), repeat=n):
            g = BipartiteGraph(n, n, rows)
            if chvatal_condition(g):
                checked += 1
                v = is_hamiltonian(g)
                bad += not (v.is_hamiltonian and check_cycle(g, v.witness_cycle))
    rng = random.Random(20260101)
    for _ in range(100_000):
        g = BipartiteGraph(5, 5, tuple(rng.randrange(32) for _ in range(5)))
        if chvatal_condition(g):
            checked += 1
            v = is_hamiltonian(g)
            bad += not (v.is_hamiltonian and check_cycle(g, v.witness_cycle))
    assert record(5, bad == 0, f"{checked} graphs satisfy the condition (n<=4 exhaustive + 1e5 random n=5); {bad} non-Hamiltonian")


def test_criterion_06_tree_counts():
    anchors = (enumerate_trees(2, 2).size, enumerate_trees(3, 2).size, enumerate_trees(3, 3).size) == (1, 2, 3)
    oracle_bad = []
    for N in range(2, 10):
        for (k, l), keys in prufer_classes(N).items():
            got = [tree_ahu(t) for t in enumerate_trees(k, l)]
            if len(set(got)) != len(got) or set(got) != keys:
                oracle_bad.append((k, l))
    l2_ok = all(enumerate_trees(k, 2).size == ceil(k / 2) for k in range(1, 9))
    ok = anchors and not oracle_bad and l2_ok
    assert record(6, ok, f"anchors 1,2,3 {anchors}; Pruefer oracle k+l<=9 mismatches {oracle_bad}; |T_k,2|=ceil(k/2) {l2_ok}")


def _dense_hosts(n, m, emin):
    cells = [(i, j) for i in range(n) for j in range(m)]
    N = n * m
    for e in range(emin, N + 1):
        for miss in combinations(range(N), N - e):
            rows = [(1 << m) - 1] * n
            for c in miss:
                i, j = cells[c]
                rows[i] &= ~(1 << j)
            yield BipartiteGraph(n, m, tuple(rows))


def test_criterion_07_constructive_embeddings():
    bal = bal_fail = 0
    for n in (3, 4):
        fam = list(enumerate_trees(n, n))
        trees = fam + [t.transpose() for t in fam]
        for h in _dense_hosts(n, n, n * (n - 1)):
            if all(d == n - 1 for d in h.degrees(U)) or all(d == n - 1 for d in h.degrees(V)):
                continue
            for t in trees:
                for o in (PRESERVED, SWAPPED):
                    bal += 1
                    bal_fail += not verify_certificate(h, t, constructive_embed_balanced(h, t, o))
    unb = unb_fail = 0
    for n in range(2, 9):
        for m in range(1, n):
            if n + m > 9:
                continue
            fam = enumerate_trees(n, m)
            for h in _dense_hosts(n, m, m * (n - 1)):
                dv = sorted(h.degrees(V))
                if all(d == n - 1 for d in dv) or (n - m == 1 and dv[0] == 1 and all(d == n for d in dv[1:])):
                    continue
                for t in fam:
                    unb += 1
                    unb_fail += not verify_certificate(h, t, constructive_embed_unbalanced(h, t))
    ok = bal_fail == 0 and unb_fail == 0
    assert record(7, ok, f"balanced {bal} certificates ({bal_fail} bad), unbalanced n+m<=9 {unb} ({unb_fail} bad)")


def test_criterion_08_s33():
    g1 = make_double_star(3, 3)
    r55 = ex_bruteforce(5, 5, g1)
    want55 = {canonical_key(union_blocks(5, 5, [(2, 3), (3, 2)])), canonical_key(figure_graphs("G'3")[0])}
    got55 = {canonical_key(g) for g in r55.graphs()}
    ok = r55.ex_bruteforce == 12 and got55 == want55 and len(want55) == 2
    parts = [f"(5,5) ex={r55.ex_bruteforce} classes={len(got55)}"]
    for n, m in ((6, 5), (6, 6)):
        r = ex_bruteforce(n, m, g1)
        want = canonical_key(union_blocks(n, m, [(2, m - 2), (n - 2, 2)]))
        ok &= r.ex_bruteforce == 2 * n + 2 * m - 8 and r.extremal_keys == [want.hex()]
        parts.append(f"({n},{m}) ex={r.ex_bruteforce} classes={len(r.extremal_keys)}")
    assert record(8, ok, "; ".join(parts))


def _random_graph(rng, n, m, p):
    return new_graph(n, m, [(i, j) for i in range(n) for j in range(m) if rng.random() < p])


def test_criterion_09_property_suites(tmp_path):
    rng = random.Random(99)
    trees = [t for k in range(1, 5) for l in range(1, 5) for t in enumerate_trees(k, l)]
    mono_bad = 0
    for _ in range(10_000):
        n, m = rng.randint(1, 6), rng.randint(1, 6)
        host = _random_graph(rng, n, m, rng.random())
        t = rng.choice(trees)
        bigger = host.add_edge(rng.randrange(n), rng.randrange(m))
        mono_bad += contains_tree(host, t) and not contains_tree(bigger, t)
    naive_bad = 0
    for _ in range(2000):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        host = _random_graph(rng, n, m, rng.uniform(0.3, 1))
        t = rng.choice(trees)
        naive_bad += contains_tree(host, t) != naive_contains(host, t)
    orbit_bad = 0
    for _ in range(1000):
        n, m = rng.randint(1, 7), rng.randint(1, 7)
        g = _random_graph(rng, n, m, rng.random())
        pu, pv = list(range(n)), list(range(m))
        rng.shuffle(pu)
        rng.shuffle(pv)
        h = new_graph(n, m, [(pu[u], pv[v]) for u, v in g.edges()])
        orbit_bad += canonical_key(g) != canonical_key(h)
    path = str(tmp_path / "cache.jsonl")
    fam = tree_family(3, 2)
    rec = ex_bruteforce(4, 3, fam)
    cache_put(rec, path)
    cache_ok = cache_get(_params_of(4, 3, fam), path) == rec
    env = {**os.environ, "BITREE_CACHE": str(tmp_path / "cli.jsonl")}

    def code(*argv):
        return subprocess.run([sys.executable, "-m", "bitree", *argv], capture_output=True, env=env).returncode

    empty = tmp_path / "e.bmat"
    empty.write_text("2 2\n00\n00\n")
    tree = tmp_path / "t.bmat"
    tree.write_text("1 1\n1\n")
    codes = {
        "ok": code("ex", "formula", "4", "4", "3", "3"),
        "unknown": code("frobnicate"),
        "contract": code("hamilton", "verify-c2n", "9"),
        "absent": code("embed", str(empty), str(tree)),
        "bad-tree": code("embed", str(empty), str(empty)),
        "missing-cache": code("report", "render", "--cache", str(tmp_path / "none.jsonl")),
    }
    cli_ok = codes == {"ok": 0, "unknown": 64, "contract": 2, "absent": 1, "missing-cache": 66, "bad-tree": 2}
    ok = not mono_bad and not naive_bad and not orbit_bad and cache_ok and cli_ok
    assert record(9, ok, f"monotonicity 1e4 ({mono_bad} bad), backtracking vs naive ({naive_bad} bad), "
                         f"orbit invariance ({orbit_bad} bad), cache round-trip {cache_ok}, exit codes {codes}")


def test_criterion_10_conjecture_scan(tmp_path):
    env = {**os.environ, "BITREE_CACHE": str(tmp_path / "unused.jsonl")}
    argv = [sys.executable, "-m", "bitree", "conjecture", "scan", "--nmax", "30", "--mmax", "30", "--no-cache", "--json"]
    outs = []
    for _ in range(2):
        p = subprocess.run(argv, capture_output=True, text=True, env=env)
        assert p.returncode == 0, p.stderr
        d = json.loads(p.stdout)
        d.pop("elapsed")
        outs.append(d)
    rows = outs[0]["results"]["rows"]
    evaluated = [r for r in rows if r["status"] in (MATCH, MISMATCH)]
    tuples = conjecture_tuples(30, 30, 30)
    guarded = {t for t in tuples if conjecture_value(*t) is not None}
    counts = outs[0]["results"]["counts"]
    ok = outs[0] == outs[1] and {(r["n"], r["m"], r["k"], r["l"]) for r in evaluated} == guarded
    ok &= len(evaluated) == len(rows) and all("brute" in r and "conjecture" in r for r in evaluated)
    ok &= counts["Incomplete"] == 0 and counts["GuardNotMet"] == len(tuples) - len(guarded)
    assert record(10, ok, f"deterministic across two runs; {counts} (agreement values are findings)")


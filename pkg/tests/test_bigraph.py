import random

import pytest

from bitree.bigraph import (
    U, V, BipartiteGraph, GraphError, canonical_key, complete, degree_sequence, graph_from_key,
    isomorphic_bruteforce, new_graph, parse_bmat, serialize_bmat, to_dot,
)
from bitree.hamilton import pendant_extremal
from oracles import labeled_matrices, orbit_count

# G_0: the (3,3) graph with six edges and U, V degrees (1,2,3)
G0_EDGES = [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (2, 2)]


def from_matrix(mat):
    return BipartiteGraph(len(mat), len(mat[0]), tuple(sum(b << j for j, b in enumerate(r)) for r in mat))


def permuted(g, rng):
    pu = list(range(g.n))
    pv = list(range(g.m))
    rng.shuffle(pu)
    rng.shuffle(pv)
    return new_graph(g.n, g.m, [(pu[u], pv[v]) for u, v in g.edges()])


def random_graph(rng, n, m, p=0.5):
    return new_graph(n, m, [(i, j) for i in range(n) for j in range(m) if rng.random() < p])


def test_new_graph_examples():
    k22 = new_graph(2, 2, [(0, 0), (0, 1), (1, 0), (1, 1)])
    assert k22 == complete(2, 2) and k22.edge_count == 4
    g0 = new_graph(3, 3, G0_EDGES)
    assert degree_sequence(g0, U) == (1, 2, 3) and degree_sequence(g0, V) == (1, 2, 3)
    assert new_graph(1, 1, []).edge_count == 0


def test_new_graph_duplicates_idempotent():
    g = new_graph(2, 3, [(0, 1), (0, 1), (1, 2)])
    assert g.edge_count == 2


def test_new_graph_rejects_bad_input():
    with pytest.raises(GraphError, match=r"\(2, 0\)"):
        new_graph(2, 2, [(2, 0)])
    with pytest.raises(GraphError):
        new_graph(0, 3)
    with pytest.raises(GraphError):
        BipartiteGraph(2, 0, (0, 0))


def test_degree_sequence_examples():
    assert degree_sequence(complete(3, 2), U) == (2, 2, 2)
    assert degree_sequence(new_graph(3, 3), V) == (0, 0, 0)
    for n in range(2, 6):
        g = pendant_extremal(n)
        assert degree_sequence(g, V) == (1,) + (n,) * (n - 1)
        assert degree_sequence(g, U) == (n - 1,) * (n - 1) + (n,)


def test_degree_sum_identity():
    rng = random.Random(1)
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 7), rng.randint(1, 7))
        assert sum(g.degrees(U)) == sum(g.degrees(V)) == g.edge_count


def test_key_relabel_invariance_small():
    a = new_graph(1, 2, [(0, 0), (0, 1)])
    b = new_graph(1, 2, [(0, 1), (0, 0)])
    assert canonical_key(a) == canonical_key(b)


def test_key_orbit_invariance_random():
    rng = random.Random(7)
    for _ in range(1000):
        n, m = rng.randint(1, 7), rng.randint(1, 7)
        g = random_graph(rng, n, m, rng.random())
        h = permuted(g, rng)
        assert canonical_key(g) == canonical_key(h)
        if n == m:
            assert canonical_key(g, True) == canonical_key(h.transpose(), True)


def test_key_unique_for_g0():
    # every (3,3) graph with six edges and a degree-3 vertex on both sides
    keys = set()
    for mat in labeled_matrices(3, 3):
        g = from_matrix(mat)
        if g.edge_count == 6 and 3 in g.degrees(U) and 3 in g.degrees(V):
            keys.add(canonical_key(g))
    assert keys == {canonical_key(new_graph(3, 3, G0_EDGES))}


@pytest.mark.parametrize("n,m,swap,expected", [
    (2, 2, False, 7), (2, 2, True, 6), (3, 2, False, 13), (2, 3, False, 13),
    (3, 3, False, 36), (3, 3, True, 26),
])
def test_orbit_counts(n, m, swap, expected):
    # frozen from explicit permutation enumeration in oracles.orbit_count
    keys = {canonical_key(from_matrix(x), swap) for x in labeled_matrices(n, m)}
    assert len(keys) == expected


def test_orbit_count_oracle_agrees():
    assert orbit_count(2, 2) == 7 and orbit_count(2, 2, True) == 6


def test_key_separation_exhaustive():
    for n in range(1, 4):
        for m in range(1, 4):
            reps = {}
            for mat in labeled_matrices(n, m):
                g = from_matrix(mat)
                reps.setdefault(canonical_key(g), g)
            graphs = list(reps.values())
            for i, a in enumerate(graphs):
                for b in graphs[i + 1:]:
                    assert not isomorphic_bruteforce(a, b)
            assert len(graphs) == orbit_count(n, m)


def test_key_equals_bruteforce_isomorphism():
    rng = random.Random(3)
    for _ in range(300):
        n, m = rng.randint(1, 4), rng.randint(1, 4)
        a = random_graph(rng, n, m)
        b = random_graph(rng, n, m)
        for swap in (False, True):
            assert (canonical_key(a, swap) == canonical_key(b, swap)) == isomorphic_bruteforce(a, b, swap)


def test_graph_from_key_roundtrip():
    rng = random.Random(5)
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 7), rng.randint(1, 7))
        k = canonical_key(g)
        assert canonical_key(graph_from_key(k)) == k
        assert canonical_key(graph_from_key(k.hex())) == k


def test_bmat_examples():
    assert parse_bmat("2 2\n11\n11\n") == complete(2, 2)
    s = "3 4\n1010\n0000\n1111\n"
    assert serialize_bmat(parse_bmat(s)) == s
    g0 = new_graph(3, 3, G0_EDGES)
    assert canonical_key(parse_bmat(serialize_bmat(g0))) == canonical_key(g0)


def test_bmat_roundtrip_random():
    rng = random.Random(11)
    for _ in range(200):
        g = random_graph(rng, rng.randint(1, 8), rng.randint(1, 8))
        assert parse_bmat(serialize_bmat(g)) == g


@pytest.mark.parametrize("text,line", [
    ("", 1), ("2\n11\n11\n", 1), ("a b\n", 1), ("0 2\n", 1),
    ("2 2\n11\n", 3), ("2 2\n11\n1\n", 3), ("2 2\n11\n12\n", 3), ("2 2\n11\n11\n11\n", 5),
])
def test_bmat_errors_name_line(text, line):
    with pytest.raises(GraphError, match=f"line {line}"):
        parse_bmat(text)


def test_dot_output():
    dot = to_dot(new_graph(2, 1, [(1, 0)]), "H")
    assert dot.startswith("graph H {") and "u1 -- v0;" in dot and "u0 -- v0" not in dot

"""Closed-form extremal numbers for tree families, the conjectured values, and
constructions of the extremal graphs."""

from __future__ import annotations

from dataclasses import dataclass, field
from math import ceil, floor
from typing import Optional

from .bigraph import BipartiteGraph, canonical_key, complete, disjoint_union
from .embed import ContractError

PROVEN = "Proven"
CONJECTURED = "Conjectured"
UNKNOWN = "Unknown"


class Unsupported(ValueError):
    """Parameters outside every characterized range."""


@dataclass(frozen=True)
class ExValue:
    value: Optional[int]
    status: str
    case_label: str

    def as_dict(self) -> dict:
        return {"value": self.value, "status": self.status, "case_label": self.case_label}


@dataclass
class ExtremalCatalog:
    n: int
    m: int
    k: int
    l: int
    value: int
    members: list[BipartiteGraph]
    labels: list[str]
    complete: bool
    symbolic: list[str] = field(default_factory=list)

    def keys(self) -> list[str]:
        return [canonical_key(g).hex() for g in self.members]


def _check_counts(*xs: int) -> None:
    for x in xs:
        if not isinstance(x, int) or isinstance(x, bool) or x < 1:
            raise ContractError(f"parameters must be positive integers, got {xs}")


def _normalize(n: int, m: int, k: int, l: int) -> tuple[int, int, int, int, str]:
    prefix = ""
    if n < m:
        n, m = m, n
        prefix = "transposed; "
    if k < l:
        k, l = l, k
    return n, m, k, l, prefix


def ex_formula(n: int, m: int, k: int, l: int) -> ExValue:
    _check_counts(n, m, k, l)
    n, m, k, l, pre = _normalize(n, m, k, l)
    nm = n * m
    if k > n or l > m:
        return ExValue(nm, PROVEN, pre + "no tree fits")
    if (k, l) == (n, m):
        return ExValue((n - 1) * m, PROVEN, pre + "spanning (n-1)m")
    if l == 2:
        return _ex_l2(n, m, k, pre)
    if (k, l) == (3, 3):
        if n >= 5 and m >= 5:
            return ExValue(2 * (n + m) - 8, PROVEN, pre + "t33 n,m>=5")
        if n == m == 4:
            return ExValue(9, PROVEN, pre + "t33 n=m=4")
        return ExValue(2 * n, PROVEN, pre + "t33 2n")
    c = conjecture_value(n, m, k, l)
    if c is not None:
        return ExValue(c.value, CONJECTURED, pre + c.case_label)
    return ExValue(None, UNKNOWN, pre + "no formula")


def _ex_l2(n: int, m: int, k: int, pre: str) -> ExValue:
    if k == 2:
        return ExValue(n + m - 2, PROVEN, pre + "k2 n+m-2")
    if m == 2:
        b = floor(3 * k / 2) - 1
        if n >= b:
            tag = "l2 m=2 n>=floor(3k/2)-1" if n > b else "l2 m=2 n=floor(3k/2)-1 boundary"
            return ExValue(n + ceil(k / 2) - 1, PROVEN, pre + tag)
        return ExValue(2 * (k - 1), PROVEN, pre + "l2 m=2 n<floor(3k/2)-1")
    if m <= k:
        if n >= 2 * k - 1:
            return ExValue((m - 2) * (k - 1) + n, PROVEN, pre + "l2 3<=m<=k n>=2k-1")
        return ExValue(m * (k - 1), PROVEN, pre + "l2 3<=m<=k n<=2k-2")
    if n - m >= k - 1:
        return ExValue((k - 1) * (m - 1) + n - m + 1, PROVEN, pre + "l2 m>=k+1 n-m>=k-1")
    return ExValue((k - 1) * m, PROVEN, pre + "l2 m>=k+1 n-m<=k-2")


def ex_path(n: int, m: int, path_len: int) -> ExValue:
    """ex(n,m;P_p) for an even number p = 2l of vertices; odd p is reported Unknown."""
    _check_counts(n, m, path_len)
    if path_len < 4:
        raise ContractError(f"path length must be at least 4, got {path_len}")
    pre = ""
    if n < m:
        n, m, pre = m, n, "transposed; "
    if path_len % 2:
        return ExValue(None, UNKNOWN, pre + "odd path")
    l = path_len // 2
    if m <= l - 1:
        return ExValue(n * m, PROVEN, pre + "path m<=l-1")
    if m < 2 * (l - 1):
        return ExValue((l - 1) * n, PROVEN, pre + "path l-1<m<2(l-1)")
    return ExValue((l - 1) * (n + m - 2 * l + 2), PROVEN, pre + "path m>=2(l-1)")


def conjecture_value(n: int, m: int, k: int, l: int) -> Optional[ExValue]:
    if not (n >= m and k >= l and n >= k and m >= l):
        return None
    if k < 2 * l - 2 and m >= 2 * l:
        return ExValue((l - 1) * (n + m - 2 * l + 2), CONJECTURED, "conjecture case 1")
    if k >= 2 * l - 1 and m - l + 1 >= k - 1:
        if n - m + l - 1 >= k:
            return ExValue((k - 1) * (m - l + 1) + (l - 1) * (n - m + l - 1), CONJECTURED, "conjecture case 2")
        if n - m + l - 1 <= k - 1:
            return ExValue((k - 1) * m, CONJECTURED, "conjecture case 3")
    return None


def single_tree_formula(n: int, m: int, tree: BipartiteGraph) -> Optional[ExValue]:
    """Known value for a single excluded tree: even paths, and the double star S_{3,3} when n,m >= 5."""
    from .treegen import make_double_star, make_path

    key = canonical_key(tree, allow_side_swap=True)
    p = tree.n + tree.m
    if tree.n in (p // 2, (p + 1) // 2) and p >= 4:
        path = make_path(p)
        if {canonical_key(path, True), canonical_key(path.transpose(), True)} & {key}:
            return ex_path(n, m, p)
    a, b = max(n, m), min(n, m)
    if key == canonical_key(make_double_star(3, 3), True) and b >= 5:
        return ExValue(2 * (a + b) - 8, PROVEN, "s33 n,m>=5")
    return None


# ---------------------------------------------------------------------------
# constructions


def make_regular_bipartite(size: int, degree: int) -> BipartiteGraph:
    """Circulant: u_i ~ v_{(i+j) mod size} for j < degree."""
    if size < 1 or degree < 0:
        raise ContractError(f"need size >= 1 and degree >= 0, got ({size},{degree})")
    if degree > size:
        raise ContractError(f"degree {degree} exceeds size {size}")
    rows = []
    for i in range(size):
        r = 0
        for j in range(degree):
            r |= 1 << ((i + j) % size)
        rows.append(r)
    return BipartiteGraph(size, size, tuple(rows))


def union_blocks(n: int, m: int, blocks: list[tuple[int, int]]) -> BipartiteGraph:
    """Disjoint union of complete blocks K_{a,b} (a in U, b in V), padded with isolated vertices."""
    rows = []
    off = 0
    for a, b in blocks:
        full = ((1 << b) - 1) << off
        rows.extend([full] * a)
        off += b
    if len(rows) > n or off > m:
        raise ContractError(f"blocks {blocks} do not fit in ({n},{m})")
    rows.extend([0] * (n - len(rows)))
    return BipartiteGraph(n, m, tuple(rows))


def double_star(n: int, m: int) -> BipartiteGraph:
    """S_{n,m} spanning an (n,m) host: u_0 sees every V vertex, v_0 sees every U vertex."""
    rows = [(1 << m) - 1] + [1] * (n - 1)
    return BipartiteGraph(n, m, tuple(rows))


def from_v_neighbourhoods(n: int, m: int, cols: list[int]) -> BipartiteGraph:
    rows = [0] * n
    for j, c in enumerate(cols):
        for i in range(n):
            if c >> i & 1:
                rows[i] |= 1 << j
    return BipartiteGraph(n, m, tuple(rows))


def v_degree_graph(n: int, degrees: list[int]) -> BipartiteGraph:
    """V vertices taking consecutive (cyclic) runs of U vertices; a simple representative."""
    cols = []
    start = 0
    for d in degrees:
        c = 0
        for t in range(d):
            c |= 1 << ((start + t) % n)
        cols.append(c)
        start = (start + d) % n
    return from_v_neighbourhoods(n, len(degrees), cols)


def _two_sets(n: int, a: int, b: int, third: Optional[int] = None) -> list[BipartiteGraph]:
    """Every (n,2) or (n,3) graph whose first two V vertices have degrees a, b (all overlaps)."""
    out = []
    for t in range(max(0, a + b - n), min(a, b) + 1):
        ca = (1 << a) - 1
        cb = (((1 << b) - 1) << (a - t))
        cols = [ca, cb]
        if third is not None:
            cols.append((1 << third) - 1)
        out.append(from_v_neighbourhoods(n, len(cols), cols))
    return out


def _dedupe(graphs: list[BipartiteGraph]) -> list[BipartiteGraph]:
    seen = {}
    for g in graphs:
        seen.setdefault(canonical_key(g), g)
    return [seen[k] for k in sorted(seen)]


def _transpose_catalog(cat: ExtremalCatalog) -> ExtremalCatalog:
    cat.members = [g.transpose() for g in cat.members]
    cat.n, cat.m = cat.m, cat.n
    cat.labels = ["transposed; " + s for s in cat.labels]
    return cat


def construct_extremal(n: int, m: int, k: int, l: int) -> ExtremalCatalog:
    _check_counts(n, m, k, l)
    if n < m:
        return _transpose_catalog(construct_extremal(m, n, k, l))
    if k < l:
        k, l = l, k
    val = ex_formula(n, m, k, l)
    if val.status != PROVEN:
        raise Unsupported(f"no characterization for ({n},{m},{k},{l})")
    e = val.value

    def cat(members, labels, complete_, symbolic=()):
        return ExtremalCatalog(n, m, k, l, e, _dedupe(members), list(labels), complete_, list(symbolic))

    if k > n or l > m:
        return cat([complete(n, m)], ["K_{n,m}"], True)
    if (k, l) == (n, m):
        return _spanning(n, m, cat)
    if l == 2:
        return _l2(n, m, k, cat)
    if (k, l) == (3, 3):
        return _t33(n, m, cat)
    raise Unsupported(f"no characterization for ({n},{m},{k},{l})")


def _spanning(n, m, cat):
    if n == m:
        fam = "every U vertex (or every V vertex) has degree n-1"
        g = make_regular_bipartite(n, n - 1)
        return cat([g], ["(n-1)-regular"], n == 1, [fam])
    # each V vertex misses one U vertex
    v_miss = v_degree_graph(n, [n - 1] * m)
    if n == m + 1:
        pend = from_v_neighbourhoods(n, m, [1] + [(1 << n) - 1] * (m - 1))
        return cat([v_miss, pend], ["V degrees n-1", "V degrees 1,n,...,n"], False,
                   ["every V vertex has degree n-1", "d(v_1)=1, other V vertices have degree n"]) if m > 1 else \
            cat([v_miss], ["V degree 1"], True)
    return cat([v_miss], ["V degrees n-1"], m == 1, ["every V vertex has degree n-1"])


def _l2(n, m, k, cat):
    if k == 2:
        if m == 2:
            members = [union_blocks(n, 2, [(p, 1), (n - p, 1)]) for p in range(0, n // 2 + 1)]
            return cat(members, [f"K_{{1,{p}}} + K_{{1,{n - p}}}" for p in range(0, n // 2 + 1)], True)
        return cat([union_blocks(n, m, [(1, m - 1), (n - 1, 1)])], ["K_{1,m-1} + K_{1,n-1}"], True)
    c = ceil(k / 2) - 1
    if m == 2:
        b = floor(3 * k / 2) - 1
        members, labels = [], []
        if n >= b:
            members += _two_sets(n, n, c)
            labels.append("V degrees n, ceil(k/2)-1")
        if n <= b:
            members += _two_sets(n, k - 1, k - 1)
            labels.append("V degrees k-1, k-1")
        return cat(members, labels, True)
    if m <= k:
        if n >= 2 * k - 1:
            members = [union_blocks(n, m, [(k - 1, m - 1), (n - k + 1, 1)])]
            labels = ["K_{k-1,m-1} + K_{n-k+1,1}"]
            if m == 3 and k >= 5 and k % 2:
                members += _two_sets(n, c, c, third=n)
                labels.append("V degrees c,c,n with c=ceil(k/2)-1")
            if k == 3:
                members.append(double_star(n, 3))
                labels.append("S_{n,3}")
            return cat(members, labels, True)
        members = [_bounded_rep(n, m, k)]
        labels = ["d(u)<=k-1, d(v)=k-1"]
        if n == 2 * k - 2 and m == 3 and k % 2:
            if k == 3:
                # with c = 1 a split pair of leaves gives a U-centred P_5; only the double star survives
                members.append(double_star(n, 3))
                labels.append("S_{n,3}")
            else:
                members += _two_sets(n, c, c, third=n)
                labels.append("V degrees c,c,2k-2")
        return cat(members, labels, False, ["every V vertex has degree k-1, every U vertex at most k-1"])
    if n - m >= k - 1:
        reg = make_regular_bipartite(m - 1, k - 1)
        star = BipartiteGraph(n - m + 1, 1, (1,) * (n - m + 1))
        members = [disjoint_union(reg, star)]
        labels = ["B^{k-1}_{m-1,m-1} + K_{1,n-m+1}"]
        if k == 3:
            members.append(double_star(n, m))
            labels.append("S_{n,m}")
        return cat(members, labels, False, ["any (k-1)-regular graph on the (m-1,m-1) block"])
    members = [_bounded_rep(n, m, k)]
    labels = ["d(u)<=k-1, d(v)=k-1"]
    if k == 3 and n == m + 1:
        members.append(double_star(n, m))
        labels.append("S_{m+1,m}")
    return cat(members, labels, False, ["every V vertex has degree k-1, every U vertex at most k-1"])


def _bounded_rep(n: int, m: int, k: int) -> BipartiteGraph:
    if n == m:
        return make_regular_bipartite(n, k - 1)
    return v_degree_graph(n, [k - 1] * m)


def _u_degree_two(n: int, m: int) -> BipartiteGraph:
    rows = [(1 << (i % m)) | (1 << ((i + 1) % m)) for i in range(n)]
    return BipartiteGraph(n, m, tuple(rows))


def _t33(n, m, cat):
    if n == m == 3:
        return cat([_u_degree_two(3, 3)], ["2-regular"], False, ["every U vertex (or every V vertex) has degree 2"])
    if m == 3 or (m == 4 and n >= 6):
        return cat([_u_degree_two(n, m)], ["every U vertex has degree 2"], False, ["every U vertex has degree 2"])
    if (n, m) == (4, 4):
        return cat(figure_graphs("G'1"), ["G'_1"], True)
    if (n, m) == (5, 4):
        return cat([_u_degree_two(5, 4)] + figure_graphs("G'2"), ["every U vertex has degree 2", "G'_2"], False,
                   ["every U vertex has degree 2"])
    return cat(*_s33_members(n, m), True)


def _s33_members(n: int, m: int):
    members = [union_blocks(n, m, [(2, m - 2), (n - 2, 2)])]
    labels = ["K_{2,n-2} + K_{2,m-2}"]
    if n == m == 5:
        members += figure_graphs("G'3")
        labels.append("G'_3")
    return members, labels


def construct_s33(n: int, m: int) -> ExtremalCatalog:
    """Extremal graphs for the single double star S_{3,3} (n, m >= 5)."""
    if min(n, m) < 5:
        raise Unsupported("only characterized for n, m >= 5")
    if n < m:
        return _transpose_catalog(construct_s33(m, n))
    members, labels = _s33_members(n, m)
    return ExtremalCatalog(n, m, 3, 3, 2 * (n + m) - 8, _dedupe(members), labels, True)


def construct_path_extremal(n: int, m: int, path_len: int) -> ExtremalCatalog:
    val = ex_path(n, m, path_len)
    if val.status != PROVEN:
        raise Unsupported("odd paths are not characterized")
    if n < m:
        return _transpose_catalog(construct_path_extremal(m, n, path_len))
    l = path_len // 2
    if m <= l - 1:
        members, labels = [complete(n, m)], ["K_{n,m}"]
    elif m < 2 * (l - 1):
        members, labels = [union_blocks(n, m, [(n, l - 1)])], ["K_{l-1,n} + isolated V"]
    else:
        members = [union_blocks(n, m, [(l - 1, m - l + 1), (n - l + 1, l - 1)])]
        labels = ["K_{l-1,m-l+1} + K_{l-1,n-l+1}"]
        if m == 2 * (l - 1):
            for i in range(0, n // 2 + 1):
                members.append(union_blocks(n, m, [(i, l - 1), (n - i, l - 1)]))
            labels.append("K_{l-1,i} + K_{l-1,n-i}")
    return ExtremalCatalog(n, m, (path_len + 1) // 2, path_len // 2, val.value, _dedupe(members), labels, True)


# figure graphs come out of extremal enumeration rather than a transcription of the drawings
_FIGURES: dict[str, list[BipartiteGraph]] = {}


def figure_graphs(name: str) -> list[BipartiteGraph]:
    """G0 (unique (3,3) graph with six edges and both maximum degrees 3), G'1, G'2, G'3."""
    if name not in _FIGURES:
        _FIGURES[name] = _compute_figure(name)
    return list(_FIGURES[name])


def _compute_figure(name: str) -> list[BipartiteGraph]:
    from . import search
    from .bigraph import U, V, graph_from_form
    from .treegen import enumerate_trees, make_double_star

    if name == "G0":
        out = []
        for form in search.classes_at_level(3, 3, 6):
            g = graph_from_form(3, 3, form)
            if max(g.degrees(U)) == 3 and max(g.degrees(V)) == 3:
                out.append(g)
        return out
    t33 = enumerate_trees(3, 3)

    def nonuniform(g):
        return any(d != 2 for d in g.degrees(U))

    if name == "G'1":
        return search.extremal_graphs(4, 4, t33)
    if name == "G'2":
        return [g for g in search.extremal_graphs(5, 4, t33) if nonuniform(g)]
    if name == "G'3":
        two = canonical_key(union_blocks(5, 5, [(2, 3), (3, 2)]))
        return [g for g in search.extremal_graphs(5, 5, make_double_star(3, 3)) if canonical_key(g) != two]
    raise Unsupported(f"unknown figure graph {name!r}")

"""Enumeration of (k,l)-bipartite trees up to isomorphism, plus named trees."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import ceil

from .bigraph import U, V, BipartiteGraph, CanonicalKey, GraphError, canonical_form, canonical_key

DEFAULT_CAP = 12


class TreeSizeError(ValueError):
    pass


class BipartiteTree(BipartiteGraph):
    """A connected acyclic bipartite graph with parts (k, l)."""

    def __post_init__(self):
        super().__post_init__()
        if self.edge_count != self.n + self.m - 1 or not self.is_connected():
            raise GraphError(f"not a tree: {self.n}+{self.m} vertices, {self.edge_count} edges")

    @property
    def k(self) -> int:
        return self.n

    @property
    def l(self) -> int:
        return self.m

    def transpose(self) -> "BipartiteTree":
        return BipartiteTree(self.m, self.n, self.cols)

    @classmethod
    def from_graph(cls, g: BipartiteGraph) -> "BipartiteTree":
        return cls(g.n, g.m, g.rows)


@dataclass(frozen=True)
class TreeFamily:
    k: int
    l: int
    members: tuple[BipartiteTree, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    @property
    def size(self) -> int:
        return len(self.members)


def family_key(t: BipartiteGraph) -> CanonicalKey:
    """Ordering/dedup key for family members; side swap is quotiented when k == l."""
    return canonical_key(t, allow_side_swap=True)


@lru_cache(maxsize=None)
def _sided_forms(k: int, l: int) -> frozenset:
    """Side-respecting canonical forms of every (k,l) tree, grown leaf by leaf."""
    if k < 1 or l < 1:
        return frozenset()
    if k == 1 and l == 1:
        return frozenset({(1,)})
    found = set()
    # new U leaf hung on a V vertex
    for form in _sided_forms(k - 1, l):
        rows = _rows_of(k - 1, l, form)
        for j in range(l):
            found.add(canonical_form(k, l, rows + (1 << j,)))
    # new V leaf hung on a U vertex
    for form in _sided_forms(k, l - 1):
        rows = _rows_of(k, l - 1, form)
        for i in range(k):
            new = list(rows)
            new[i] |= 1 << (l - 1)
            found.add(canonical_form(k, l, new))
    return frozenset(found)


def _rows_of(n: int, m: int, form) -> tuple[int, ...]:
    if n >= m:
        return tuple(form)
    return BipartiteGraph(m, n, tuple(form)).transpose().rows


def enumerate_trees(k: int, l: int, cap: int = DEFAULT_CAP) -> TreeFamily:
    if k < 1 or l < 1:
        raise TreeSizeError(f"part sizes must be positive, got ({k},{l})")
    if k + l > cap:
        raise TreeSizeError(f"k+l={k + l} exceeds the enumeration cap of {cap} vertices")
    trees = {}
    for form in _sided_forms(k, l):
        t = BipartiteTree(k, l, _rows_of(k, l, form))
        key = family_key(t)
        if key not in trees or canonical_key(t) < canonical_key(trees[key]):
            trees[key] = t
    members = tuple(trees[key] for key in sorted(trees))
    return TreeFamily(k, l, members)


def count_trees_l2(k: int) -> int:
    if k < 1:
        raise TreeSizeError("k must be positive")
    return ceil(k / 2)


def pendant_count(t: BipartiteGraph, side: str) -> int:
    return sum(1 for d in t.degrees(side) if d == 1)


# named trees


def make_path(p: int) -> BipartiteTree:
    """Path on p vertices, alternating u_0 v_0 u_1 v_1 ..."""
    if p < 2:
        raise TreeSizeError("a path needs at least 2 vertices")
    k, l = (p + 1) // 2, p // 2
    rows = [0] * k
    for i in range(k):
        if i < l:
            rows[i] |= 1 << i
        if i >= 1:
            rows[i] |= 1 << (i - 1)
    return BipartiteTree(k, l, tuple(rows))


def make_star(leaves: int) -> BipartiteTree:
    """K_{1,leaves} with the centre as the single U vertex."""
    if leaves < 1:
        raise TreeSizeError("a star needs at least one leaf")
    return BipartiteTree(1, leaves, ((1 << leaves) - 1,))


def make_double_star(k1: int, k2: int) -> BipartiteTree:
    """S_{k1,k2}: the centre u_0 gets k1-1 V leaves, the centre v_0 gets k2-1 U leaves."""
    if k1 < 1 or k2 < 1:
        raise TreeSizeError("double star parameters must be positive")
    # U = {u_0} + (k2-1) leaves of v_0 ; V = {v_0} + (k1-1) leaves of u_0
    n, m = k2, k1
    rows = [(1 << m) - 1] + [1] * (k2 - 1)
    return BipartiteTree(n, m, tuple(rows))


def max_degree_vertex(t: BipartiteGraph) -> tuple[str, int]:
    du, dv = t.degrees(U), t.degrees(V)
    bu, bv = max(du), max(dv)
    if bu >= bv:
        return U, du.index(bu)
    return V, dv.index(bv)


def k2_family(k: int) -> TreeFamily:
    """T_{k,2} built directly: two V centres sharing one U vertex, degrees a and k+1-a."""
    if k < 1:
        raise TreeSizeError("k must be positive")
    members = []
    for a in range(1, (k + 1) // 2 + 1):
        # u_0 is shared; u_1..u_{a-1} hang on v_0, the rest on v_1
        rows = [0b11] + [0b01] * (a - 1) + [0b10] * (k - a)
        members.append(BipartiteTree(k, 2, tuple(rows)))
    members.sort(key=family_key)
    return TreeFamily(k, 2, tuple(members))


def tree_family(k: int, l: int, cap: int = DEFAULT_CAP) -> TreeFamily:
    """T_{k,l}, using the direct constructions for l <= 2 so large k stays cheap."""
    if l == 1:
        return TreeFamily(k, 1, (make_star(k).transpose(),))
    if k == 1:
        return TreeFamily(1, l, (make_star(l),))
    if l == 2:
        return k2_family(k)
    if k == 2:
        fam = k2_family(l)
        return TreeFamily(2, l, tuple(sorted((t.transpose() for t in fam), key=family_key)))
    return enumerate_trees(k, l, cap)

"""Tree containment by backtracking, and the inductive leaf-peeling embeddings."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations
from math import ceil
from typing import Optional, Sequence

from .bigraph import U, V, BipartiteGraph, bits, popcount
from .treegen import BipartiteTree, TreeFamily

PRESERVED = "preserved"
SWAPPED = "swapped"


class ContractError(ValueError):
    """A precondition of a constructive embedding or a balanced-only operation failed."""


@dataclass(frozen=True)
class Embedding:
    orientation: str
    map_u: tuple[int, ...]
    map_v: tuple[int, ...]

    def as_dict(self) -> dict:
        return {"orientation": self.orientation, "map_u": list(self.map_u), "map_v": list(self.map_v)}


def verify_certificate(host: BipartiteGraph, t: BipartiteGraph, e: Embedding) -> bool:
    """Independent validity check: injective per side, right sides, every tree edge mapped to a host edge."""
    if e.orientation == PRESERVED:
        nu, nv = host.n, host.m
    elif e.orientation == SWAPPED:
        nu, nv = host.m, host.n
    else:
        return False
    if len(e.map_u) != t.n or len(e.map_v) != t.m:
        return False
    if len(set(e.map_u)) != t.n or len(set(e.map_v)) != t.m:
        return False
    if not all(0 <= x < nu for x in e.map_u) or not all(0 <= y < nv for y in e.map_v):
        return False
    for i, j in t.edges():
        a, b = e.map_u[i], e.map_v[j]
        ok = host.has_edge(a, b) if e.orientation == PRESERVED else host.has_edge(b, a)
        if not ok:
            return False
    return True


# ---------------------------------------------------------------------------
# backtracking


@lru_cache(maxsize=4096)
def _plan(k: int, l: int, rows: tuple[int, ...]):
    """BFS order from a max-degree vertex; entries are (side, index, degree, parent position)."""
    t = BipartiteGraph(k, l, rows)
    du, dv = t.degrees(U), t.degrees(V)
    if max(du) >= max(dv):
        root = (0, du.index(max(du)))
    else:
        root = (1, dv.index(max(dv)))
    order = [root]
    pos = {root: 0}
    parent = [-1]
    head = 0
    while head < len(order):
        side, idx = order[head]
        nbrs = bits(t.rows[idx]) if side == 0 else bits(t.cols[idx])
        # visit high-degree children first so they are constrained early
        nb = sorted(nbrs, key=lambda x: -(dv[x] if side == 0 else du[x]))
        for x in nb:
            node = (1 - side, x)
            if node not in pos:
                pos[node] = len(order)
                order.append(node)
                parent.append(head)
        head += 1
    return tuple((s, i, du[i] if s == 0 else dv[i], p) for (s, i), p in zip(order, parent))


def _search(plan, hrows: Sequence[int], hcols: Sequence[int]) -> Optional[list[int]]:
    hdeg = ([popcount(r) for r in hrows], [popcount(c) for c in hcols])
    adj = (hrows, hcols)
    sizes = (len(hrows), len(hcols))
    maxd = max(p[2] for p in plan) + 1
    # degmask[side][d]: host vertices on side with degree >= d
    degmask = []
    for s in (0, 1):
        masks = []
        for d in range(maxd):
            masks.append(sum(1 << x for x in range(sizes[s]) if hdeg[s][x] >= d))
        degmask.append(masks)
    if any(degmask[s][d] == 0 for s, _, d, _ in plan):
        return None
    total = len(plan)
    img = [0] * total
    used = [0, 0]

    def rec(pos: int) -> bool:
        if pos == total:
            return True
        side, _, deg, par = plan[pos]
        if par < 0:
            cand = degmask[side][deg]
        else:
            cand = adj[1 - side][img[par]] & degmask[side][deg]
        cand &= ~used[side]
        # descending host degree
        for x in sorted(bits(cand), key=lambda x: -hdeg[side][x]):
            img[pos] = x
            used[side] |= 1 << x
            if rec(pos + 1):
                return True
            used[side] &= ~(1 << x)
        return False

    if not rec(0):
        return None
    out = [None, None]
    out[0] = [0] * sum(1 for p in plan if p[0] == 0)
    out[1] = [0] * sum(1 for p in plan if p[0] == 1)
    for (side, idx, _, _), x in zip(plan, img):
        out[side][idx] = x
    return out


def _fits(host: BipartiteGraph, t: BipartiteGraph, orientation: str) -> bool:
    if orientation == PRESERVED:
        return t.n <= host.n and t.m <= host.m
    return t.n <= host.m and t.m <= host.n


def find_embedding(host: BipartiteGraph, t: BipartiteGraph, orientation: str = PRESERVED) -> Optional[Embedding]:
    if not _fits(host, t, orientation):
        return None
    plan = _plan(t.n, t.m, t.rows)
    if orientation == PRESERVED:
        res = _search(plan, host.rows, host.cols)
    else:
        res = _search(plan, host.cols, host.rows)
    if res is None:
        return None
    return Embedding(orientation, tuple(res[0]), tuple(res[1]))


def contains_tree(host: BipartiteGraph, t: BipartiteGraph) -> bool:
    for o in (PRESERVED, SWAPPED):
        if _fits(host, t, o) and find_embedding(host, t, o) is not None:
            return True
    return False


def contains_tree_raw(hrows, hcols, n: int, m: int, t: BipartiteGraph) -> bool:
    """contains_tree on raw masks; used by the search hot loop."""
    plan = _plan(t.n, t.m, t.rows)
    if t.n <= n and t.m <= m and _search(plan, hrows, hcols) is not None:
        return True
    if t.n <= m and t.m <= n and _search(plan, hcols, hrows) is not None:
        return True
    return False


def contains_all(host: BipartiteGraph, family: TreeFamily | Sequence[BipartiteGraph]) -> tuple[bool, Optional[BipartiteGraph]]:
    for t in family:
        if not contains_tree(host, t):
            return False, t
    return True, None


def strongly_contains(host: BipartiteGraph, t: BipartiteGraph) -> bool:
    if not (host.n == host.m == t.n == t.m):
        raise ContractError(f"strong containment needs a balanced host and tree of equal size, got host ({host.n},{host.m}) tree ({t.n},{t.m})")
    return find_embedding(host, t, PRESERVED) is not None and find_embedding(host, t, SWAPPED) is not None


def naive_contains(host: BipartiteGraph, t: BipartiteGraph) -> bool:
    """Reference containment: every injective side-respecting map, both orientations."""
    edges = t.edges()
    for h in (host, host.transpose()):
        if t.n > h.n or t.m > h.m:
            continue
        for pu in permutations(range(h.n), t.n):
            for pv in permutations(range(h.m), t.m):
                if all(h.rows[pu[i]] >> pv[j] & 1 for i, j in edges):
                    return True
    return False


def neighbourhood_prune(rows: Sequence[int], cols: Sequence[int], k: int) -> bool:
    """True when two same-side vertices of degree >= ceil(k/2) and >= k share a neighbour.

    A graph with such a pair contains every (k,2)-tree.
    """
    lo, hi = ceil(k / 2), k
    for side in (rows, cols):
        degs = [popcount(x) for x in side]
        big = [i for i, d in enumerate(degs) if d >= hi]
        if not big:
            continue
        mid = [i for i, d in enumerate(degs) if d >= lo]
        for a in big:
            for b in mid:
                if a != b and side[a] & side[b]:
                    return True
    return False


# ---------------------------------------------------------------------------
# constructive embeddings


def _peel(t: BipartiteGraph, leaf_side: int):
    """Remove a pendant vertex y0 on ``leaf_side`` and its support x; reattach x's other children to x'.

    Returns (reduced tree, y0, x, index maps old->new for each side), with sides
    in tree coordinates: side 0 = tree U, side 1 = tree V.
    """
    adj = (t.rows, t.cols)
    degs = (t.degrees(U), t.degrees(V))
    y0 = next(i for i, d in enumerate(degs[leaf_side]) if d == 1)
    x = next(bits(adj[leaf_side][y0]))
    xside = 1 - leaf_side
    ys = [y for y in bits(adj[xside][x]) if y != y0]
    # components of T - {x, y0}, one per y in ys
    removed = {(leaf_side, y0), (xside, x)}
    comp_of_y = {}
    for y in ys:
        seen = {(leaf_side, y)}
        stack = [(leaf_side, y)]
        while stack:
            s, v = stack.pop()
            for w in bits(adj[s][v]):
                node = (1 - s, w)
                if node not in removed and node not in seen:
                    seen.add(node)
                    stack.append(node)
        comp_of_y[y] = seen
    # y1: first child whose component holds a vertex on x's side
    y1 = next(y for y in ys if any(s == xside for s, _ in comp_of_y[y]))
    xp = min(v for s, v in comp_of_y[y1] if s == xside)
    rest = [y for y in ys if y != y1]
    keep = ([i for i in range(t.n) if (0, i) not in removed], [j for j in range(t.m) if (1, j) not in removed])
    newidx = ({o: p for p, o in enumerate(keep[0])}, {o: p for p, o in enumerate(keep[1])})
    edges = [(i, j) for i, j in t.edges() if (0, i) not in removed and (1, j) not in removed]
    for y in rest:
        edges.append((xp, y) if xside == 0 else (y, xp))
    rows = [0] * len(keep[0])
    for i, j in edges:
        rows[newidx[0][i]] |= 1 << newidx[1][j]
    reduced = BipartiteTree(len(keep[0]), len(keep[1]), tuple(rows))
    return reduced, y0, x, keep


def _balanced_exceptional(host: BipartiteGraph) -> Optional[str]:
    n = host.n
    if all(d == n - 1 for d in host.degrees(U)):
        return "every U vertex has degree n-1"
    if all(d == n - 1 for d in host.degrees(V)):
        return "every V vertex has degree n-1"
    return None


def _embed_balanced(host: BipartiteGraph, t: BipartiteGraph) -> tuple[list[int], list[int]]:
    n = host.n
    if n == 1:
        if not host.rows[0] & 1:
            raise ContractError("reduced (1,1) host lost its edge")
        return [0], [0]
    du, dv = host.degrees(U), host.degrees(V)
    u_full = next((i for i, d in enumerate(du) if d == n), None)
    if u_full is None:
        raise ContractError("no U vertex adjacent to all of V")
    v_min = min(range(n), key=lambda j: (dv[j], j))
    reduced_host, keep_u, keep_v = host.remove_vertices([u_full], [v_min])
    if reduced_host.edge_count <= (n - 1) * (n - 2):
        raise ContractError(f"reduced host has {reduced_host.edge_count} <= (n-1)(n-2) edges")
    reduced_tree, y0, x, keep = _peel(t, leaf_side=1)
    mu, mv = _embed_balanced(reduced_host, reduced_tree)
    map_u = [0] * n
    map_v = [0] * n
    for p, orig in enumerate(keep[0]):
        map_u[orig] = keep_u[mu[p]]
    for p, orig in enumerate(keep[1]):
        map_v[orig] = keep_v[mv[p]]
    map_u[x] = u_full
    map_v[y0] = v_min
    return map_u, map_v


def constructive_embed_balanced(host: BipartiteGraph, t: BipartiteGraph, orientation: str = PRESERVED) -> Embedding:
    """Embed a tree of T_{n,n} into a dense (n,n) host by peeling a leaf and recursing.

    Needs n >= 3, at least n(n-1) edges, and neither side of uniform degree n-1.
    """
    n = host.n
    if host.m != n or t.n != n or t.m != n:
        raise ContractError(f"balanced embedding needs host and tree of parts ({n},{n})")
    if n < 3:
        raise ContractError(f"n must be at least 3, got {n}")
    if host.edge_count < n * (n - 1):
        raise ContractError(f"host has {host.edge_count} < n(n-1) = {n * (n - 1)} edges")
    why = _balanced_exceptional(host)
    if why:
        raise ContractError(f"exceptional host: {why}")
    h = host if orientation == PRESERVED else host.transpose()
    mu, mv = _embed_balanced(h, t)
    return Embedding(orientation, tuple(mu), tuple(mv))


def _unbalanced_exceptional(host: BipartiteGraph) -> Optional[str]:
    n, m = host.n, host.m
    dv = sorted(host.degrees(V))
    if all(d == n - 1 for d in dv):
        return "every V vertex has degree n-1"
    if n - m == 1 and dv[0] == 1 and all(d == n for d in dv[1:]):
        return "n-m=1 with one V vertex of degree 1 and the rest of degree n"
    return None


def _unbalanced_ok(host: BipartiteGraph) -> bool:
    n, m = host.n, host.m
    return host.edge_count >= m * (n - 1) and _unbalanced_exceptional(host) is None


def _choose_deletion(host: BipartiteGraph) -> tuple[int, int, str]:
    """Pick (U vertex, full V vertex) to delete, following the four degree cases."""
    n, m = host.n, host.m
    du, dv = host.degrees(U), host.degrees(V)
    us = sorted(range(n), key=lambda i: (du[i], i))
    vs = sorted(range(m), key=lambda j: (dv[j], j))
    v_top = vs[-1]
    if dv[v_top] != n:
        raise ContractError("no V vertex adjacent to all of U")
    u1 = us[0]
    e = host.edge_count
    if du[u1] <= m - 2:
        return u1, v_top, "case 1: min U degree <= m-2"
    if du[u1] == m:
        return u1, v_top, "complete host"
    # du[u1] == m - 1 from here on
    if n > m + 1:
        if dv[vs[-2]] == n:
            return u1, v_top, "case 2: two V vertices of degree n"
        w = vs[-2]
        if dv[w] != n - 1:
            raise ContractError("case 3 guard: second-largest V degree is not n-1")
        missed = [i for i in range(n) if not host.rows[i] >> w & 1]
        return missed[0], v_top, "case 3: second V vertex misses exactly one U vertex"
    # n == m + 1
    if e > m * (n - 1):
        return u1, v_top, "case 4.1: e > m(n-1)"
    v1 = vs[0]
    # case 4.2: U vertices of degree m-1 missing v1 first, then the rest, index order
    cands = [i for i in us if du[i] == m - 1]
    cands.sort(key=lambda i: (host.rows[i] >> v1 & 1, i))
    for i2 in cands:
        reduced, _, _ = host.remove_vertices([i2], [v_top])
        if _unbalanced_ok(reduced):
            return i2, v_top, "case 4.2: e = m(n-1)"
    if (n, m) == (4, 3):
        return -1, v_top, "case 4.2 at (4,3): reduced host is itself a (3,2) tree"
    raise ContractError("case 4.2 guard: every deletion leaves an exceptional host")


def _embed_unbalanced(host: BipartiteGraph, t: BipartiteGraph) -> tuple[list[int], list[int]]:
    n, m = host.n, host.m
    if m == 1:
        if host.rows != ((1,) * n):
            raise ContractError("(n,1) host is not a full star")
        return list(range(n)), [0]
    if m == 2:
        return _embed_two(host, t)
    reduced_tree, y0, x, keep = _peel(t, leaf_side=0)
    u_del, v_del, _ = _choose_deletion(host)
    if u_del < 0:
        u_del, reduced_host, keep_u, keep_v = _match_small_tree(host, v_del, reduced_tree)
        mu, mv = _tree_isomorphism(reduced_host, reduced_tree)
    else:
        reduced_host, keep_u, keep_v = host.remove_vertices([u_del], [v_del])
        if not _unbalanced_ok(reduced_host):
            raise ContractError(f"reduced ({n - 1},{m - 1}) host violates the hypotheses")
        mu, mv = _embed_unbalanced(reduced_host, reduced_tree)
    map_u = [0] * n
    map_v = [0] * m
    for p, orig in enumerate(keep[0]):
        map_u[orig] = keep_u[mu[p]]
    for p, orig in enumerate(keep[1]):
        map_v[orig] = keep_v[mv[p]]
    map_v[x] = v_del
    map_u[y0] = u_del
    return map_u, map_v


def _match_small_tree(host: BipartiteGraph, v_del: int, tree: BipartiteGraph):
    """Pick the degree-(m-1) U vertex whose deletion leaves a (3,2) host shaped exactly like ``tree``."""
    du = host.degrees(U)
    target = tuple(sorted(tree.degrees(V)))
    for i in range(host.n):
        if du[i] != host.m - 1:
            continue
        reduced, keep_u, keep_v = host.remove_vertices([i], [v_del])
        if reduced.edge_count == tree.edge_count and tuple(sorted(reduced.degrees(V))) == target:
            return i, reduced, keep_u, keep_v
    raise ContractError("case 4.2 at (4,3): no deletion matches the reduced tree")


def _tree_isomorphism(host: BipartiteGraph, tree: BipartiteGraph) -> tuple[list[int], list[int]]:
    """Map a (3,2) tree onto a host that is a copy of it: V centres by degree, then U by neighbourhoods."""
    hv, tv = host.degrees(V), tree.degrees(V)
    map_v = [0, 0]
    if tv[0] == tv[1]:
        map_v = [0, 1]
    else:
        big_t = tv.index(max(tv))
        big_h = hv.index(max(hv))
        map_v[big_t], map_v[1 - big_t] = big_h, 1 - big_h
    map_u = []
    used = set()
    for r in tree.rows:
        img = sum(1 << map_v[j] for j in bits(r))
        choices = [i for i in range(host.n) if host.rows[i] == img and i not in used]
        if not choices:
            raise ContractError("reduced (3,2) host is not a copy of the reduced tree")
        used.add(choices[0])
        map_u.append(choices[0])
    return map_u, map_v


def _embed_two(host: BipartiteGraph, t: BipartiteGraph) -> tuple[list[int], list[int]]:
    """(n,2) host with a full V vertex: the smaller star of the tree goes on the other V vertex."""
    n = host.n
    cols = host.cols
    full = next(j for j in (0, 1) if cols[j] == (1 << n) - 1)
    other = 1 - full
    a = min((0, 1), key=lambda j: (popcount(t.cols[j]), j))
    b = 1 - a
    shared = next(bits(t.cols[a] & t.cols[b]))
    nbrs = list(bits(cols[other]))
    if popcount(t.cols[a]) > len(nbrs):
        raise ContractError("(n,2) host: second V vertex has too small a degree")
    map_u = [None] * n
    map_u[shared] = nbrs[0]
    rest_a = [i for i in bits(t.cols[a]) if i != shared]
    for i, h in zip(rest_a, nbrs[1:]):
        map_u[i] = h
    free = [h for h in range(n) if h not in set(x for x in map_u if x is not None)]
    for i in range(n):
        if map_u[i] is None:
            map_u[i] = free.pop(0)
    map_v = [0, 0]
    map_v[a], map_v[b] = other, full
    return map_u, map_v


def constructive_embed_unbalanced(host: BipartiteGraph, t: BipartiteGraph) -> Embedding:
    """Embed a tree of T_{n,m}, n > m, into a host with at least m(n-1) edges outside the two exceptional families."""
    n, m = host.n, host.m
    if t.n != n or t.m != m:
        raise ContractError(f"tree parts ({t.n},{t.m}) differ from host parts ({n},{m})")
    if not n > m >= 1:
        raise ContractError(f"need n > m >= 1, got ({n},{m})")
    if host.edge_count < m * (n - 1):
        raise ContractError(f"host has {host.edge_count} < m(n-1) = {m * (n - 1)} edges")
    why = _unbalanced_exceptional(host)
    if why:
        raise ContractError(f"exceptional host: {why}")
    mu, mv = _embed_unbalanced(host, t)
    return Embedding(PRESERVED, tuple(mu), tuple(mv))

"""Exhaustive extremal search over isomorphism classes, theorem verification,
conjecture exploration and a JSON-lines result cache."""

from __future__ import annotations

import fcntl
import json
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations
from math import ceil, floor
from typing import Iterable, Optional, Sequence

from .bigraph import (
    U,
    V,
    BipartiteGraph,
    bits,
    canonical_form,
    canonical_key,
    graph_from_form,
    graph_from_key,
    popcount,
    serialize_bmat,
    transpose_rows,
)
from .embed import contains_tree_raw, neighbourhood_prune
from .formulas import (
    Unsupported,
    conjecture_value,
    construct_extremal,
    construct_path_extremal,
    construct_s33,
    ex_formula,
    ex_path,
    single_tree_formula,
)
from .treegen import TreeFamily, make_double_star, make_path, tree_family

METHOD_TAG = "bitree-search/1"
MATCH = "Match"
MISMATCH = "Mismatch"
NO_FORMULA = "NoFormula"
GUARD_NOT_MET = "GuardNotMet"

THEOREM_IDS = ("path", "spanning", "k2", "l2", "regular", "t33", "s33", "c2n")


@dataclass(frozen=True)
class SearchBudget:
    max_graphs: int = 50_000_000
    max_duration: float = 6 * 3600.0
    workers: int = 1

    def __post_init__(self):
        if self.max_graphs <= 0 or self.max_duration <= 0 or self.workers <= 0:
            raise ValueError("budget values must be positive")


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, best_bound: int, bound_kind: str, stratum: int):
        super().__init__(message)
        self.best_bound = best_bound
        self.bound_kind = bound_kind
        self.stratum = stratum


@dataclass
class ExtremalRecord:
    n: int
    m: int
    k: int
    l: int
    tree: Optional[str]
    ex_bruteforce: int
    extremal_keys: list[str]
    extremal_keys_swap: Optional[list[str]]
    formula_value: Optional[dict]
    agreement: str
    elapsed: float
    method: str = METHOD_TAG
    direction: str = ""
    examined: int = 0

    def params(self) -> dict:
        return {"n": self.n, "m": self.m, "k": self.k, "l": self.l, "tree": self.tree}

    def as_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExtremalRecord":
        return cls(**d)

    def graphs(self) -> list[BipartiteGraph]:
        return [graph_from_key(k) for k in self.extremal_keys]


# ---------------------------------------------------------------------------
# strata of isomorphism classes


_LEVELS: dict[tuple[int, int], list[list[tuple]]] = {}
_COMPLEMENTS: dict[tuple[int, int, int], list[tuple]] = {}


def _children(n: int, m: int, form: Sequence[int]):
    """Every graph with one more edge; equal rows give isomorphic children, so only the first is extended."""
    full = (1 << m) - 1
    prev = None
    for i, r in enumerate(form):
        if r == prev:
            continue
        prev = r
        for j in bits(full & ~r):
            rows = list(form)
            rows[i] = r | 1 << j
            yield rows


def _levels_upto(n: int, m: int, c: int) -> list[list[tuple]]:
    lv = _LEVELS.setdefault((n, m), [[tuple([0] * n)]])
    while len(lv) <= c:
        nxt = set()
        for f in lv[-1]:
            for rows in _children(n, m, f):
                nxt.add(canonical_form(n, m, rows))
        lv.append(sorted(nxt))
    return lv


def classes_at_level(n: int, m: int, e: int, allow_side_swap: bool = False) -> list[tuple]:
    """Canonical forms of all (n,m) graphs with e edges, one per isomorphism class, sorted.

    The lighter end is enumerated directly; the heavier end by complementing.
    """
    if n < m:
        n, m = m, n
    nm = n * m
    if not 0 <= e <= nm:
        return []
    if e <= nm - e:
        forms = _levels_upto(n, m, e)[e]
    else:
        c = nm - e
        if (n, m, c) not in _COMPLEMENTS:
            full = (1 << m) - 1
            _COMPLEMENTS[(n, m, c)] = sorted(
                {canonical_form(n, m, [full ^ r for r in f]) for f in _levels_upto(n, m, c)[c]}
            )
        forms = _COMPLEMENTS[(n, m, c)]
    if allow_side_swap and n == m:
        forms = sorted({canonical_form(n, m, f, True) for f in forms})
    return list(forms)


# ---------------------------------------------------------------------------
# the containment test


class _Tester:
    """Decides whether a host misses some excluded tree; remembers the last tree that was missing."""

    def __init__(self, trees: Sequence[BipartiteGraph], prune_k: Optional[int] = None):
        self.trees = list(trees)
        self.order = list(range(len(self.trees)))
        self.prune_k = prune_k

    def is_bad(self, n: int, m: int, rows: Sequence[int]) -> bool:
        cols = transpose_rows(n, m, rows)
        if self.prune_k is not None and neighbourhood_prune(rows, cols, self.prune_k):
            return False
        for p, idx in enumerate(self.order):
            if not contains_tree_raw(rows, cols, n, m, self.trees[idx]):
                if p:
                    self.order.insert(0, self.order.pop(p))
                return True
        return False


_WORKER: Optional[_Tester] = None


def _init_worker(tree_rows, prune_k):
    global _WORKER
    _WORKER = _Tester([BipartiteGraph(a, b, r) for a, b, r in tree_rows], prune_k)


def _flags_chunk(args):
    n, m, forms = args
    return [_WORKER.is_bad(n, m, f) for f in forms]


class _Evaluator:
    def __init__(self, tester: _Tester, workers: int):
        self.tester = tester
        self.workers = workers
        self.pool = None
        if workers > 1:
            tree_rows = [(t.n, t.m, t.rows) for t in tester.trees]
            self.pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(tree_rows, tester.prune_k))

    def flags(self, n: int, m: int, forms: list[tuple]) -> list[bool]:
        if self.pool is None or len(forms) < 64:
            return [self.tester.is_bad(n, m, f) for f in forms]
        size = max(16, ceil(len(forms) / (self.workers * 4)))
        chunks = [(n, m, forms[p:p + size]) for p in range(0, len(forms), size)]
        out = []
        for part in self.pool.map(_flags_chunk, chunks):
            out.extend(part)
        return out

    def close(self):
        if self.pool is not None:
            self.pool.shutdown()


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.start = time.monotonic()
        self.examined = 0

    def charge(self, count: int, bound: int, kind: str, stratum: int):
        self.examined += count
        if self.examined > self.budget.max_graphs:
            raise BudgetExceeded(f"graph budget exhausted at stratum {stratum}", bound, kind, stratum)
        if time.monotonic() - self.start > self.budget.max_duration:
            raise BudgetExceeded(f"time budget exhausted at stratum {stratum}", bound, kind, stratum)


def _search_up(n, m, ev: _Evaluator, clock: _Clock):
    """Grow bad classes one edge at a time; the last non-empty stratum is extremal."""
    level = [tuple([0] * n)]
    e = 0
    while e < n * m:
        cands = set()
        for f in level:
            for rows in _children(n, m, f):
                cands.add(canonical_form(n, m, rows))
        cands = sorted(cands)
        clock.charge(len(cands), e, "lower", e + 1)
        flags = ev.flags(n, m, cands)
        nxt = [f for f, b in zip(cands, flags) if b]
        if not nxt:
            break
        level = nxt
        e += 1
    return e, level


def _search_down(n, m, ev: _Evaluator, clock: _Clock):
    """Scan whole strata from n*m downward; the first stratum holding a bad class is extremal."""
    nm = n * m
    for e in range(nm, -1, -1):
        forms = classes_at_level(n, m, e)
        clock.charge(len(forms), e, "upper", e)
        flags = ev.flags(n, m, forms)
        bad = [f for f, b in zip(forms, flags) if b]
        if bad:
            return e, bad
    raise AssertionError("the empty graph always misses a tree")


def _family_params(family) -> tuple[list[BipartiteGraph], int, int, Optional[str], bool]:
    if isinstance(family, TreeFamily):
        return list(family.members), family.k, family.l, None, True
    return [family], family.n, family.m, serialize_bmat(family), False


def ex_bruteforce(
    n: int,
    m: int,
    family,
    budget: Optional[SearchBudget] = None,
    direction: str = "auto",
    prune: bool = True,
) -> ExtremalRecord:
    """Exact ex(n,m;family) and every extremal class; ``family`` is a TreeFamily or one tree."""
    budget = budget or SearchBudget()
    t0 = time.monotonic()
    trees, k, l, tree_txt, is_family = _family_params(family)
    if is_family:
        fv = ex_formula(n, m, k, l)
    else:
        fv = single_tree_formula(n, m, family)
    N, M = max(n, m), min(n, m)
    nm = n * m
    prune_k = max(k, l) if (is_family and min(k, l) == 2 and prune) else None
    tester = _Tester(trees, prune_k)
    clock = _Clock(budget)
    full = (1 << M) - 1
    if tester.is_bad(N, M, (full,) * N):
        ex, forms, used = nm, [(full,) * N], "complete"
    else:
        hint = fv.value if fv is not None and fv.value is not None else None
        if direction == "auto":
            direction = "down" if hint is not None and hint > nm / 2 else "up"
        ev = _Evaluator(tester, budget.workers)
        try:
            if direction == "down":
                ex, forms = _search_down(N, M, ev, clock)
            elif direction == "up":
                ex, forms = _search_up(N, M, ev, clock)
            else:
                raise ValueError(f"unknown direction {direction!r}")
        finally:
            ev.close()
        used = direction
    graphs = [graph_from_form(N, M, f) for f in forms]
    if n < m:
        graphs = [g.transpose() for g in graphs]
    keys = sorted({canonical_key(g).hex() for g in graphs})
    swap = sorted({canonical_key(g, True).hex() for g in graphs}) if n == m else None
    if fv is None or fv.value is None:
        agreement = NO_FORMULA
    else:
        agreement = MATCH if fv.value == ex else MISMATCH
    return ExtremalRecord(
        n, m, k, l, tree_txt, ex, keys, swap,
        fv.as_dict() if fv is not None else None, agreement,
        round(time.monotonic() - t0, 3), METHOD_TAG, used, clock.examined,
    )


def extremal_graphs(n: int, m: int, family, budget: Optional[SearchBudget] = None) -> list[BipartiteGraph]:
    return ex_bruteforce(n, m, family, budget).graphs()


def naive_ex(n: int, m: int, family) -> tuple[int, list[str]]:
    """Reference: labeled scan over edge subsets from the top stratum down, no isomorphism rejection."""
    trees, *_ = _family_params(family)
    tester = _Tester(trees)
    cells = [(i, j) for i in range(n) for j in range(m)]
    for e in range(n * m, -1, -1):
        found = set()
        for chosen in combinations(range(n * m), e):
            rows = [0] * n
            for c in chosen:
                i, j = cells[c]
                rows[i] |= 1 << j
            if tester.is_bad(n, m, rows):
                found.add(canonical_key(BipartiteGraph(n, m, tuple(rows))).hex())
        if found:
            return e, sorted(found)
    raise AssertionError("unreachable")


# ---------------------------------------------------------------------------
# characterizations


def _block_shapes(g: BipartiteGraph) -> Optional[tuple[list[tuple[int, int]], int, int]]:
    """If every component is complete bipartite: (sorted nontrivial (|U|,|V|) sizes, isolated U, isolated V)."""
    shapes, iso_u, iso_v = [], 0, 0
    for cu, cv in g.components():
        a, b = popcount(cu), popcount(cv)
        if b == 0:
            iso_u += a
            continue
        if a == 0:
            iso_v += b
            continue
        if any(g.rows[i] != cv for i in bits(cu)):
            return None
        shapes.append((a, b))
    return sorted(shapes), iso_u, iso_v


def _is_double_star(g: BipartiteGraph) -> bool:
    fu, fv = (1 << g.m) - 1, (1 << g.n) - 1
    return g.edge_count == g.n + g.m - 1 and any(r == fu for r in g.rows) and any(c == fv for c in g.cols)


def _g1_free(g: BipartiteGraph) -> bool:
    """No edge joins two vertices of degree >= 3, i.e. the double star S_{3,3} is absent."""
    du, dv = g.degrees(U), g.degrees(V)
    return not any(du[i] >= 3 and dv[j] >= 3 for i, j in g.edges())


def _bounded(g: BipartiteGraph, k: int) -> bool:
    return all(d <= k - 1 for d in g.degrees(U)) and all(d == k - 1 for d in g.degrees(V))


def _k1_block_star(g: BipartiteGraph, k: int) -> bool:
    """B^{k-1}_{m-1,m-1} plus a star K_{1,n-m+1} centred in V."""
    n, m = g.n, g.m
    for j in range(m):
        s = g.cols[j]
        if popcount(s) != n - m + 1:
            continue
        others = [jj for jj in range(m) if jj != j]
        if any(g.cols[jj] & s for jj in others):
            continue
        rest = [i for i in range(n) if not s >> i & 1]
        if all(popcount(g.rows[i]) == k - 1 for i in rest) and all(popcount(g.cols[jj]) == k - 1 for jj in others):
            return True
    return False


def characterization_predicate(cid: str, n: int, m: int, k: int, l: int, g: BipartiteGraph) -> bool:
    """Is ``g`` in the characterized extremal family for the given id and parameters?"""
    if (g.n, g.m) != (n, m):
        raise ValueError(f"graph parts ({g.n},{g.m}) differ from ({n},{m})")
    if n < m:
        n, m, g = m, n, g.transpose()
    if k < l:
        k, l = l, k
    du, dv = g.degrees(U), g.degrees(V)
    e = g.edge_count
    if cid == "spanning":
        if (k, l) != (n, m):
            raise Unsupported("spanning family needs (k,l) = (n,m)")
        if n == m:
            return all(d == n - 1 for d in du) or all(d == n - 1 for d in dv)
        if n == m + 1:
            return all(d == n - 1 for d in dv) or sorted(dv) == [1] + [n] * (m - 1)
        return all(d == n - 1 for d in dv)
    if cid == "k2":
        if (k, l) != (2, 2) or m < 2:
            raise Unsupported("k2 needs k = l = 2 and m >= 2")
        comps = g.components()
        if e != n + m - 2 or len(comps) != 2:
            return False
        return all(min(popcount(cu), popcount(cv)) <= 1 for cu, cv in comps)
    if cid == "regular":
        if l != 2 or n != m or m < 3 or k < 3 or n < k - 1:
            raise Unsupported("regular needs l = 2, n = m >= max(3, k-1), k >= 3")
        return all(d == k - 1 for d in du) and all(d == k - 1 for d in dv)
    if cid == "l2":
        return _l2_predicate(n, m, k, l, g, du, dv)
    if cid == "t33":
        return _t33_predicate(n, m, k, l, g, du, dv)
    if cid == "s33":
        if m < 5:
            raise Unsupported("s33 needs n, m >= 5")
        if e != 2 * (n + m) - 8:
            return False
        if n == m == 5:
            return _g1_free(g)
        return _block_shapes(g) == (sorted([(2, m - 2), (n - 2, 2)]), 0, 0)
    if cid == "path":
        # with n = m the side-swapped copies are extremal as well
        return _path_predicate(n, m, k, l, g) or (n == m and _path_predicate(n, m, k, l, g.transpose()))
    raise Unsupported(f"unknown characterization id {cid!r}")


def _l2_predicate(n, m, k, l, g, du, dv) -> bool:
    if l != 2 or k < 2 or m < 2 or k > n:
        raise Unsupported("l2 needs l = 2, m >= 2, 2 <= k <= n")
    if k == 2:
        return characterization_predicate("k2", n, m, 2, 2, g)
    c = ceil(k / 2) - 1
    sdv = sorted(dv)
    if m == 2:
        b = floor(3 * k / 2) - 1
        ok = False
        if n >= b:
            ok |= sdv == sorted([n, c])
        if n <= b:
            ok |= sdv == [k - 1, k - 1]
        return ok
    if m <= k:
        odd_extra = m == 3 and k >= 5 and k % 2 == 1
        if n >= 2 * k - 1:
            if _block_shapes(g) == (sorted([(k - 1, m - 1), (n - k + 1, 1)]), 0, 0):
                return True
            if odd_extra and sdv == [c, c, n]:
                return True
            return k == 3 and _is_double_star(g) and m == 3
        if _bounded(g, k):
            return True
        return n == 2 * k - 2 and m == 3 and k % 2 == 1 and sdv == [c, c, 2 * k - 2]
    if n - m >= k - 1:
        return _k1_block_star(g, k) or (k == 3 and _is_double_star(g))
    return _bounded(g, k) or (k == 3 and n == m + 1 and _is_double_star(g))


def _t33_predicate(n, m, k, l, g, du, dv) -> bool:
    if (k, l) != (3, 3):
        raise Unsupported("t33 needs k = l = 3")
    e = g.edge_count
    if m <= 2:
        return e == n * m
    if n == m == 3:
        return all(d == 2 for d in du) or all(d == 2 for d in dv)
    if m == 3 or (m == 4 and n >= 6):
        return all(d == 2 for d in du)
    if (n, m) == (4, 4):
        return e == 9 and _g1_free(g)
    if (n, m) == (5, 4):
        return e == 10 and _g1_free(g)
    return characterization_predicate("s33", n, m, 3, 3, g)


def _path_predicate(n, m, k, l, g) -> bool:
    if k != l or k < 2:
        raise Unsupported("path needs an even path P_{2l}, given as k = l")
    p = l
    shapes = _block_shapes(g)
    if shapes is None:
        return False
    blocks, iso_u, iso_v = shapes
    if m <= p - 1:
        return g.edge_count == n * m
    if m < 2 * (p - 1):
        return blocks == [(n, p - 1)] and iso_u == 0 and iso_v == m - p + 1
    if blocks == sorted([(p - 1, m - p + 1), (n - p + 1, p - 1)]) and iso_u == iso_v == 0:
        return True
    if m == 2 * (p - 1):
        if iso_u == 0 and iso_v == p - 1 and blocks == [(n, p - 1)]:
            return True
        return iso_u == iso_v == 0 and len(blocks) == 2 and all(b == p - 1 for _, b in blocks)
    return False


# ---------------------------------------------------------------------------
# theorem verification


def _span(r, default):
    if r is None:
        return range(default[0], default[1] + 1)
    return range(r[0], r[1] + 1)


def theorem_tuples(cid: str, ranges: Optional[dict] = None) -> list[tuple[int, int, int, int]]:
    """Parameter tuples (n, m, k, l) for an id; ``ranges`` maps n/m/k/l to inclusive (lo, hi)."""
    r = ranges or {}
    out = []
    if cid == "spanning":
        for n in _span(r.get("n"), (1, 9)):
            for m in _span(r.get("m"), (1, 9)):
                if n >= m and (bool(r) or n + m <= 10):
                    out.append((n, m, n, m))
    elif cid in ("l2", "k2"):
        ks = range(2, 3) if cid == "k2" else _span(r.get("k"), (2, 5))
        for n in _span(r.get("n"), (2, 15)):
            for m in _span(r.get("m"), (2, 15)):
                if n >= m and n * m <= 30:
                    out.extend((n, m, k, 2) for k in ks if k >= 2)
    elif cid == "regular":
        for n in _span(r.get("n"), (3, 5)):
            for k in _span(r.get("k"), (3, n + 1)):
                if n >= k - 1:
                    out.append((n, n, k, 2))
    elif cid == "t33":
        for m in _span(r.get("m"), (3, 5)):
            for n in _span(r.get("n"), (m, 5)):
                if n >= m:
                    out.append((n, m, 3, 3))
    elif cid == "s33":
        for m in _span(r.get("m"), (5, 6)):
            for n in _span(r.get("n"), (5, 6)):
                if n >= m:
                    out.append((n, m, 3, 3))
    elif cid == "path":
        for l in _span(r.get("l"), (2, 3)):
            for n in _span(r.get("n"), (2, 6)):
                for m in _span(r.get("m"), (2, 6)):
                    if n >= m and n * m <= 24 and n >= l and m >= l:
                        out.append((n, m, l, l))
    elif cid == "c2n":
        for n in _span(r.get("n"), (2, 4)):
            out.append((n, n, n, n))
    else:
        raise Unsupported(f"unknown theorem id {cid!r}")
    return out


def _excluded(cid: str, n: int, m: int, k: int, l: int):
    if cid == "s33":
        return make_double_star(3, 3)
    if cid == "path":
        return make_path(2 * l)
    return tree_family(k, l)


def _catalog(cid, n, m, k, l):
    try:
        if cid == "s33":
            return construct_s33(n, m)
        if cid == "path":
            return construct_path_extremal(n, m, 2 * l)
        return construct_extremal(n, m, k, l)
    except Unsupported:
        return None


def _check_classes(cid, n, m, k, l, rec: ExtremalRecord, full_scan: bool) -> dict:
    found = set(rec.extremal_keys)
    out = {"extras": [], "omissions": [], "characterized": True, "omissions_checked": full_scan}
    try:
        for key in sorted(found):
            if not characterization_predicate(cid, n, m, k, l, graph_from_key(key)):
                out["extras"].append(key)
        if full_scan:
            N, M = max(n, m), min(n, m)
            for form in classes_at_level(N, M, rec.ex_bruteforce):
                g = graph_from_form(N, M, form)
                if n < m:
                    g = g.transpose()
                key = canonical_key(g).hex()
                if key not in found and characterization_predicate(cid, n, m, k, l, g):
                    out["omissions"].append(key)
        else:
            cat = _catalog(cid, n, m, k, l)
            if cat is not None and cat.value == rec.ex_bruteforce:
                out["omissions"] = [key for key in cat.keys() if key not in found]
    except Unsupported:
        out["characterized"] = False
    return out


def verify_theorem(
    cid: str,
    ranges: Optional[dict] = None,
    budget: Optional[SearchBudget] = None,
    cache: Optional[str] = None,
    check_classes: bool = True,
) -> dict:
    """Brute force against formula and characterization for every tuple; mismatches are report content."""
    if cid == "c2n":
        from .hamilton import verify_c2n_extremal

        rows, mismatches = [], []
        for n, _, _, _ in theorem_tuples(cid, ranges):
            rep = verify_c2n_extremal(n).as_dict()
            rows.append(rep)
            mismatches.extend({"n": n, "violation": v} for v in rep["violations"])
        return {"id": cid, "rows": rows, "mismatches": mismatches, "complete": True}
    rows, mismatches = [], []
    complete_ = True
    for n, m, k, l in theorem_tuples(cid, ranges):
        fam = _excluded(cid, n, m, k, l)
        try:
            rec = cached_bruteforce(n, m, fam, budget, cache)
        except BudgetExceeded as exc:
            complete_ = False
            rows.append({"n": n, "m": m, "k": k, "l": l, "incomplete": str(exc), "bound": exc.best_bound})
            continue
        if cid == "path":
            fv = ex_path(n, m, 2 * l)
        elif cid == "s33":
            fv = single_tree_formula(n, m, fam)
        else:
            fv = ex_formula(n, m, k, l)
        row = {
            "n": n, "m": m, "k": k, "l": l,
            "brute": rec.ex_bruteforce,
            "formula": fv.value if fv else None,
            "case": fv.case_label if fv else None,
            "classes": len(rec.extremal_keys),
        }
        if fv is None or fv.value != rec.ex_bruteforce:
            witness = serialize_bmat(graph_from_key(rec.extremal_keys[0]))
            mismatches.append({**row, "kind": "value", "witness": witness})
        if check_classes:
            chk = _check_classes(cid, n, m, k, l, rec, n * m <= 30)
            row.update(chk)
            for kind in ("extras", "omissions"):
                for key in chk[kind]:
                    mismatches.append({**row, "kind": kind[:-1], "witness": serialize_bmat(graph_from_key(key))})
        rows.append(row)
    return {"id": cid, "rows": rows, "mismatches": mismatches, "complete": complete_}


# ---------------------------------------------------------------------------
# conjecture exploration


def conjecture_tuples(nmax: int, mmax: int, max_product: int = 30) -> list[tuple[int, int, int, int]]:
    out = []
    for n in range(1, nmax + 1):
        for m in range(1, min(n, mmax) + 1):
            if n * m > max_product:
                continue
            for k in range(1, n + 1):
                for l in range(1, min(k, m) + 1):
                    out.append((n, m, k, l))
    return out


def explore_conjecture(
    tuples: Iterable[tuple[int, int, int, int]],
    budget: Optional[SearchBudget] = None,
    cache: Optional[str] = None,
    include_guard_misses: bool = True,
) -> dict:
    """Per tuple: conjectured value against brute force, or GuardNotMet. Reports evidence only."""
    rows = []
    counts = {MATCH: 0, MISMATCH: 0, GUARD_NOT_MET: 0, "Incomplete": 0}
    for n, m, k, l in tuples:
        cv = conjecture_value(n, m, k, l)
        if cv is None:
            counts[GUARD_NOT_MET] += 1
            if include_guard_misses:
                rows.append({"n": n, "m": m, "k": k, "l": l, "status": GUARD_NOT_MET})
            continue
        try:
            rec = cached_bruteforce(n, m, tree_family(k, l), budget, cache)
        except BudgetExceeded as exc:
            counts["Incomplete"] += 1
            rows.append({"n": n, "m": m, "k": k, "l": l, "status": "Incomplete", "bound": exc.best_bound})
            continue
        status = MATCH if rec.ex_bruteforce == cv.value else MISMATCH
        counts[status] += 1
        rows.append({
            "n": n, "m": m, "k": k, "l": l, "status": status, "case": cv.case_label,
            "conjecture": cv.value, "brute": rec.ex_bruteforce,
        })
    return {"rows": rows, "counts": counts}


# ---------------------------------------------------------------------------
# cache


def default_cache_path() -> str:
    return os.environ.get("BITREE_CACHE", "./bitree-cache.jsonl")


def _params_of(n, m, family) -> dict:
    _, k, l, tree_txt, _ = _family_params(family)
    return {"n": n, "m": m, "k": k, "l": l, "tree": tree_txt}


def cache_put(record: ExtremalRecord, path: Optional[str] = None) -> None:
    path = path or default_cache_path()
    line = json.dumps({"method": record.method, "params": record.params(), "record": record.as_dict()}, sort_keys=True)
    with open(path, "a", encoding="utf-8") as fh:
        fcntl.flock(fh, fcntl.LOCK_EX)
        try:
            fh.write(line + "\n")
            fh.flush()
        finally:
            fcntl.flock(fh, fcntl.LOCK_UN)


def cache_records(path: Optional[str] = None) -> list[ExtremalRecord]:
    """Every readable record, in journal order; corrupt lines are skipped with a warning."""
    path = path or default_cache_path()
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append(ExtremalRecord.from_dict(obj["record"]))
            except (ValueError, KeyError, TypeError) as exc:
                warnings.warn(f"{path}:{lineno}: skipping corrupt cache line ({exc})")
    return out


def cache_get(params: dict, path: Optional[str] = None, method: str = METHOD_TAG) -> Optional[ExtremalRecord]:
    path = path or default_cache_path()
    if not os.path.exists(path):
        return None
    want = {"n": params["n"], "m": params["m"], "k": params["k"], "l": params["l"], "tree": params.get("tree")}
    hit = None
    for rec in cache_records(path):
        if rec.method == method and rec.params() == want:
            hit = rec
    return hit


def cached_bruteforce(n, m, family, budget=None, cache: Optional[str] = None) -> ExtremalRecord:
    if cache:
        rec = cache_get(_params_of(n, m, family), cache)
        if rec is not None:
            return rec
    rec = ex_bruteforce(n, m, family, budget)
    if cache:
        cache_put(rec, cache)
    return rec

"""Hamiltonicity of balanced bipartite graphs: a sorted-degree sufficient condition,
exact cycle search, and the extremal check for C_{2n}."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .bigraph import U, V, BipartiteGraph, bits, canonical_key, graph_from_form
from .embed import ContractError

DEFAULT_CAP = 8


class HamiltonSizeError(ValueError):
    pass


@dataclass(frozen=True)
class HamiltonicityVerdict:
    is_hamiltonian: bool
    witness_cycle: Optional[tuple[tuple[str, int], ...]]
    condition_holds: bool


def _balanced(g: BipartiteGraph) -> None:
    if g.n != g.m:
        raise ContractError(f"balanced graph required, got parts ({g.n},{g.m})")
    if g.n < 2:
        raise ContractError("need n >= 2")


def _condition_one_side(du: Sequence[int], dv: Sequence[int]) -> bool:
    n = len(du)
    a, b = sorted(du), sorted(dv)
    for k in range(1, n):
        # 1-based: d(u_k) <= k  =>  d(v_{n-k}) >= n-k+1
        if a[k - 1] <= k and b[n - k - 1] < n - k + 1:
            return False
    return True


def chvatal_condition(g: BipartiteGraph) -> bool:
    """Sorted-degree condition, checked with U first and with V first; both must hold."""
    _balanced(g)
    du, dv = g.degrees(U), g.degrees(V)
    return _condition_one_side(du, dv) and _condition_one_side(dv, du)


def _find_cycle(n: int, rows: Sequence[int], cols: Sequence[int]) -> Optional[list[int]]:
    """Alternating walk u0 v? u? ... returning to u0; returns the visited index list."""
    full = (1 << n) - 1
    path = [0]

    def rec(at_u: bool, cur: int, used_u: int, used_v: int) -> bool:
        if at_u:
            if used_v == full:
                return False
            cand = rows[cur] & ~used_v
            for j in bits(cand):
                path.append(j)
                if rec(False, j, used_u, used_v | 1 << j):
                    return True
                path.pop()
            return False
        if used_u == full:
            # every vertex visited; close through u0
            return bool(cols[cur] & 1)
        cand = cols[cur] & ~used_u
        for i in bits(cand):
            path.append(i)
            if rec(True, i, used_u | 1 << i, used_v):
                return True
            path.pop()
        return False

    if any(r == 0 for r in rows) or any(c == 0 for c in cols):
        return None
    if rec(True, 0, 1, 0):
        return path
    return None


def is_hamiltonian(g: BipartiteGraph, cap: int = DEFAULT_CAP) -> HamiltonicityVerdict:
    _balanced(g)
    if g.n > cap:
        raise HamiltonSizeError(f"n={g.n} exceeds the Hamiltonicity cap of {cap}")
    cond = chvatal_condition(g)
    seq = _find_cycle(g.n, g.rows, g.cols)
    if seq is None:
        return HamiltonicityVerdict(False, None, cond)
    cycle = tuple((U if p % 2 == 0 else V, x) for p, x in enumerate(seq))
    return HamiltonicityVerdict(True, cycle, cond)


def check_cycle(g: BipartiteGraph, cycle: Sequence[tuple[str, int]]) -> bool:
    """Independent witness check: alternating sides, every vertex once, closing edge present."""
    if len(cycle) != g.n + g.m:
        return False
    seen = {(s, x) for s, x in cycle}
    if len(seen) != len(cycle):
        return False
    if seen != {(U, i) for i in range(g.n)} | {(V, j) for j in range(g.m)}:
        return False
    for p in range(len(cycle)):
        (s1, a), (s2, b) = cycle[p], cycle[(p + 1) % len(cycle)]
        if s1 == s2:
            return False
        u, v = (a, b) if s1 == U else (b, a)
        if not g.has_edge(u, v):
            return False
    return True


def pendant_extremal(n: int) -> BipartiteGraph:
    """K_{n,n-1}+e: v_{n-1} is joined only to u_0."""
    rows = [((1 << (n - 1)) - 1)] * n
    rows[0] |= 1 << (n - 1)
    return BipartiteGraph(n, n, tuple(rows))


@dataclass
class C2nReport:
    n: int
    ex: Optional[int]
    extremal_keys: list[str]
    extremal_keys_sided: list[str]
    violations: list[str] = field(default_factory=list)
    strata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "ex": self.ex,
            "extremal_keys": self.extremal_keys,
            "extremal_keys_sided": self.extremal_keys_sided,
            "violations": self.violations,
            "strata": {str(k): v for k, v in sorted(self.strata.items())},
        }


def verify_c2n_extremal(n: int) -> C2nReport:
    """Scan every isomorphism class with at least n^2-n+1 edges, top stratum first."""
    from .search import classes_at_level

    if not 2 <= n <= 6:
        raise ContractError(f"n must be in 2..6, got {n}")
    total = n * n
    target = total - n + 1
    full = (1 << n) - 1
    expected_sided = canonical_key(pendant_extremal(n))
    expected = canonical_key(pendant_extremal(n), allow_side_swap=True)
    violations = []
    ex = None
    sided, swapped = set(), set()
    strata = {}
    for missing in range(0, n):
        e = total - missing
        nonham = 0
        for form in classes_at_level(n, n, missing):
            g = graph_from_form(n, n, tuple(full ^ r for r in form))
            verdict = is_hamiltonian(g)
            if verdict.is_hamiltonian:
                if not check_cycle(g, verdict.witness_cycle):
                    violations.append(f"invalid witness cycle at e={e}: {g.rows}")
                continue
            nonham += 1
            if ex is None:
                ex = e
            if e > target:
                violations.append(f"non-Hamiltonian graph with {e} > n^2-n+1 edges: {g.rows}")
            elif e == target:
                sided.add(canonical_key(g))
                swapped.add(canonical_key(g, allow_side_swap=True))
            if verdict.condition_holds:
                violations.append(f"degree condition holds on a non-Hamiltonian graph: {g.rows}")
        strata[e] = nonham
    if ex is None:
        violations.append(f"no non-Hamiltonian graph with n^2-n+1 = {target} edges")
    elif ex != target:
        violations.append(f"largest non-Hamiltonian stratum is {ex}, expected {target}")
    if swapped and swapped != {expected}:
        violations.append("extremal classes differ from K_{n,n-1}+e up to side swap")
    if sided and not sided <= {expected_sided, canonical_key(pendant_extremal(n).transpose())}:
        violations.append("side-respecting extremal classes are not orientations of K_{n,n-1}+e")
    return C2nReport(n, ex, sorted(k.hex() for k in swapped), sorted(k.hex() for k in sided), violations, strata)

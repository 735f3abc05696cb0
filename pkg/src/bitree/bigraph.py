"""Bipartite graphs with labeled sides, stored as one V-bitmask per U vertex."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence

U = "U"
V = "V"


class GraphError(ValueError):
    """Raised for malformed graph construction or bmat text."""


def popcount(x: int) -> int:
    return bin(x).count("1")


def bits(x: int):
    """Yield the indices of the set bits of ``x`` in increasing order."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def transpose_rows(n: int, m: int, rows: Sequence[int]) -> tuple[int, ...]:
    cols = [0] * m
    for i, r in enumerate(rows):
        b = 1 << i
        for j in bits(r):
            cols[j] |= b
    return tuple(cols)


@dataclass(frozen=True)
class BipartiteGraph:
    """An (n, m)-bipartite graph; bit j of ``rows[i]`` is the edge u_i v_j."""

    n: int
    m: int
    rows: tuple[int, ...]
    _cols: tuple[int, ...] = field(default=None, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise GraphError(f"both sides must be nonempty, got n={self.n}, m={self.m}")
        if len(self.rows) != self.n:
            raise GraphError(f"expected {self.n} rows, got {len(self.rows)}")
        full = (1 << self.m) - 1
        for i, r in enumerate(self.rows):
            if r < 0 or r & ~full:
                raise GraphError(f"row {i} has bits outside 0..{self.m - 1}")
        object.__setattr__(self, "rows", tuple(self.rows))
        object.__setattr__(self, "_cols", transpose_rows(self.n, self.m, self.rows))

    @property
    def cols(self) -> tuple[int, ...]:
        """U-bitmask of each V vertex."""
        return self._cols

    @property
    def edge_count(self) -> int:
        return sum(popcount(r) for r in self.rows)

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u] >> v & 1)

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, r in enumerate(self.rows) for j in bits(r)]

    def degrees(self, side: str) -> list[int]:
        src = self.rows if side == U else self.cols
        return [popcount(x) for x in src]

    def transpose(self) -> "BipartiteGraph":
        return BipartiteGraph(self.m, self.n, self.cols)

    def normalized(self) -> "BipartiteGraph":
        """Return the graph oriented so that n >= m."""
        return self if self.n >= self.m else self.transpose()

    def add_edge(self, u: int, v: int) -> "BipartiteGraph":
        rows = list(self.rows)
        rows[u] |= 1 << v
        return BipartiteGraph(self.n, self.m, tuple(rows))

    def remove_vertices(self, us: Iterable[int] = (), vs: Iterable[int] = ()) -> tuple["BipartiteGraph", list[int], list[int]]:
        """Delete vertices; return the subgraph and the surviving original indices per side."""
        us, vs = set(us), set(vs)
        keep_u = [i for i in range(self.n) if i not in us]
        keep_v = [j for j in range(self.m) if j not in vs]
        rows = []
        for i in keep_u:
            r = self.rows[i]
            rows.append(sum(1 << p for p, j in enumerate(keep_v) if r >> j & 1))
        return BipartiteGraph(len(keep_u), len(keep_v), tuple(rows)), keep_u, keep_v

    def components(self) -> list[tuple[int, int]]:
        """Connected components as (U-mask, V-mask) pairs, isolated vertices included."""
        seen_u = seen_v = 0
        out = []
        for start in range(self.n):
            if seen_u >> start & 1:
                continue
            cu, cv = 1 << start, 0
            frontier_u, frontier_v = cu, 0
            while frontier_u or frontier_v:
                nv = 0
                for i in bits(frontier_u):
                    nv |= self.rows[i]
                nv &= ~cv
                nu = 0
                for j in bits(frontier_v):
                    nu |= self.cols[j]
                nu &= ~cu
                cu |= nu
                cv |= nv
                frontier_u, frontier_v = nu, nv
            seen_u |= cu
            seen_v |= cv
            out.append((cu, cv))
        for j in range(self.m):
            if not seen_v >> j & 1:
                out.append((0, 1 << j))
        return out

    def is_connected(self) -> bool:
        return len(self.components()) == 1

    def __str__(self) -> str:
        return serialize_bmat(self).rstrip("\n")


def new_graph(n: int, m: int, edges: Iterable[tuple[int, int]] = ()) -> BipartiteGraph:
    if n < 1 or m < 1:
        raise GraphError(f"both sides must be nonempty, got n={n}, m={m}")
    rows = [0] * n
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < m):
            raise GraphError(f"edge ({u}, {v}) out of range for an ({n},{m}) graph")
        rows[u] |= 1 << v
    return BipartiteGraph(n, m, tuple(rows))


def complete(n: int, m: int) -> BipartiteGraph:
    return BipartiteGraph(n, m, (((1 << m) - 1),) * n)


def degree_sequence(g: BipartiteGraph, side: str) -> tuple[int, ...]:
    if side not in (U, V):
        raise GraphError(f"side must be 'U' or 'V', got {side!r}")
    return tuple(sorted(g.degrees(side)))


def disjoint_union(*parts: BipartiteGraph) -> BipartiteGraph:
    """Place graphs side by side: U-blocks stacked, V-blocks stacked."""
    rows = []
    offset = 0
    for p in parts:
        rows.extend(r << offset for r in p.rows)
        offset += p.m
    n = sum(p.n for p in parts)
    return BipartiteGraph(n, offset, tuple(rows))


# ---------------------------------------------------------------------------
# canonical forms


def _refine(n: int, m: int, rows: Sequence[int], cols: Sequence[int]) -> tuple[list[int], list[int]]:
    """Colour refinement run separately on each side, with relabelling by sorted signature."""
    cu = [popcount(r) for r in rows]
    cv = [popcount(c) for c in cols]
    ncls = len(set(cu)) + len(set(cv))
    while True:
        su = [(cu[i], tuple(sorted(cv[j] for j in bits(rows[i])))) for i in range(n)]
        sv = [(cv[j], tuple(sorted(cu[i] for i in bits(cols[j])))) for j in range(m)]
        lu = {s: c for c, s in enumerate(sorted(set(su)))}
        lv = {s: c for c, s in enumerate(sorted(set(sv)))}
        cu = [lu[s] for s in su]
        cv = [lv[s] for s in sv]
        k = len(lu) + len(lv)
        if k == ncls:
            return cu, cv
        ncls = k


def _form_permuting_cols(n: int, m: int, rows: Sequence[int]) -> tuple[int, ...]:
    """Minimum over refinement-compatible V orderings of the sorted row tuple."""
    cols = transpose_rows(n, m, rows)
    _, cv = _refine(n, m, rows, cols)
    cells: dict[int, list[int]] = {}
    for j, c in enumerate(cv):
        cells.setdefault(c, []).append(j)
    ordered = [cells[c] for c in sorted(cells)]
    best = None
    # each choice lists the V vertices in their new positions
    for choice in product(*(permutations(cell) for cell in ordered)):
        order = [j for block in choice for j in block]
        new_rows = [0] * n
        for p, j in enumerate(order):
            b = 1 << p
            for i in bits(cols[j]):
                new_rows[i] |= b
        cand = tuple(sorted(new_rows))
        if best is None or cand < best:
            best = cand
    return best


def canonical_form(n: int, m: int, rows: Sequence[int], allow_side_swap: bool = False) -> tuple:
    """Hashable form equal exactly on isomorphism classes.

    The smaller side is the one permuted; when ``allow_side_swap`` and n == m
    the transpose is also considered.
    """
    if n >= m:
        f = _form_permuting_cols(n, m, rows)
    else:
        f = _form_permuting_cols(m, n, transpose_rows(n, m, rows))
    if allow_side_swap and n == m:
        t = _form_permuting_cols(m, n, transpose_rows(n, m, rows))
        f = min(f, t)
    return f


@dataclass(frozen=True, order=True)
class CanonicalKey:
    data: bytes

    def hex(self) -> str:
        return self.data.hex()

    def __str__(self) -> str:
        return self.hex()


def key_from_form(n: int, m: int, form: Sequence[int], allow_side_swap: bool = False) -> CanonicalKey:
    swap = bool(allow_side_swap and n == m)
    nbytes = (min(n, m) + 7) // 8
    head = bytes([n, m, int(swap)])
    body = b"".join(x.to_bytes(nbytes, "big") for x in form)
    return CanonicalKey(head + body)


def canonical_key(g: BipartiteGraph, allow_side_swap: bool = False) -> CanonicalKey:
    form = canonical_form(g.n, g.m, g.rows, allow_side_swap)
    return key_from_form(g.n, g.m, form, allow_side_swap)


def graph_from_form(n: int, m: int, form: Sequence[int]) -> BipartiteGraph:
    """Rebuild a representative graph from a side-respecting canonical form."""
    if n >= m:
        return BipartiteGraph(n, m, tuple(form))
    return BipartiteGraph(m, n, tuple(form)).transpose()


def isomorphic_bruteforce(a: BipartiteGraph, b: BipartiteGraph, allow_side_swap: bool = False) -> bool:
    """Reference check over every pair of side permutations."""
    if allow_side_swap and a.n == a.m and b.n == b.m == a.n:
        if isomorphic_bruteforce(a, b) or isomorphic_bruteforce(a, b.transpose()):
            return True
        return False
    if (a.n, a.m) != (b.n, b.m) or a.edge_count != b.edge_count:
        return False
    target = set(b.edges())
    ea = a.edges()
    for pu in permutations(range(a.n)):
        for pv in permutations(range(a.m)):
            if all((pu[u], pv[v]) in target for u, v in ea):
                return True
    return False


# ---------------------------------------------------------------------------
# bmat text format


def serialize_bmat(g: BipartiteGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    for r in g.rows:
        lines.append("".join("1" if r >> j & 1 else "0" for j in range(g.m)))
    return "\n".join(lines) + "\n"


def parse_bmat(text: str) -> BipartiteGraph:
    lines = text.splitlines()
    if not lines:
        raise GraphError("line 1: missing header")
    head = lines[0].split()
    if len(head) != 2 or not all(h.isdigit() for h in head):
        raise GraphError(f"line 1: malformed header {lines[0]!r}, expected 'n m'")
    n, m = int(head[0]), int(head[1])
    if n < 1 or m < 1:
        raise GraphError(f"line 1: sides must be nonempty, got {n} {m}")
    body = lines[1:]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise GraphError(f"line {len(body) + 2}: expected {n} rows, found {len(body)}")
    rows = []
    for idx, line in enumerate(body, start=2):
        line = line.strip()
        if len(line) != m:
            raise GraphError(f"line {idx}: expected {m} characters, found {len(line)}")
        r = 0
        for j, ch in enumerate(line):
            if ch == "1":
                r |= 1 << j
            elif ch != "0":
                raise GraphError(f"line {idx}: illegal character {ch!r}")
        rows.append(r)
    return BipartiteGraph(n, m, tuple(rows))


def to_dot(g: BipartiteGraph, name: str = "G") -> str:
    """Graphviz text with U on one rank and V on the other."""
    out = [f"graph {name} {{", "  rankdir=LR;"]
    out.append("  { rank=same; " + " ".join(f"u{i};" for i in range(g.n)) + " }")
    out.append("  { rank=same; " + " ".join(f"v{j};" for j in range(g.m)) + " }")
    for u, v in g.edges():
        out.append(f"  u{u} -- v{v};")
    out.append("}")
    return "\n".join(out) + "\n"


def graph_from_key(key: CanonicalKey | str) -> BipartiteGraph:
    """Inverse of ``key_from_form`` for side-respecting keys (a representative graph)."""
    data = bytes.fromhex(key) if isinstance(key, str) else key.data
    n, m = data[0], data[1]
    width = (min(n, m) + 7) // 8
    body = data[3:]
    form = tuple(int.from_bytes(body[p:p + width], "big") for p in range(0, len(body), width))
    return graph_from_form(n, m, form)

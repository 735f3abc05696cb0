"""Independent reference implementations used only by the tests."""

from itertools import permutations, product


def labeled_matrices(n, m):
    """Every (n,m) 0/1 matrix as a tuple of row tuples."""
    for cells in product((0, 1), repeat=n * m):
        yield tuple(tuple(cells[i * m:(i + 1) * m]) for i in range(n))


def orbit_representative(mat, allow_side_swap=False):
    """Lexicographically least image under all row/column permutations (and transpose)."""
    n, m = len(mat), len(mat[0])
    cands = []
    for pr in permutations(range(n)):
        for pc in permutations(range(m)):
            cands.append(tuple(tuple(mat[pr[i]][pc[j]] for j in range(m)) for i in range(n)))
    if allow_side_swap and n == m:
        t = tuple(tuple(mat[i][j] for i in range(n)) for j in range(m))
        cands.append(orbit_representative(t))
    return min(cands)


def orbit_count(n, m, allow_side_swap=False):
    return len({orbit_representative(x, allow_side_swap) for x in labeled_matrices(n, m)})


def prufer_trees(k, l):
    """Edge lists of all labeled trees on k+l vertices whose 2-colouring has parts (k,l)."""
    N = k + l
    out = []
    if N == 2:
        seqs = [()]
    else:
        seqs = product(range(N), repeat=N - 2)
    for seq in seqs:
        degree = [1] * N
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = min(i for i in range(N) if degree[i] == 1)
            edges.append((leaf, x))
            degree[leaf] -= 1
            degree[x] -= 1
        a, b = [i for i in range(N) if degree[i] == 1]
        edges.append((a, b))
        colour = {0: 0}
        adj = {i: [] for i in range(N)}
        for a, b in edges:
            adj[a].append(b)
            adj[b].append(a)
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if y not in colour:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
        side0 = sorted(i for i in range(N) if colour[i] == 0)
        side1 = sorted(i for i in range(N) if colour[i] == 1)
        for us, vs in ((side0, side1), (side1, side0)):
            if len(us) == k and len(vs) == l:
                iu = {x: p for p, x in enumerate(us)}
                iv = {x: p for p, x in enumerate(vs)}
                out.append([(iu[a], iv[b]) if a in iu else (iu[b], iv[a]) for a, b in edges])
                break
    return out


def naive_hamiltonian(n, rows):
    """Try every ordering of U and V on the cycle (n <= 5)."""
    for pv in permutations(range(n)):
        for pu in permutations(range(1, n)):
            us = (0,) + pu
            ok = True
            for p in range(n):
                if not rows[us[p]] >> pv[p] & 1 or not rows[us[(p + 1) % n]] >> pv[p] & 1:
                    ok = False
                    break
            if ok:
                return True
    return False


def _ahu(adj, colour, root, parent):
    kids = sorted(_ahu(adj, colour, c, root) for c in adj[root] if c != parent)
    return f"{'uv'[colour[root]]}({''.join(kids)})"


def ahu_key(N, edges, colour, swap=False):
    """Centre-rooted AHU string of a coloured tree; with swap, the smaller of both colourings."""
    adj = [[] for _ in range(N)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    deg = [len(a) for a in adj]
    layer = [i for i in range(N) if deg[i] <= 1]
    left = N
    while left > 2:
        left -= len(layer)
        nxt = []
        for x in layer:
            for y in adj[x]:
                deg[y] -= 1
                if deg[y] == 1:
                    nxt.append(y)
        layer = nxt
    best = min(_ahu(adj, colour, c, -1) for c in layer)
    if swap:
        flipped = [1 - c for c in colour]
        best = min(best, min(_ahu(adj, flipped, c, -1) for c in layer))
    return best


def prufer_classes(N):
    """{(k,l): set of AHU keys} over every labeled tree on N vertices, via Prüfer decoding."""
    out = {}
    seqs = [()] if N == 2 else product(range(N), repeat=N - 2)
    for seq in seqs:
        degree = [1] * N
        for x in seq:
            degree[x] += 1
        edges = []
        for x in seq:
            leaf = degree.index(1)
            edges.append((leaf, x))
            degree[leaf] = 0
            degree[x] -= 1
        a = degree.index(1)
        b = degree.index(1, a + 1)
        edges.append((a, b))
        adj = [[] for _ in range(N)]
        for p, q in edges:
            adj[p].append(q)
            adj[q].append(p)
        colour = [-1] * N
        colour[0] = 0
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if colour[y] < 0:
                    colour[y] = 1 - colour[x]
                    stack.append(y)
        k = colour.count(0)
        l = N - k
        out.setdefault((k, l), set()).add(ahu_key(N, edges, colour, k == l))
        if k != l:
            flipped = [1 - c for c in colour]
            out.setdefault((l, k), set()).add(ahu_key(N, edges, flipped))
    return out


def tree_ahu(t):
    """AHU key of a BipartiteTree: U vertices 0..k-1, V vertices k..k+l-1."""
    edges = [(u, t.n + v) for u, v in t.edges()]
    colour = [0] * t.n + [1] * t.m
    return ahu_key(t.n + t.m, edges, colour, t.n == t.m)

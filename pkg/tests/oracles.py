"""Slow, independent reference implementations used only by the tests.

None of these call into latinlab kernels; they follow the textbook
definitions directly.
"""

import itertools
import math

import numpy as np


def is_latin(grid) -> bool:
    g = np.asarray(grid)
    k, n = g.shape
    if g.size and (g.min() < 0 or g.max() >= n):
        return False
    rows_ok = all(sorted(row) == list(range(n)) for row in g.tolist())
    cols_ok = all(len(set(g[:, c].tolist())) == k for c in range(n))
    return rows_ok and cols_ok


def quad_scan(grid) -> list:
    """Every (i, j, x, y) with i<j, x<y whose four cells form an intercalate."""
    g = np.asarray(grid).tolist()
    k = len(g)
    n = len(g[0]) if k else 0
    out = []
    for i, j in itertools.combinations(range(k), 2):
        for x, y in itertools.combinations(range(n), 2):
            a, b, c, d = g[i][x], g[i][y], g[j][x], g[j][y]
            if min(a, b, c, d) < 0:
                continue
            if a == d and b == c and a != b:
                out.append((i, j, x, y))
    return out


def quad_count(grid) -> int:
    return len(quad_scan(grid))


def squares_by_permutations(n: int) -> list:
    """All order-n Latin squares, built row by row from itertools.permutations."""
    perms = list(itertools.permutations(range(n)))
    out = []

    def extend(rows):
        if len(rows) == n:
            out.append(tuple(rows))
            return
        for p in perms:
            if all(p[c] != r[c] for r in rows for c in range(n)):
                extend(rows + [p])

    extend([])
    return out


def rectangles_by_permutations(k: int, n: int) -> list:
    perms = list(itertools.permutations(range(n)))
    out = []

    def extend(rows):
        if len(rows) == k:
            out.append(tuple(rows))
            return
        for p in perms:
            if all(p[c] != r[c] for r in rows for c in range(n)):
                extend(rows + [p])

    extend([])
    return out


def permanent(mat) -> int:
    a = np.asarray(mat, dtype=np.int64)
    n = a.shape[0]
    return sum(math.prod(int(a[i, p[i]]) for i in range(n)) for p in itertools.permutations(range(n)))


def triples_of(grid):
    g = np.asarray(grid)
    return {(r, c, int(g[r, c])) for r in range(g.shape[0]) for c in range(g.shape[1]) if g[r, c] >= 0}


def intercalate_triples(grid, quad):
    g = np.asarray(grid)
    i, j, x, y = quad
    return frozenset({(i, x, int(g[i, x])), (i, y, int(g[i, y])), (j, x, int(g[j, x])), (j, y, int(g[j, y]))})


def hyper_quad_scan(triples, n):
    """Intercalates of an arbitrary triple set, straight from the definition."""
    present = set(map(tuple, triples))
    out = set()
    for i, j in itertools.combinations(range(n), 2):
        for x, y in itertools.combinations(range(n), 2):
            for a in range(n):
                for b in range(n):
                    if a == b:
                        continue
                    quad = {(i, x, a), (i, y, b), (j, x, b), (j, y, a)}
                    if quad <= present:
                        out.add(frozenset(quad))
    return out


def shared_pairs(sets) -> int:
    sets = list(sets)
    return sum(1 for p, q in itertools.combinations(sets, 2) if p & q)


def max_disjoint(sets) -> int:
    """Largest pairwise-disjoint subfamily by plain include/exclude recursion."""
    sets = list(sets)

    def best(idx, used):
        if idx == len(sets):
            return 0
        skip = best(idx + 1, used)
        if sets[idx] & used:
            return skip
        return max(skip, 1 + best(idx + 1, used | sets[idx]))

    return best(0, frozenset())


def common_neighbour_deviation(rc, rs, cs, h):
    """Quasirandom deviation by explicit loops over every vertex set A."""
    n = rc.shape[0]
    e = rc.sum() + rs.sum() + cs.sum()
    d = e / (3 * n * n)
    # vertex -> set of neighbours in each part
    parts = {"R": range(n), "C": range(n), "S": range(n)}

    def adj(p, u, q, v):
        key = {("R", "C"): (rc, u, v), ("C", "R"): (rc, v, u), ("R", "S"): (rs, u, v),
               ("S", "R"): (rs, v, u), ("C", "S"): (cs, u, v), ("S", "C"): (cs, v, u)}[(p, q)]
        m, a, b = key
        return bool(m[a, b])

    worst = 0.0
    for target in "RCS":
        others = [(p, v) for p in "RCS" if p != target for v in parts[p]]
        for size in range(1, h + 1):
            for A in itertools.combinations(others, size):
                actual = sum(1 for w in parts[target] if all(adj(p, v, target, w) for p, v in A))
                pred = d**size * n
                if pred == 0:
                    dev = 0.0 if actual == 0 else math.inf
                else:
                    dev = abs(actual / pred - 1)
                worst = max(worst, dev)
    return worst


def greedy_star_matching_reference(edges, r):
    """Literal transcription of the decomposition, with sets and rescans."""
    remaining = list(range(len(edges)))
    parts = []
    while True:
        deg = {}
        for idx in remaining:
            for v in edges[idx]:
                deg[v] = deg.get(v, 0) + 1
        heavy = sorted(v for v, d in deg.items() if d >= r)
        if not heavy:
            break
        v = heavy[0]
        star = [idx for idx in remaining if v in edges[idx]][:r]
        parts.append(("star", tuple(star)))
        remaining = [idx for idx in remaining if idx not in star]
    colour = {}
    for idx in remaining:
        taken = {colour[j] for j in colour if set(edges[j]) & set(edges[idx])}
        c = 0
        while c in taken:
            c += 1
        colour[idx] = c
    for c in sorted(set(colour.values())):
        members = [idx for idx in remaining if colour[idx] == c]
        for s in range(0, len(members), r):
            parts.append(("matching", tuple(members[s : s + r])))
    return parts


def reduced_squares(n: int) -> list:
    """Squares with identity first row and first column, by permutations.

    Each square maps onto exactly one of these by sorting its columns and
    then rows 2..n, so there are n!(n-1)! squares per reduced square, all
    with the same intercalate count.
    """
    perms = [p for p in itertools.permutations(range(n))]
    out = []

    def extend(rows):
        if len(rows) == n:
            out.append(tuple(rows))
            return
        r = len(rows)
        for p in perms:
            if p[0] == r and all(p[c] != q[c] for q in rows for c in range(n)):
                extend(rows + [p])

    extend([tuple(range(n))] if n else [])
    return out


def quad_count_many(grids) -> np.ndarray:
    """quad_count for a stack of grids, vectorised over the stack."""
    g = np.asarray(grids)
    _, k, n = g.shape
    total = np.zeros(len(g), dtype=np.int64)
    for i, j in itertools.combinations(range(k), 2):
        for x, y in itertools.combinations(range(n), 2):
            total += (g[:, i, x] == g[:, j, y]) & (g[:, i, y] == g[:, j, x])
    return total

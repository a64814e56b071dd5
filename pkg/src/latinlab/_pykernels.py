"""Pure-Python kernels.

Reference implementations of everything in ``_ckernels.pyx``. Both modules
consume the bit generator identically, so a seeded run produces the same
output whichever backend is loaded.
"""

import numpy as np

MASK64 = (1 << 64) - 1


def bounded(bitgen, bound):
    """Uniform integer in ``[0, bound)`` from 64-bit raw draws (Lemire)."""
    raw = bitgen.random_raw
    m = raw() * bound
    low = m & MASK64
    if low < bound:
        threshold = ((1 << 64) - bound) % bound
        while low < threshold:
            m = raw() * bound
            low = m & MASK64
    return m >> 64


# ---------------------------------------------------------------------------
# Jacobson-Matthews chain


def _jm_move(cube, n, imp, raw, bnd):
    nn = n * n
    if imp[0] < 0:
        if n == 1:
            return
        r = bnd(n)
        c = bnd(n)
        base = r * nn + c * n
        cur = 0
        while cube[base + cur] != 1:
            cur += 1
        t = bnd(n - 1)
        s = t if t < cur else t + 1
        r1 = 0
        while cube[r1 * nn + c * n + s] != 1:
            r1 += 1
        c1 = 0
        while cube[r * nn + c1 * n + s] != 1:
            c1 += 1
        s1 = cur
    else:
        r, c, s = imp
        rows = [u for u in range(n) if cube[u * nn + c * n + s] == 1]
        cols = [u for u in range(n) if cube[r * nn + u * n + s] == 1]
        syms = [u for u in range(n) if cube[r * nn + c * n + u] == 1]
        r1 = rows[bnd(2)]
        c1 = cols[bnd(2)]
        s1 = syms[bnd(2)]
    cube[r * nn + c * n + s] += 1
    cube[r * nn + c1 * n + s1] += 1
    cube[r1 * nn + c * n + s1] += 1
    cube[r1 * nn + c1 * n + s] += 1
    cube[r * nn + c * n + s1] -= 1
    cube[r * nn + c1 * n + s] -= 1
    cube[r1 * nn + c * n + s] -= 1
    k = r1 * nn + c1 * n + s1
    cube[k] -= 1
    if cube[k] < 0:
        imp[0], imp[1], imp[2] = r1, c1, s1
    else:
        imp[0] = imp[1] = imp[2] = -1


def _extract(cube, n, dest):
    nn = n * n
    for r in range(n):
        for c in range(n):
            base = r * nn + c * n
            s = 0
            while cube[base + s] != 1:
                s += 1
            dest[r, c] = s


def jm_chain(cube, improper, burnin, thin, count, out, emit_first, bitgen):
    """Advance a JM state in place and write ``count`` proper snapshots to ``out``.

    ``burnin`` counts moves; ``thin`` counts proper-state visits between
    snapshots (at least one). With ``emit_first`` the first snapshot is the
    first proper state reached after burn-in.
    """
    n = cube.shape[0]
    flat = cube.reshape(-1).tolist()
    imp = [int(v) for v in improper]

    def bnd(b):
        return bounded(bitgen, b)

    raw = bitgen.random_raw
    for _ in range(burnin):
        _jm_move(flat, n, imp, raw, bnd)
    emitted = 0
    if count > 0 and emit_first:
        while imp[0] >= 0:
            _jm_move(flat, n, imp, raw, bnd)
        _extract(flat, n, out[0])
        emitted = 1
    gap = max(thin, 1)
    while emitted < count:
        visits = 0
        while visits < gap:
            _jm_move(flat, n, imp, raw, bnd)
            if imp[0] < 0:
                visits += 1
        _extract(flat, n, out[emitted])
        emitted += 1
    cube.reshape(-1)[:] = flat
    improper[:] = imp


def jm_moves(cube, improper, moves, bitgen):
    n = cube.shape[0]
    flat = cube.reshape(-1).tolist()
    imp = [int(v) for v in improper]

    def bnd(b):
        return bounded(bitgen, b)

    for _ in range(moves):
        _jm_move(flat, n, imp, bitgen.random_raw, bnd)
    cube.reshape(-1)[:] = flat
    improper[:] = imp


# ---------------------------------------------------------------------------
# intercalate counting


def grid_count(grid):
    """Intercalates of a k x n Latin rectangle via 2-cycles of row-pair permutations."""
    k, n = grid.shape
    if k < 2:
        return 0
    g = np.asarray(grid, dtype=np.int64)
    inv = np.empty_like(g)
    rows = np.arange(k)[:, None]
    inv[rows, g] = np.arange(n)[None, :]
    total = 0
    cols = np.arange(n)
    for j in range(1, k):
        # pi[i, x] = column of row j holding symbol L[i, x]
        pi = inv[j][g[:j]]
        back = np.take_along_axis(pi, pi, axis=1)
        total += int(np.count_nonzero((back == cols) & (pi > cols)))
    return total


def grid_count_many(grids):
    return np.array([grid_count(g) for g in grids], dtype=np.int64)


def partial_intercalates(grid):
    """All intercalates of a partial grid (``-1`` marks empty cells).

    Rows are ``(i, j, x, y, a, b)`` with ``i < j``, ``x < y`` and
    ``a = grid[i, x]``; order is by ``(i, x, y)``.
    """
    k, n = grid.shape
    g = grid.tolist()
    colrow = [[-1] * n for _ in range(n)]
    for r in range(k):
        for c in range(n):
            s = g[r][c]
            if s >= 0:
                colrow[c][s] = r
    out = []
    for i in range(k):
        row = g[i]
        for x in range(n):
            a = row[x]
            if a < 0:
                continue
            cx = colrow[x]
            for y in range(x + 1, n):
                b = row[y]
                if b < 0:
                    continue
                j = cx[b]
                if j > i and g[j][y] == a:
                    out.append((i, j, x, y, a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 6)


def partial_count(grid):
    return int(partial_intercalates(grid).shape[0])


def hyper_intercalates(cube):
    """Intercalates of an arbitrary 3-partite 3-graph given as a 0/1 cube."""
    n = cube.shape[0]
    present = cube.astype(bool)
    entries = [[(int(x), int(a)) for x, a in zip(*np.nonzero(present[i]))] for i in range(n)]
    out = []
    for i in range(n):
        ent = entries[i]
        for p in range(len(ent)):
            x, a = ent[p]
            for q in range(len(ent)):
                y, b = ent[q]
                if y <= x or b == a:
                    continue
                for j in range(i + 1, n):
                    if present[j, x, b] and present[j, y, a]:
                        out.append((i, j, x, y, a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 6)


def order3_count(grid):
    """Order-3 Latin subsquares of a Latin square."""
    n = grid.shape[0]
    g = grid.tolist()
    colrow = [[0] * n for _ in range(n)]
    for r in range(n):
        for c in range(n):
            colrow[c][g[r][c]] = r
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            inv = [0] * n
            for c in range(n):
                inv[g[j][c]] = c
            pi = [inv[g[i][x]] for x in range(n)]
            for x in range(n):
                y = pi[x]
                z = pi[y]
                if y == x or z == x or pi[z] != x or y < x or z < x:
                    continue
                syms = {g[i][x], g[i][y], g[i][z]}
                third = (syms - {g[i][x], g[j][x]}).pop()
                k = colrow[x][third]
                if g[k][y] in syms and g[k][z] in syms:
                    total += 1
    return total // 3


# ---------------------------------------------------------------------------
# permanents and matchings


def permanent01(mat):
    """Permanent of a 0/1 matrix by Ryser's formula over a Gray code."""
    n = mat.shape[0]
    if n == 0:
        return 1
    cols = [[int(mat[i, j]) for i in range(n)] for j in range(n)]
    sums = [0] * n
    inset = [False] * n
    total = 0
    for g in range(1, 1 << n):
        j = (g & -g).bit_length() - 1
        col = cols[j]
        if inset[j]:
            inset[j] = False
            for i in range(n):
                sums[i] -= col[i]
        else:
            inset[j] = True
            for i in range(n):
                sums[i] += col[i]
        prod = 1
        for v in sums:
            if v == 0:
                prod = 0
                break
            prod *= v
        if prod:
            # subset size parity follows the Gray code index parity
            if bin(g ^ (g >> 1)).count("1") & 1:
                total -= prod
            else:
                total += prod
    return -total if n & 1 else total


def _matching_table(avail):
    n = avail.shape[0]
    adj = [[s for s in range(n) if avail[c, s]] for c in range(n)]
    full = (1 << n) - 1
    table = [0] * (1 << n)
    table[full] = 1
    for mask in range(full - 1, -1, -1):
        c = bin(mask).count("1")
        tot = 0
        for s in adj[c]:
            bit = 1 << s
            if not mask & bit:
                tot += table[mask | bit]
        table[mask] = tot
    return adj, table


def count_matchings(avail):
    """Number of perfect matchings (columns to symbols) by subset DP."""
    return _matching_table(avail)[1][0]


def sample_matching(avail, bitgen):
    """Uniform perfect matching of a square 0/1 availability matrix.

    Returns ``row`` with ``row[c]`` the symbol matched to column ``c``, or
    ``None`` if there is no perfect matching.
    """
    n = avail.shape[0]
    adj, table = _matching_table(avail)
    if table[0] == 0:
        return None
    row = np.empty(n, dtype=np.int16)
    mask = 0
    for c in range(n):
        u = bounded(bitgen, table[mask])
        for s in adj[c]:
            bit = 1 << s
            if mask & bit:
                continue
            w = table[mask | bit]
            if u < w:
                row[c] = s
                mask |= bit
                break
            u -= w
    return row


# ---------------------------------------------------------------------------
# triangle removal process


def trp(n, m, bitgen, triples_out, counts_out):
    """Run ``m`` steps of the 3-partite triangle removal process.

    Writes removed triples to ``triples_out`` and the triangle count of the
    current graph before each step (plus the final one) to ``counts_out``.
    Returns the number of completed steps; fewer than ``m`` means the graph
    ran out of triangles.
    """
    total = n * n * n
    tri = list(range(total))
    pos = list(range(total))
    cnt = total
    nn = n * n

    for step in range(m):
        counts_out[step] = cnt
        if cnt == 0:
            return step
        t = tri[bounded(bitgen, cnt)]
        r, rem = divmod(t, nn)
        c, s = divmod(rem, n)
        triples_out[step, 0] = r
        triples_out[step, 1] = c
        triples_out[step, 2] = s
        for u in range(n):
            for tid in (r * nn + c * n + u, r * nn + u * n + s, u * nn + c * n + s):
                p = pos[tid]
                if p < 0:
                    continue
                last = tri[cnt - 1]
                tri[p] = last
                pos[last] = p
                pos[tid] = -1
                cnt -= 1
    counts_out[m] = cnt
    return m


# ---------------------------------------------------------------------------
# backtracking enumeration


def backtrack(k, n, fixed, out):
    """Count k x n Latin rectangles agreeing with ``fixed`` (``-1`` = free).

    Rectangles are visited in lexicographic row-major order; the first
    ``len(out)`` are written to ``out`` when it is not ``None``.
    """
    cells = k * n
    fx = [int(v) for v in np.asarray(fixed).reshape(-1)]
    rowmask = [0] * k
    colmask = [0] * n
    cur = [0] * cells
    cap = 0 if out is None else out.shape[0]
    count = 0

    def rec(idx):
        nonlocal count
        if idx == cells:
            if count < cap:
                out[count] = np.array(cur, dtype=out.dtype).reshape(k, n)
            count += 1
            return
        r, c = divmod(idx, n)
        f = fx[idx]
        cands = range(n) if f < 0 else (f,)
        free = ~(rowmask[r] | colmask[c])
        for s in cands:
            bit = 1 << s
            if free & bit:
                rowmask[r] |= bit
                colmask[c] |= bit
                cur[idx] = s
                rec(idx + 1)
                rowmask[r] ^= bit
                colmask[c] ^= bit

    rec(0)
    return count

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Same contracts and RNG consumption as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.stdint cimport int8_t, int16_t, int32_t, int64_t, uint8_t, uint64_t
from libc.stdlib cimport malloc, free
from numpy.random cimport bitgen_t

cnp.import_array()

cdef extern from *:
    """
    typedef unsigned __int128 lt_u128;
    static inline uint64_t lt_mulhi(uint64_t a, uint64_t b, uint64_t *lo) {
        lt_u128 m = (lt_u128)a * (lt_u128)b;
        *lo = (uint64_t)m;
        return (uint64_t)(m >> 64);
    }
    """
    ctypedef unsigned long long lt_u128
    uint64_t lt_mulhi(uint64_t a, uint64_t b, uint64_t *lo) nogil


cdef inline bitgen_t* _rng(object bitgen) except NULL:
    return <bitgen_t*> PyCapsule_GetPointer(bitgen.capsule, "BitGenerator")


cdef inline uint64_t _bounded(bitgen_t* rng, uint64_t bound) noexcept nogil:
    cdef uint64_t low
    cdef uint64_t hi = lt_mulhi(rng.next_uint64(rng.state), bound, &low)
    cdef uint64_t threshold
    if low < bound:
        threshold = (<uint64_t>0 - bound) % bound
        while low < threshold:
            hi = lt_mulhi(rng.next_uint64(rng.state), bound, &low)
    return hi


def bounded(object bitgen, uint64_t bound):
    cdef bitgen_t* rng = _rng(bitgen)
    with bitgen.lock:
        return _bounded(rng, bound)


# ---------------------------------------------------------------------------
# Jacobson-Matthews chain

cdef void _jm_move(int8_t* cube, int n, int64_t* imp, bitgen_t* rng) noexcept nogil:
    cdef int nn = n * n
    cdef int r, c, s, r1, c1, s1, cur, t, u, k
    cdef int pick[2]
    if imp[0] < 0:
        if n == 1:
            return
        r = <int>_bounded(rng, n)
        c = <int>_bounded(rng, n)
        cur = 0
        while cube[r * nn + c * n + cur] != 1:
            cur += 1
        t = <int>_bounded(rng, n - 1)
        s = t if t < cur else t + 1
        r1 = 0
        while cube[r1 * nn + c * n + s] != 1:
            r1 += 1
        c1 = 0
        while cube[r * nn + c1 * n + s] != 1:
            c1 += 1
        s1 = cur
    else:
        r = <int>imp[0]
        c = <int>imp[1]
        s = <int>imp[2]
        k = 0
        for u in range(n):
            if cube[u * nn + c * n + s] == 1:
                pick[k] = u
                k += 1
        r1 = pick[_bounded(rng, 2)]
        k = 0
        for u in range(n):
            if cube[r * nn + u * n + s] == 1:
                pick[k] = u
                k += 1
        c1 = pick[_bounded(rng, 2)]
        k = 0
        for u in range(n):
            if cube[r * nn + c * n + u] == 1:
                pick[k] = u
                k += 1
        s1 = pick[_bounded(rng, 2)]
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
        imp[0] = r1
        imp[1] = c1
        imp[2] = s1
    else:
        imp[0] = -1
        imp[1] = -1
        imp[2] = -1


cdef void _extract(int8_t* cube, int n, int16_t* dest) noexcept nogil:
    cdef int nn = n * n
    cdef int r, c, s
    for r in range(n):
        for c in range(n):
            s = 0
            while cube[r * nn + c * n + s] != 1:
                s += 1
            dest[r * n + c] = s


def jm_chain(int8_t[:, :, ::1] cube, int64_t[::1] improper, long burnin, long thin,
             long count, int16_t[:, :, ::1] out, bint emit_first, object bitgen):
    cdef int n = cube.shape[0]
    cdef bitgen_t* rng = _rng(bitgen)
    cdef int8_t* cb = &cube[0, 0, 0]
    cdef int64_t* imp = &improper[0]
    cdef long i, emitted = 0, visits, gap = thin if thin > 1 else 1
    cdef int16_t* dst = NULL
    if count > 0:
        dst = &out[0, 0, 0]
    with bitgen.lock:
        with nogil:
            for i in range(burnin):
                _jm_move(cb, n, imp, rng)
            if count > 0 and emit_first:
                while imp[0] >= 0:
                    _jm_move(cb, n, imp, rng)
                _extract(cb, n, dst)
                emitted = 1
            while emitted < count:
                visits = 0
                while visits < gap:
                    _jm_move(cb, n, imp, rng)
                    if imp[0] < 0:
                        visits += 1
                _extract(cb, n, dst + emitted * n * n)
                emitted += 1


def jm_moves(int8_t[:, :, ::1] cube, int64_t[::1] improper, long moves, object bitgen):
    cdef int n = cube.shape[0]
    cdef bitgen_t* rng = _rng(bitgen)
    cdef long i
    with bitgen.lock:
        with nogil:
            for i in range(moves):
                _jm_move(&cube[0, 0, 0], n, &improper[0], rng)


# ---------------------------------------------------------------------------
# intercalate counting

cdef long _grid_count(const int16_t[:, ::1] g, int64_t* inv) noexcept nogil:
    cdef int k = g.shape[0], n = g.shape[1]
    cdef int i, j, x, y
    cdef long total = 0
    for j in range(1, k):
        for x in range(n):
            inv[g[j, x]] = x
        for i in range(j):
            for x in range(n):
                y = <int>inv[g[i, x]]
                if y > x and inv[g[i, y]] == x:
                    total += 1
    return total


def grid_count(const int16_t[:, ::1] grid):
    cdef int n = grid.shape[1]
    cdef int64_t* inv = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    cdef long total
    with nogil:
        total = _grid_count(grid, inv)
    free(inv)
    return total


def grid_count_many(const int16_t[:, :, ::1] grids):
    cdef Py_ssize_t b, nb = grids.shape[0]
    cdef int n = grids.shape[2]
    res = np.zeros(nb, dtype=np.int64)
    cdef int64_t[::1] rv = res
    cdef int64_t* inv = <int64_t*> malloc(max(n, 1) * sizeof(int64_t))
    with nogil:
        for b in range(nb):
            rv[b] = _grid_count(grids[b], inv)
    free(inv)
    return res


def partial_intercalates(const int16_t[:, ::1] grid):
    cdef int k = grid.shape[0], n = grid.shape[1]
    cdef int i, j, x, y, r, c
    cdef int a, b
    cdef cnp.ndarray[int64_t, ndim=2] colrow = np.full((n, n), -1, dtype=np.int64)
    for r in range(k):
        for c in range(n):
            if grid[r, c] >= 0:
                colrow[c, grid[r, c]] = r
    out = []
    for i in range(k):
        for x in range(n):
            a = grid[i, x]
            if a < 0:
                continue
            for y in range(x + 1, n):
                b = grid[i, y]
                if b < 0:
                    continue
                j = <int>colrow[x, b]
                if j > i and grid[j, y] == a:
                    out.append((i, j, x, y, a, b))
    return np.array(out, dtype=np.int64).reshape(-1, 6)


def partial_count(const int16_t[:, ::1] grid):
    cdef int k = grid.shape[0], n = grid.shape[1]
    cdef int i, j, x, y, r, c, a, b
    cdef long total = 0
    cdef int64_t* colrow = <int64_t*> malloc(max(n * n, 1) * sizeof(int64_t))
    with nogil:
        for r in range(n * n):
            colrow[r] = -1
        for r in range(k):
            for c in range(n):
                if grid[r, c] >= 0:
                    colrow[c * n + grid[r, c]] = r
        for i in range(k):
            for x in range(n):
                a = grid[i, x]
                if a < 0:
                    continue
                for y in range(x + 1, n):
                    b = grid[i, y]
                    if b < 0:
                        continue
                    j = <int>colrow[x * n + b]
                    if j > i and grid[j, y] == a:
                        total += 1
    free(colrow)
    return total


def hyper_intercalates(const uint8_t[:, :, ::1] cube):
    cdef int n = cube.shape[0]
    cdef int i, j, x, y, a, b, p, q, cnt
    cdef int* ex = <int*> malloc(max(n * n, 1) * sizeof(int))
    cdef int* es = <int*> malloc(max(n * n, 1) * sizeof(int))
    out = []
    try:
        for i in range(n):
            cnt = 0
            for x in range(n):
                for a in range(n):
                    if cube[i, x, a]:
                        ex[cnt] = x
                        es[cnt] = a
                        cnt += 1
            for p in range(cnt):
                x = ex[p]
                a = es[p]
                for q in range(cnt):
                    y = ex[q]
                    b = es[q]
                    if y <= x or b == a:
                        continue
                    for j in range(i + 1, n):
                        if cube[j, x, b] and cube[j, y, a]:
                            out.append((i, j, x, y, a, b))
    finally:
        free(ex)
        free(es)
    return np.array(out, dtype=np.int64).reshape(-1, 6)


def order3_count(const int16_t[:, ::1] grid):
    cdef int n = grid.shape[0]
    cdef int i, j, x, y, z, c, k, t, ai, aj
    cdef long total = 0
    cdef int* colrow = <int*> malloc(max(n * n, 1) * sizeof(int))
    cdef int* inv = <int*> malloc(max(n, 1) * sizeof(int))
    cdef int* pi = <int*> malloc(max(n, 1) * sizeof(int))
    cdef int s0, s1, s2
    with nogil:
        for k in range(n):
            for c in range(n):
                colrow[c * n + grid[k, c]] = k
        for i in range(n):
            for j in range(i + 1, n):
                for c in range(n):
                    inv[grid[j, c]] = c
                for x in range(n):
                    pi[x] = inv[grid[i, x]]
                for x in range(n):
                    y = pi[x]
                    z = pi[y]
                    if y == x or z == x or pi[z] != x or y < x or z < x:
                        continue
                    s0 = grid[i, x]
                    s1 = grid[i, y]
                    s2 = grid[i, z]
                    aj = grid[j, x]
                    # third symbol of column x among {s0, s1, s2}
                    if s1 != aj:
                        t = s1
                    else:
                        t = s2
                    k = colrow[x * n + t]
                    ai = grid[k, y]
                    if not (ai == s0 or ai == s1 or ai == s2):
                        continue
                    ai = grid[k, z]
                    if ai == s0 or ai == s1 or ai == s2:
                        total += 1
    free(colrow)
    free(inv)
    free(pi)
    return total // 3


# ---------------------------------------------------------------------------
# permanents and matchings

def permanent01(const uint8_t[:, ::1] mat):
    cdef int n = mat.shape[0]
    if n == 0:
        return 1
    if n > 63:
        raise ValueError("matrix too large for Ryser")
    cdef lt_u128 total = 0, prod
    cdef long long* sums = <long long*> malloc(n * sizeof(long long))
    cdef bint* inset = <bint*> malloc(n * sizeof(bint))
    cdef uint64_t g, limit = (<uint64_t>1) << n
    cdef int i, j
    cdef unsigned long long hi, lo
    with nogil:
        for i in range(n):
            sums[i] = 0
            inset[i] = 0
        g = 1
        while g < limit:
            j = 0
            while not ((g >> j) & 1):
                j += 1
            if inset[j]:
                inset[j] = 0
                for i in range(n):
                    sums[i] -= mat[i, j]
            else:
                inset[j] = 1
                for i in range(n):
                    sums[i] += mat[i, j]
            prod = 1
            for i in range(n):
                if sums[i] == 0:
                    prod = 0
                    break
                prod = prod * <lt_u128>sums[i]
            if prod != 0:
                if g & 1:
                    total = total - prod
                else:
                    total = total + prod
            g += 1
        if n & 1:
            total = 0 - total
        hi = <unsigned long long>(total >> 64)
        lo = <unsigned long long>total
    free(sums)
    free(inset)
    return (int(hi) << 64) | int(lo)


cdef uint64_t* _matching_table(const uint8_t[:, ::1] avail) noexcept nogil:
    cdef int n = avail.shape[0]
    cdef uint64_t full = ((<uint64_t>1) << n) - 1
    cdef uint64_t* table = <uint64_t*> malloc((full + 1) * sizeof(uint64_t))
    cdef uint64_t mask, tot, bit
    cdef int c, s
    if table == NULL:
        return NULL
    table[full] = 1
    mask = full
    while mask > 0:
        mask -= 1
        c = 0
        bit = mask
        while bit:
            bit &= bit - 1
            c += 1
        tot = 0
        for s in range(n):
            bit = (<uint64_t>1) << s
            if avail[c, s] and not (mask & bit):
                tot += table[mask | bit]
        table[mask] = tot
    return table


def count_matchings(const uint8_t[:, ::1] avail):
    cdef uint64_t* table
    cdef uint64_t res
    if avail.shape[0] == 0:
        return 1
    with nogil:
        table = _matching_table(avail)
    if table == NULL:
        raise MemoryError()
    res = table[0]
    free(table)
    return res


def sample_matching(const uint8_t[:, ::1] avail, object bitgen):
    cdef int n = avail.shape[0]
    cdef bitgen_t* rng = _rng(bitgen)
    cdef uint64_t* table
    cdef uint64_t mask = 0, u, w, bit
    cdef int c, s
    row = np.empty(n, dtype=np.int16)
    cdef int16_t[::1] rv = row
    if n == 0:
        return row
    with nogil:
        table = _matching_table(avail)
    if table == NULL:
        raise MemoryError()
    if table[0] == 0:
        free(table)
        return None
    with bitgen.lock:
        with nogil:
            for c in range(n):
                u = _bounded(rng, table[mask])
                for s in range(n):
                    bit = (<uint64_t>1) << s
                    if not avail[c, s] or (mask & bit):
                        continue
                    w = table[mask | bit]
                    if u < w:
                        rv[c] = s
                        mask |= bit
                        break
                    u -= w
    free(table)
    return row


# ---------------------------------------------------------------------------
# triangle removal process

def trp(int n, long m, object bitgen, int32_t[:, ::1] triples_out, int64_t[::1] counts_out):
    cdef bitgen_t* rng = _rng(bitgen)
    cdef long total = <long>n * n * n
    cdef long nn = <long>n * n
    cdef int32_t* tri = <int32_t*> malloc(max(total, 1) * sizeof(int32_t))
    cdef int32_t* pos = <int32_t*> malloc(max(total, 1) * sizeof(int32_t))
    cdef long cnt = total, step, t, p, last, tid, rem
    cdef int r, c, s, u, w
    cdef long done = m
    cdef long ids[3]
    if tri == NULL or pos == NULL:
        free(tri)
        free(pos)
        raise MemoryError()
    with bitgen.lock:
        with nogil:
            for t in range(total):
                tri[t] = <int32_t>t
                pos[t] = <int32_t>t
            for step in range(m):
                counts_out[step] = cnt
                if cnt == 0:
                    done = step
                    break
                t = tri[_bounded(rng, cnt)]
                r = <int>(t // nn)
                rem = t % nn
                c = <int>(rem // n)
                s = <int>(rem % n)
                triples_out[step, 0] = r
                triples_out[step, 1] = c
                triples_out[step, 2] = s
                for u in range(n):
                    ids[0] = r * nn + c * n + u
                    ids[1] = r * nn + u * n + s
                    ids[2] = u * nn + c * n + s
                    for w in range(3):
                        tid = ids[w]
                        p = pos[tid]
                        if p < 0:
                            continue
                        last = tri[cnt - 1]
                        tri[p] = <int32_t>last
                        pos[last] = <int32_t>p
                        pos[tid] = -1
                        cnt -= 1
            if done == m:
                counts_out[m] = cnt
    free(tri)
    free(pos)
    return done


# ---------------------------------------------------------------------------
# backtracking enumeration

def backtrack(int k, int n, fixed, out):
    cdef int cells = k * n
    cdef cnp.ndarray[int16_t, ndim=1] fx = np.ascontiguousarray(fixed, dtype=np.int16).reshape(-1)
    cdef long long* rowmask = <long long*> malloc(max(k, 1) * sizeof(long long))
    cdef long long* colmask = <long long*> malloc(max(n, 1) * sizeof(long long))
    cdef int* cur = <int*> malloc(max(cells, 1) * sizeof(int))
    cdef long cap = 0, count = 0
    cdef int idx, r, c, s, f, t
    cdef long long bit
    cdef int16_t[:, :, ::1] ov
    if out is not None:
        ov = out
        cap = out.shape[0]
    for r in range(k):
        rowmask[r] = 0
    for c in range(n):
        colmask[c] = 0
    if cells == 0:
        free(rowmask); free(colmask); free(cur)
        return 1
    # cur[idx] holds the symbol placed at idx, or -1 before the first try
    for idx in range(cells):
        cur[idx] = -1
    idx = 0
    with nogil:
        while idx >= 0:
            r = idx // n
            c = idx % n
            s = cur[idx]
            if s >= 0:
                bit = (<long long>1) << s
                rowmask[r] ^= bit
                colmask[c] ^= bit
            f = fx[idx]
            t = s + 1
            if f >= 0:
                if s >= 0 or ((rowmask[r] | colmask[c]) >> f) & 1:
                    t = n
                else:
                    t = f
            else:
                while t < n and ((rowmask[r] | colmask[c]) >> t) & 1:
                    t += 1
            if t >= n:
                cur[idx] = -1
                idx -= 1
                continue
            bit = (<long long>1) << t
            rowmask[r] |= bit
            colmask[c] |= bit
            cur[idx] = t
            if idx == cells - 1:
                if count < cap:
                    for f in range(cells):
                        ov[count, f // n, f % n] = cur[f]
                count += 1
            else:
                idx += 1
    free(rowmask)
    free(colmask)
    free(cur)
    return count

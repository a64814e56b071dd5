"""Intercalate statistics.

Grids (squares and rectangles) are counted row pair by row pair: two rows
i, j span an intercalate on columns x, y exactly when x <-> y is a 2-cycle
of the permutation sending a column of row i to the column of row j that
holds the same symbol. Partial squares (``TripleSet``) are counted from the
four-cell definition, requiring all four triples to be present.
"""

from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from latinlab._backend import kernels
from latinlab.core import (
    Intercalate,
    LatinError,
    LatinRectangle,
    LatinSquare,
    OrderedTripleSet,
    TripleSet,
    as_partial_grid,
    triple_view,
)

EXACT_LIMIT = 24


class NotAPermutation(LatinError):
    pass


class TooLargeForExact(LatinError):
    pass


class NotAMatching(LatinError):
    pass


class MTooLarge(LatinError):
    pass


class NTooSmall(LatinError):
    pass


@dataclass(frozen=True)
class IntercalateStats:
    N: int
    N2: int
    Nprime: int
    exact: bool

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def _grid(x) -> np.ndarray:
    return np.ascontiguousarray(x.cells, dtype=np.int16)


def _is_grid(x) -> bool:
    return isinstance(x, LatinRectangle)


def row_pair_count(row_a, row_b) -> int:
    """Number of 2-cycles of the permutation relating two rows.

    Rows may be 0-based or 1-based permutations.
    """
    a = np.asarray(row_a, dtype=np.int64)
    b = np.asarray(row_b, dtype=np.int64)
    n = a.shape[0]
    if n == 0:
        return 0
    # accept 1-based rows as written in examples
    if a.min() == 1 and a.max() == n and b.min() == 1 and b.max() == n:
        a, b = a - 1, b - 1
    ref = np.arange(n)
    for row in (a, b):
        if row.shape != (n,) or not np.array_equal(np.sort(row), ref):
            raise NotAPermutation(f"{row.tolist()} is not a permutation of 0..{n - 1}")
    return int(kernels.grid_count(np.stack([a, b]).astype(np.int16)))


def count_intercalates(x) -> int:
    if _is_grid(x):
        return int(kernels.grid_count(_grid(x)))
    return int(kernels.partial_count(as_partial_grid(x)))


def _intercalate_rows(x) -> np.ndarray:
    if _is_grid(x):
        rows = kernels.partial_intercalates(_grid(x))
    else:
        rows = kernels.partial_intercalates(as_partial_grid(x))
    if len(rows):
        rows = rows[np.lexsort((rows[:, 3], rows[:, 2], rows[:, 1], rows[:, 0]))]
    return rows


def enumerate_intercalates(x) -> list[Intercalate]:
    """All intercalates, sorted by (rows, columns)."""
    return [
        Intercalate((i, j), (cx, cy), (a, b))
        for i, j, cx, cy, a, b in _intercalate_rows(x).tolist()
    ]


def _members(inters: list[Intercalate]) -> dict:
    owner = defaultdict(list)
    for idx, it in enumerate(inters):
        for t in it.triples():
            owner[t].append(idx)
    return owner


def intersecting_pairs(inters: list[Intercalate]) -> set[tuple[int, int]]:
    """Index pairs (p < q) of intercalates sharing at least one triple."""
    pairs = set()
    for idxs in _members(inters).values():
        for a in range(len(idxs)):
            for b in range(a + 1, len(idxs)):
                pairs.add((idxs[a], idxs[b]))
    return pairs


def shared_edge_pairs(x) -> int:
    """N2: unordered pairs of distinct intercalates sharing a triple."""
    return len(intersecting_pairs(enumerate_intercalates(x)))


def _adjacency(inters: list[Intercalate]) -> list[int]:
    adj = [0] * len(inters)
    for p, q in intersecting_pairs(inters):
        adj[p] |= 1 << q
        adj[q] |= 1 << p
    return adj


def _greedy_family(adj: list[int]) -> int:
    taken = 0
    blocked = 0
    for v in range(len(adj)):
        if not blocked >> v & 1:
            taken += 1
            blocked |= adj[v] | (1 << v)
    return taken


def _max_independent(adj: list[int]) -> int:
    best = _greedy_family(adj)

    def search(cand: int, size: int):
        nonlocal best
        if cand == 0:
            best = max(best, size)
            return
        if size + bin(cand).count("1") <= best:
            return
        v = (cand & -cand).bit_length() - 1
        search(cand & ~adj[v] & ~(1 << v), size + 1)
        # skipping v only helps if some neighbour of v gets used instead
        if adj[v] & cand:
            search(cand & ~(1 << v), size)

    search((1 << len(adj)) - 1, 0)
    return best


def max_disjoint_family(x, mode: str = "exact") -> int:
    """N': largest family of pairwise triple-disjoint intercalates.

    ``mode="exact"`` searches the intersection graph and refuses more than
    24 intercalates; ``mode="greedy"`` takes intercalates in sorted order.
    """
    inters = x if isinstance(x, list) else enumerate_intercalates(x)
    adj = _adjacency(inters)
    if mode == "greedy":
        return _greedy_family(adj)
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")
    if len(inters) > EXACT_LIMIT:
        raise TooLargeForExact(f"{len(inters)} intercalates exceed the exact limit {EXACT_LIMIT}")
    return _max_independent(adj)


def intercalate_stats(x) -> IntercalateStats:
    inters = enumerate_intercalates(x)
    n2 = len(intersecting_pairs(inters))
    exact = len(inters) <= EXACT_LIMIT
    nprime = max_disjoint_family(inters, "exact" if exact else "greedy")
    return IntercalateStats(len(inters), n2, nprime, exact)


def _triple_set(F) -> set:
    if isinstance(F, (TripleSet, OrderedTripleSet)):
        return set(F.unordered().triples if isinstance(F, OrderedTripleSet) else F.triples)
    return {tuple(int(v) for v in t) for t in F}


def count_through_edges(x, F) -> int:
    """N_F: intercalates of ``x`` using at least one triple of ``F``."""
    f = _triple_set(F)
    if not f:
        return 0
    return sum(1 for it in enumerate_intercalates(x) if any(t in f for t in it.triples()))


def count_good(x, M) -> int:
    """Intercalates through one triple of the matching ``M`` whose other
    row, column and symbol avoid every vertex of ``M``."""
    m = sorted(_triple_set(M))
    rows, cols, syms = set(), set(), set()
    for r, c, s in m:
        if r in rows or c in cols or s in syms:
            raise NotAMatching(f"triple {(r, c, s)} shares a vertex with another triple")
        rows.add(r)
        cols.add(c)
        syms.add(s)
    if not m:
        return 0
    mset = set(m)
    good = 0
    for it in enumerate_intercalates(x):
        (r1, r2), (c1, c2), (a, b) = it.rows, it.cols, it.syms
        for t in it.triples():
            if t not in mset:
                continue
            r, c, s = t
            other_r = r2 if r == r1 else r1
            other_c = c2 if c == c1 else c1
            other_s = b if s == a else a
            if other_r not in rows and other_c not in cols and other_s not in syms:
                good += 1
                break
    return good


def count_order3_subsquares(x: LatinSquare) -> int:
    """Order-3 Latin subsquares (the whole square counts when n = 3)."""
    if not isinstance(x, LatinSquare):
        raise TypeError("a Latin square is required")
    if x.n < 3:
        return 0
    return int(kernels.order3_count(_grid(x)))


def heavy_edge_subset(x, m: int) -> TripleSet:
    """Greedy max-coverage: ``m`` triples of ``x`` covering many intercalates.

    Each step takes the triple that covers the most not-yet-covered
    intercalates, breaking ties by the smallest triple.
    """
    if isinstance(x, LatinRectangle):
        pool = triple_view(x).sorted()
    else:
        pool = sorted(_triple_set(x))
    if m > len(pool):
        raise MTooLarge(f"m={m} exceeds the {len(pool)} available triples")
    if m < 0:
        raise MTooLarge("m must be non-negative")
    inters = enumerate_intercalates(x)
    owner = _members(inters)
    index = {t: i for i, t in enumerate(pool)}
    gain = [len(owner.get(t, ())) for t in pool]
    covered = [False] * len(inters)
    chosen = []
    for _ in range(m):
        best = -1
        best_gain = -1
        for i, g in enumerate(gain):
            if g > best_gain:
                best, best_gain = i, g
        t = pool[best]
        chosen.append(t)
        gain[best] = -1
        for idx in owner.get(t, ()):
            if covered[idx]:
                continue
            covered[idx] = True
            for u in inters[idx].triples():
                j = index.get(u)
                if j is not None and gain[j] > 0:
                    gain[j] -= 1
    return TripleSet(x.n, frozenset(chosen))


def expected_intercalates(n: int) -> float:
    """Intercalate count expected if each triple were present with probability 1/n."""
    if n < 2:
        raise NTooSmall("n must be at least 2")
    return 2 * math.comb(n, 2) ** 3 / n**4


def covered_by(inters: Iterable[Intercalate], triples) -> int:
    f = _triple_set(triples)
    return sum(1 for it in inters if any(t in f for t in it.triples()))

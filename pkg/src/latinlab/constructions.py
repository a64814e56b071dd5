"""Group tables, intercalate-free squares and the upper-tail block size."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from latinlab.core import LatinSquare, SizeGuard

MAX_ORDER = 2**14
SEARCH_LIMIT = 9


@dataclass(frozen=True)
class GroupSpec:
    """``(Z/2Z)^q`` when ``boolean`` is set, else ``Z/mZ`` with ``cyclic = m``."""

    boolean: int | None = None
    cyclic: int | None = None

    def __post_init__(self):
        if (self.boolean is None) == (self.cyclic is None):
            raise ValueError("exactly one of boolean, cyclic must be given")
        if self.boolean is not None and self.boolean < 0:
            raise ValueError("q must be >= 0")
        if self.cyclic is not None and self.cyclic < 1:
            raise ValueError("m must be >= 1")

    @property
    def order(self) -> int:
        return 2**self.boolean if self.boolean is not None else self.cyclic


def group_square(spec: GroupSpec) -> LatinSquare:
    """Cayley table; elements are encoded as the integers 0..order-1
    (bitstrings under XOR, residues under addition)."""
    k = spec.order
    if k > MAX_ORDER:
        raise SizeGuard(f"order {k} exceeds {MAX_ORDER}")
    idx = np.arange(k)
    if spec.boolean is not None:
        table = idx[:, None] ^ idx[None, :]
    else:
        table = (idx[:, None] + idx[None, :]) % k
    return LatinSquare._trusted(table)


def boolean_group_square(q: int) -> LatinSquare:
    return group_square(GroupSpec(boolean=q))


def cyclic_square(m: int) -> LatinSquare:
    return group_square(GroupSpec(cyclic=m))


def boolean_intercalates(q: int) -> int:
    k = 2**q
    return k * math.comb(k, 2) // 2


def search_intercalate_free(n: int) -> LatinSquare | None:
    """An order-n square without intercalates, or ``None`` if none exists.

    Odd orders return the cyclic table. Even orders run a backtracking search
    over reduced squares (first row and column in natural order), which is
    exhaustive: a square is intercalate-free iff its reduced form is.
    """
    if n > SEARCH_LIMIT:
        raise SizeGuard(f"search is limited to n <= {SEARCH_LIMIT}")
    if n < 1:
        raise ValueError("n must be positive")
    if n % 2 == 1:
        return cyclic_square(n)
    grid = _reduced_search(n)
    return None if grid is None else LatinSquare._trusted(grid)


def _reduced_search(n: int):
    grid = [[-1] * n for _ in range(n)]
    colrow = [[-1] * n for _ in range(n)]  # colrow[c][s] = row holding s in column c
    rowmask = [0] * n
    colmask = [0] * n

    def place(r, c, s):
        grid[r][c] = s
        colrow[c][s] = r
        rowmask[r] |= 1 << s
        colmask[c] |= 1 << s

    def unplace(r, c, s):
        grid[r][c] = -1
        colrow[c][s] = -1
        rowmask[r] &= ~(1 << s)
        colmask[c] &= ~(1 << s)

    def closes_intercalate(r, c, s):
        # (r, c) is filled last in row-major order, so the other three cells
        # of any intercalate through it are already present
        row = grid[r]
        for c2 in range(c):
            s2 = row[c2]
            r2 = colrow[c][s2]
            if r2 >= 0 and grid[r2][c2] == s:
                return True
        return False

    for i in range(n):
        place(0, i, i)
        if i:
            place(i, 0, i)

    cells = [(r, c) for r in range(1, n) for c in range(1, n)]

    def rec(idx):
        if idx == len(cells):
            return True
        r, c = cells[idx]
        free = ~(rowmask[r] | colmask[c])
        for s in range(n):
            if free >> s & 1 and not closes_intercalate(r, c, s):
                place(r, c, s)
                if rec(idx + 1):
                    return True
                unplace(r, c, s)
        return False

    return np.array(grid) if rec(0) else None


def choose_k(delta: float, n: int) -> int:
    """Smallest power of two k with k * C(k, 2) / 2 >= (1 + delta) n^2 / 4."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if n < 2:
        raise ValueError("n must be at least 2")
    target = (1 + delta) * n * n / 4
    k = 1
    while k * math.comb(k, 2) / 2 < target:
        k *= 2
    return k

"""Latin squares, Latin rectangles and partial Latin squares.

Everything is stored 0-based. The text and JSON codecs read and write the
1-based form used in print (symbols 1..n).

A partial Latin square is a set of (row, column, symbol) triples in which
any two triples agree in at most one coordinate; a Latin square of order n
is one with n^2 triples.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

SYM_DTYPE = np.int16


class LatinError(ValueError):
    """Base class for rejected inputs."""


class ShapeError(LatinError):
    pass


class SymbolOutOfRange(LatinError):
    def __init__(self, r: int, c: int, value: int):
        self.r, self.c, self.value = r, c, value
        super().__init__(f"symbol {value} at row {r}, column {c} is out of range")


class DuplicateInRow(LatinError):
    def __init__(self, r: int, s: int):
        self.r, self.s = r, s
        super().__init__(f"symbol {s} repeats in row {r}")


class DuplicateInColumn(LatinError):
    def __init__(self, c: int, s: int):
        self.c, self.s = c, s
        super().__init__(f"symbol {s} repeats in column {c}")


class TripleConflict(LatinError):
    def __init__(self, t1, t2):
        self.t1, self.t2 = t1, t2
        super().__init__(f"triples {t1} and {t2} agree in two coordinates")


class IncompleteCover(LatinError):
    pass


class KOutOfRange(LatinError):
    pass


class SizeGuard(LatinError):
    """Requested size is beyond what an exhaustive routine will attempt."""


class ParseError(LatinError):
    def __init__(self, line: int, reason: str):
        self.line, self.reason = line, reason
        super().__init__(f"line {line}: {reason}")


def _scan(cells: np.ndarray, offset: int) -> None:
    """Raise on the first violation in row-major order.

    ``offset`` is added to symbols in error messages so callers can report
    in the form the user supplied.
    """
    k, n = cells.shape
    col_seen = [set() for _ in range(n)]
    for r in range(k):
        row_seen = set()
        for c in range(n):
            s = int(cells[r, c])
            if not 0 <= s < n:
                raise SymbolOutOfRange(r, c, s + offset)
            if s in row_seen:
                raise DuplicateInRow(r, s + offset)
            if s in col_seen[c]:
                raise DuplicateInColumn(c, s + offset)
            row_seen.add(s)
            col_seen[c].add(s)


def _as_cells(grid) -> np.ndarray:
    try:
        arr = np.array(grid, dtype=np.int64)
    except ValueError as exc:
        raise ShapeError("grid is not rectangular") from exc
    if arr.ndim != 2 and arr.size == 0:
        arr = arr.reshape(0, 0)
    if arr.ndim != 2:
        raise ShapeError("grid is not rectangular")
    return arr


@dataclass(frozen=True, eq=False)
class LatinRectangle:
    """A k x n array, every row a permutation of 0..n-1, no column repeats."""

    cells: np.ndarray

    def __post_init__(self):
        cells = _as_cells(self.cells)
        if cells.shape[0] > cells.shape[1]:
            raise ShapeError(f"{cells.shape[0]} rows exceed order {cells.shape[1]}")
        _scan(cells, 0)
        self._freeze(cells)

    def _freeze(self, cells):
        frozen = np.array(cells, dtype=SYM_DTYPE, order="C")
        frozen.flags.writeable = False
        object.__setattr__(self, "cells", frozen)

    @classmethod
    def _trusted(cls, cells):
        """Wrap cells already known to be valid (kernel output)."""
        obj = object.__new__(cls)
        obj._freeze(cells)
        return obj

    @property
    def k(self) -> int:
        return self.cells.shape[0]

    @property
    def n(self) -> int:
        return self.cells.shape[1]

    def rows(self) -> list[list[int]]:
        return self.cells.tolist()

    def to_rectangle(self) -> "LatinRectangle":
        return LatinRectangle._trusted(self.cells)

    def prefix(self, k: int) -> "LatinRectangle":
        if not 0 <= k <= self.k:
            raise KOutOfRange(f"k={k} outside 0..{self.k}")
        return LatinRectangle._trusted(self.cells[:k])

    def __eq__(self, other):
        if not isinstance(other, LatinRectangle):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool(np.array_equal(self.cells, other.cells))

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        body = "/".join(" ".join(str(s + 1) for s in row) for row in self.cells.tolist())
        return f"{type(self).__name__}({self.k}x{self.n}: {body})"


class LatinSquare(LatinRectangle):
    """An n x n Latin square."""

    def __post_init__(self):
        cells = _as_cells(self.cells)
        if cells.shape[0] != cells.shape[1]:
            raise ShapeError(f"square expected, got {cells.shape[0]}x{cells.shape[1]}")
        _scan(cells, 0)
        self._freeze(cells)


Triple = tuple[int, int, int]


def _check_triples(n: int, triples: Iterable[Triple]) -> frozenset:
    seen_rc: dict = {}
    seen_rs: dict = {}
    seen_cs: dict = {}
    out = set()
    for t in triples:
        r, c, s = (int(v) for v in t)
        if not (0 <= r < n and 0 <= c < n and 0 <= s < n):
            raise SymbolOutOfRange(r, c, s)
        t = (r, c, s)
        if t in out:
            continue
        for table, key in ((seen_rc, (r, c)), (seen_rs, (r, s)), (seen_cs, (c, s))):
            if key in table:
                raise TripleConflict(table[key], t)
            table[key] = t
        out.add(t)
    return frozenset(out)


@dataclass(frozen=True)
class TripleSet:
    """A partial Latin square of order ``n`` as a set of 0-based triples."""

    n: int
    triples: frozenset

    def __post_init__(self):
        object.__setattr__(self, "triples", _check_triples(self.n, self.triples))

    def __len__(self):
        return len(self.triples)

    def __iter__(self):
        return iter(sorted(self.triples))

    def __contains__(self, t):
        return tuple(t) in self.triples

    @property
    def m(self) -> int:
        return len(self.triples)

    def to_grid(self) -> np.ndarray:
        """n x n array with -1 at uncovered cells."""
        g = np.full((self.n, self.n), -1, dtype=SYM_DTYPE)
        for r, c, s in self.triples:
            g[r, c] = s
        return g

    def sorted(self) -> list[Triple]:
        return sorted(self.triples)


@dataclass(frozen=True)
class OrderedTripleSet:
    """A partial Latin square together with an ordering of its triples."""

    n: int
    sequence: tuple

    def __post_init__(self):
        seq = tuple(tuple(int(v) for v in t) for t in self.sequence)
        checked = _check_triples(self.n, seq)
        if len(checked) != len(seq):
            raise LatinError("repeated triple in ordered set")
        object.__setattr__(self, "sequence", seq)

    def __len__(self):
        return len(self.sequence)

    def prefix(self, i: int) -> "OrderedTripleSet":
        return OrderedTripleSet(self.n, self.sequence[:i])

    def unordered(self) -> TripleSet:
        return TripleSet(self.n, frozenset(self.sequence))


@dataclass(frozen=True, order=True)
class Intercalate:
    """Rows r1 < r2 and columns c1 < c2 whose four cells hold two symbols.

    ``syms[0]`` sits at (r1, c1) and (r2, c2); ``syms[1]`` at the other two.
    """

    rows: tuple[int, int]
    cols: tuple[int, int]
    syms: tuple[int, int]

    def triples(self) -> tuple[Triple, Triple, Triple, Triple]:
        (r1, r2), (c1, c2), (a, b) = self.rows, self.cols, self.syms
        return ((r1, c1, a), (r1, c2, b), (r2, c1, b), (r2, c2, a))


# ---------------------------------------------------------------------------


def validate(grid, kind: str = "square") -> LatinRectangle:
    """Validate a 1-based grid and return the 0-based object.

    Rejections name the first violation in row-major order; row and column
    indices are 0-based, symbols are reported as supplied.
    """
    arr = _as_cells(grid)
    if kind == "square":
        if arr.shape[0] != arr.shape[1]:
            raise ShapeError(f"square expected, got {arr.shape[0]}x{arr.shape[1]}")
    elif kind == "rectangle":
        if arr.shape[0] > arr.shape[1]:
            raise ShapeError(f"{arr.shape[0]} rows exceed order {arr.shape[1]}")
    else:
        raise ValueError(f"unknown kind {kind!r}")
    _scan(arr - 1, 1)
    cls = LatinSquare if kind == "square" else LatinRectangle
    return cls._trusted(arr - 1)


def triple_view(x: LatinRectangle) -> TripleSet:
    cells = x.cells
    k, n = cells.shape
    trip = frozenset((r, c, int(cells[r, c])) for r in range(k) for c in range(n))
    ts = object.__new__(TripleSet)
    object.__setattr__(ts, "n", n)
    object.__setattr__(ts, "triples", trip)
    return ts


def grid_view(t: TripleSet, kind: str = "square", k: int | None = None) -> LatinRectangle:
    """Inverse of :func:`triple_view`.

    For rectangles the row count is ``k`` (default: one past the largest row
    present). Every cell of the target shape must be covered exactly once.
    """
    n = t.n
    if kind == "square":
        k = n
    elif k is None:
        k = 1 + max((r for r, _, _ in t.triples), default=-1)
    grid = np.full((k, n), -1, dtype=np.int64)
    for r, c, s in t.triples:
        if r >= k:
            raise IncompleteCover(f"triple {(r, c, s)} lies outside the first {k} rows")
        grid[r, c] = s
    missing = np.argwhere(grid < 0)
    if len(missing):
        r, c = missing[0]
        raise IncompleteCover(f"cell ({r}, {c}) is not covered")
    cls = LatinSquare if kind == "square" else LatinRectangle
    return cls._trusted(grid)


def induce_subcube(x: LatinSquare, k: int) -> TripleSet:
    """Triples with row, column and symbol all below ``k``."""
    if not 1 <= k <= x.n:
        raise KOutOfRange(f"k={k} outside 1..{x.n}")
    sub = x.cells[:k, :k]
    rs, cs = np.nonzero(sub < k)
    return TripleSet(x.n, frozenset(zip(rs.tolist(), cs.tolist(), sub[rs, cs].tolist())))


def as_partial_grid(x) -> np.ndarray:
    """Dense n x n view with -1 holes, for rectangles and triple sets alike."""
    if isinstance(x, TripleSet):
        return x.to_grid()
    if isinstance(x, OrderedTripleSet):
        return x.unordered().to_grid()
    if isinstance(x, LatinRectangle):
        g = np.full((x.n, x.n), -1, dtype=SYM_DTYPE)
        g[: x.k] = x.cells
        return g
    raise TypeError(f"unsupported input {type(x).__name__}")


# ---------------------------------------------------------------------------
# codecs

FORMATS = ("grid", "triples", "json")


def encode(x, fmt: str = "grid") -> str:
    if fmt == "grid":
        if isinstance(x, LatinSquare):
            head = f"{x.n}"
        elif isinstance(x, LatinRectangle):
            head = f"{x.k} {x.n}"
        else:
            raise TypeError("grid format needs a square or rectangle")
        lines = [head] + [" ".join(str(s + 1) for s in row) for row in x.cells.tolist()]
        return "\n".join(lines) + "\n"
    if fmt == "triples":
        trip = _triples_of(x)
        lines = [f"{_order_of(x)} {len(trip)}"] + [f"{r + 1} {c + 1} {s + 1}" for r, c, s in trip]
        return "\n".join(lines) + "\n"
    if fmt == "json":
        if isinstance(x, LatinRectangle):
            doc = {"n": x.n, "k": x.k, "cells": (x.cells + 1).tolist()}
        else:
            doc = {"n": _order_of(x), "triples": [[r + 1, c + 1, s + 1] for r, c, s in _triples_of(x)]}
        return json.dumps(doc) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def _order_of(x) -> int:
    return x.n


def _triples_of(x) -> list[Triple]:
    if isinstance(x, OrderedTripleSet):
        return list(x.sequence)
    if isinstance(x, TripleSet):
        return x.sorted()
    return triple_view(x).sorted()


def _ints(line: str, lineno: int) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise ParseError(lineno, f"non-integer token in {line!r}") from None


def decode(text: str, fmt: str = "grid", ordered: bool = False):
    """Parse text produced by :func:`encode` (or written by hand)."""
    if fmt == "json":
        return _decode_json(text, ordered)
    lines = [ln for ln in text.splitlines()]
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise ParseError(1, "empty input")
    head = _ints(lines[0], 1)
    if fmt == "grid":
        if len(head) == 1:
            k = n = head[0]
            kind = "square"
        elif len(head) == 2:
            k, n = head
            kind = "rectangle"
        else:
            raise ParseError(1, "header must be 'n' or 'k n'")
        body = lines[1:]
        if len(body) != k:
            raise ParseError(len(lines), f"expected {k} rows, found {len(body)}")
        rows = []
        for i, line in enumerate(body):
            vals = _ints(line, i + 2)
            if len(vals) != n:
                raise ParseError(i + 2, f"expected {n} symbols, found {len(vals)}")
            rows.append(vals)
        try:
            return validate(np.array(rows, dtype=np.int64).reshape(k, n), kind)
        except (SymbolOutOfRange, DuplicateInRow, DuplicateInColumn) as exc:
            row = exc.r if hasattr(exc, "r") else _first_row_with(rows, exc)
            raise ParseError(row + 2, str(exc)) from exc
    if fmt == "triples":
        if len(head) != 2:
            raise ParseError(1, "header must be 'n m'")
        n, m = head
        body = lines[1:]
        if len(body) != m:
            raise ParseError(len(lines), f"expected {m} triples, found {len(body)}")
        trip = []
        for i, line in enumerate(body):
            vals = _ints(line, i + 2)
            if len(vals) != 3:
                raise ParseError(i + 2, "expected 'r c s'")
            trip.append(tuple(v - 1 for v in vals))
        try:
            if ordered:
                return OrderedTripleSet(n, tuple(trip))
            return TripleSet(n, frozenset(trip))
        except LatinError as exc:
            raise ParseError(1, str(exc)) from exc
    raise ValueError(f"unknown format {fmt!r}")


def _first_row_with(rows, exc) -> int:
    # column duplicates are detected on the later of the two rows
    c, s = exc.c, exc.s
    hits = [r for r, row in enumerate(rows) if row[c] == s]
    return hits[1] if len(hits) > 1 else 0


def _decode_json(text: str, ordered: bool):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg) from None
    if not isinstance(doc, dict) or "n" not in doc:
        raise ParseError(1, "object with key 'n' expected")
    n = doc["n"]
    try:
        if "cells" in doc:
            cells = doc["cells"]
            k = doc.get("k", len(cells))
            if len(cells) != k:
                raise ParseError(1, f"'k' is {k} but {len(cells)} rows given")
            arr = _as_cells(cells) if cells else np.zeros((0, n), dtype=np.int64)
            if arr.shape[1] != n:
                raise ParseError(1, f"rows have {arr.shape[1]} symbols, order is {n}")
            return validate(arr, "square" if k == n else "rectangle")
        if "triples" in doc:
            trip = tuple(tuple(v - 1 for v in t) for t in doc["triples"])
            if ordered:
                return OrderedTripleSet(n, trip)
            return TripleSet(n, frozenset(trip))
    except LatinError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(1, str(exc)) from exc
    raise ParseError(1, "object needs 'cells' or 'triples'")


def square(rows: Sequence[Sequence[int]]) -> LatinSquare:
    """Shorthand for ``validate(rows, "square")`` on 1-based rows."""
    return validate(rows, "square")


def rectangle(rows: Sequence[Sequence[int]]) -> LatinRectangle:
    return validate(rows, "rectangle")

"""Switchings on Latin rectangles: swap two entries within one row.

Analyses focus on intercalates that use the first row. A switching in row
i only changes the row pair (0, i), so its effect on those intercalates is
read off that pair alone.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np

from latinlab.core import LatinError, LatinRectangle


class KTooSmall(LatinError):
    pass


class InvalidSwitching(LatinError):
    pass


@dataclass(frozen=True, order=True)
class Switching:
    row: int
    x: int
    y: int

    def __post_init__(self):
        if not self.x < self.y:
            raise ValueError("columns must satisfy x < y")


def _pair_cycles(top: list, bottom: list) -> set:
    """Column pairs (x, y) forming intercalates between two rows."""
    pos = [0] * len(top)
    for c, s in enumerate(top):
        pos[s] = c
    out = set()
    for x, s in enumerate(bottom):
        y = pos[s]
        if y > x and pos[bottom[y]] == x:
            out.add((x, y))
    return out


def _is_valid(cells: np.ndarray, sw: Switching) -> bool:
    i, x, y = sw.row, sw.x, sw.y
    a, b = cells[i, x], cells[i, y]
    others = np.arange(cells.shape[0]) != i
    return not (np.any(cells[others, x] == b) or np.any(cells[others, y] == a))


def enumerate_switchings(rect: LatinRectangle, restrict_rows: int | None = None) -> list[tuple[Switching, bool]]:
    """Every switching in rows ``i >= max(1, restrict_rows)`` with its validity."""
    if rect.k < 2:
        raise KTooSmall("switchings need at least two rows")
    start = 1 if restrict_rows is None else max(1, restrict_rows)
    cells = rect.cells
    out = []
    for i in range(start, rect.k):
        for x in range(rect.n):
            for y in range(x + 1, rect.n):
                sw = Switching(i, x, y)
                out.append((sw, _is_valid(cells, sw)))
    return out


def apply_switching(rect: LatinRectangle, sw: Switching) -> LatinRectangle:
    if not (0 <= sw.row < rect.k and sw.y < rect.n):
        raise InvalidSwitching(f"{sw} is out of range")
    if not _is_valid(rect.cells, sw):
        raise InvalidSwitching(f"{sw} repeats a symbol in a column")
    cells = rect.cells.copy()
    cells[sw.row, [sw.x, sw.y]] = cells[sw.row, [sw.y, sw.x]]
    return LatinRectangle._trusted(cells)


def first_row_intercalate_count(rect: LatinRectangle) -> int:
    rows = rect.cells.tolist()
    return sum(len(_pair_cycles(rows[0], rows[i])) for i in range(1, rect.k))


@dataclass(frozen=True)
class SwitchingRecord:
    switching: Switching
    valid: bool
    delta: int
    creates: int
    destroys: int


@dataclass(frozen=True)
class SwitchingReport:
    ell: int
    records: tuple

    @property
    def valid(self) -> list[SwitchingRecord]:
        return [r for r in self.records if r.valid]

    @property
    def creating(self) -> int:
        """Valid switchings creating at least one first-row intercalate."""
        return sum(1 for r in self.records if r.valid and r.creates)

    @property
    def destroying(self) -> int:
        return sum(1 for r in self.records if r.valid and r.destroys)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["i", "x", "y", "valid", "delta", "creates", "destroys"])
        for r in self.records:
            s = r.switching
            w.writerow([s.row, s.x, s.y, int(r.valid), r.delta, r.creates, r.destroys])
        return buf.getvalue()


def switching_effect_report(rect: LatinRectangle, restrict_rows: int | None = None) -> SwitchingReport:
    """Change in first-row intercalates for every switching.

    Invalid switchings get zero effects. ``creates`` and ``destroys`` are
    counted independently, so one switching may do both.
    """
    rows = rect.cells.tolist()
    before = {i: _pair_cycles(rows[0], rows[i]) for i in range(1, rect.k)}
    records = []
    for sw, ok in enumerate_switchings(rect, restrict_rows):
        if not ok:
            records.append(SwitchingRecord(sw, False, 0, 0, 0))
            continue
        row = list(rows[sw.row])
        row[sw.x], row[sw.y] = row[sw.y], row[sw.x]
        old = before[sw.row]
        new = _pair_cycles(rows[0], row)
        records.append(SwitchingRecord(sw, True, len(new) - len(old), len(new - old), len(old - new)))
    ell = sum(len(v) for v in before.values())
    return SwitchingReport(ell, tuple(records))


def destroying_switchings(rect: LatinRectangle) -> dict:
    """For each first-row intercalate ``(i, x, y)``, the valid switchings that destroy it."""
    rep = switching_effect_report(rect)
    rows = rect.cells.tolist()
    out = {}
    for i in range(1, rect.k):
        for x, y in _pair_cycles(rows[0], rows[i]):
            out[(i, x, y)] = sum(
                1
                for r in rep.records
                if r.valid and r.switching.row == i and {x, y} & {r.switching.x, r.switching.y}
            )
    return out


def level_sets(rects) -> dict[int, int]:
    """|Q(l)|: how many rectangles have exactly l first-row intercalates."""
    out: dict[int, int] = {}
    for rect in rects:
        ell = first_row_intercalate_count(rect)
        out[ell] = out.get(ell, 0) + 1
    return out

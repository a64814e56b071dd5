"""Split a 3-uniform hypergraph into small stars and small matchings.

While some vertex still has degree >= r, r of its edges are cut off as a
star. What remains has maximum degree < r, so each edge meets fewer than
3(r - 1) others and a greedy proper edge-colouring needs at most
3(r - 1) + 1 colours. Colour classes are matchings; they are chopped into
pieces of at most r edges.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable

from latinlab.core import LatinError


class RNonPositive(LatinError):
    pass


@dataclass(frozen=True)
class Hypergraph3:
    vertices: int
    edges: tuple

    def __post_init__(self):
        seen = set()
        clean = []
        for e in self.edges:
            e = tuple(sorted(int(v) for v in e))
            if len(e) != 3 or len(set(e)) != 3:
                raise ValueError(f"edge {e} does not have three distinct vertices")
            if not all(0 <= v < self.vertices for v in e):
                raise ValueError(f"edge {e} has a vertex outside 0..{self.vertices - 1}")
            if e in seen:
                raise ValueError(f"repeated edge {e}")
            seen.add(e)
            clean.append(e)
        object.__setattr__(self, "edges", tuple(clean))

    @property
    def m(self) -> int:
        return len(self.edges)

    @classmethod
    def from_triples(cls, n: int, triples: Iterable) -> "Hypergraph3":
        """Rows are vertices 0..n-1, columns n..2n-1, symbols 2n..3n-1."""
        return cls(3 * n, tuple((r, n + c, 2 * n + s) for r, c, s in triples))


@dataclass(frozen=True)
class Part:
    kind: str  # "star" or "matching"
    edges: tuple  # indices into the hypergraph's edge list
    colour: int | None = None


def star_matching_partition(h: Hypergraph3, r: int) -> list[Part]:
    if r < 1:
        raise RNonPositive(f"r must be positive, got {r}")
    incident: list[list[int]] = [[] for _ in range(h.vertices)]
    for idx, e in enumerate(h.edges):
        for v in e:
            incident[v].append(idx)
    alive = [True] * h.m
    degree = [len(lst) for lst in incident]
    parts: list[Part] = []

    v = 0
    while v < h.vertices:
        if degree[v] < r:
            v += 1
            continue
        star = [idx for idx in incident[v] if alive[idx]][:r]
        for idx in star:
            alive[idx] = False
            for u in h.edges[idx]:
                degree[u] -= 1
        parts.append(Part("star", tuple(star)))
        # degrees only go down, so lower vertices stay below r
    colour = {}
    used: list[set] = [set() for _ in range(h.vertices)]
    for idx in range(h.m):
        if not alive[idx]:
            continue
        e = h.edges[idx]
        blocked = used[e[0]] | used[e[1]] | used[e[2]]
        c = 0
        while c in blocked:
            c += 1
        colour[idx] = c
        for u in e:
            used[u].add(c)
    classes: dict[int, list[int]] = {}
    for idx, c in colour.items():
        classes.setdefault(c, []).append(idx)
    for c in sorted(classes):
        members = classes[c]
        for start in range(0, len(members), r):
            parts.append(Part("matching", tuple(members[start : start + r]), c))
    return parts


def colours_used(parts: list[Part]) -> int:
    """Colours in the greedy colouring; at most 3(r - 1) + 1."""
    return len({p.colour for p in parts if p.kind == "matching"})


def check_partition(h: Hypergraph3, r: int, parts: list[Part]) -> list[str]:
    """Violated postconditions, as messages; empty when all hold."""
    problems = []
    flat = sorted(i for p in parts for i in p.edges)
    if flat != list(range(h.m)):
        problems.append("parts do not partition the edge set")
    stars = [p for p in parts if p.kind == "star"]
    matchings = [p for p in parts if p.kind == "matching"]
    if len(stars) * r > h.m:
        problems.append(f"{len(stars)} stars exceed m/r")
    if len(matchings) > 3 * r + h.m / r:
        problems.append(f"{len(matchings)} matchings exceed 3r + m/r")
    for p in parts:
        if not 1 <= len(p.edges) <= r:
            problems.append(f"part of size {len(p.edges)}")
        sets = [set(h.edges[i]) for i in p.edges]
        if p.kind == "star" and not set.intersection(*sets):
            problems.append("star without a common vertex")
        if p.kind == "matching":
            for a in range(len(sets)):
                for b in range(a + 1, len(sets)):
                    if sets[a] & sets[b]:
                        problems.append("matching with intersecting edges")
    return problems


def parts_to_json(h: Hypergraph3, parts: list[Part]) -> str:
    return json.dumps(
        {
            "schema": "latinlab/1",
            "m": h.m,
            "parts": [{"kind": p.kind, "edges": [list(h.edges[i]) for i in p.edges]} for p in parts],
        }
    )

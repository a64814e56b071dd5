"""Triangle removal in K_{n,n,n}, the pruned binomial model and quasirandomness.

Vertices of the three parts are rows, columns and symbols; a triangle
(r, c, s) is a triple, and removing it deletes its three edges.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from latinlab._backend import kernels
from latinlab.core import LatinError, OrderedTripleSet, TripleSet
from latinlab.sampling import _bitgen

EXACT_H = 2
MAX_H = 3


class HTooLarge(LatinError):
    pass


@dataclass(frozen=True, eq=False)
class TripartiteGraph:
    """Subgraph of K_{n,n,n} stored as three boolean bipartite adjacencies.

    ``rc[r, c]``, ``rs[r, s]`` and ``cs[c, s]`` mark the present edges.
    """

    rc: np.ndarray
    rs: np.ndarray
    cs: np.ndarray

    def __post_init__(self):
        n = self.rc.shape[0]
        for name in ("rc", "rs", "cs"):
            a = np.array(getattr(self, name), dtype=bool)
            if a.shape != (n, n):
                raise ValueError(f"{name} must be {n} x {n}")
            a.flags.writeable = False
            object.__setattr__(self, name, a)

    @property
    def n(self) -> int:
        return self.rc.shape[0]

    @classmethod
    def complete(cls, n: int) -> "TripartiteGraph":
        full = np.ones((n, n), dtype=bool)
        return cls(full, full, full)

    @classmethod
    def from_partial(cls, p) -> "TripartiteGraph":
        """G(P): the edges of K_{n,n,n} not covered by a triple of ``p``."""
        n = p.n
        rc, rs, cs = (np.ones((n, n), dtype=bool) for _ in range(3))
        trip = _as_array(p)
        if len(trip):
            r, c, s = trip.T
            rc[r, c] = False
            rs[r, s] = False
            cs[c, s] = False
        return cls(rc, rs, cs)

    def edge_count(self) -> int:
        return int(self.rc.sum() + self.rs.sum() + self.cs.sum())

    def density(self) -> float:
        return self.edge_count() / (3 * self.n**2) if self.n else 0.0

    def triangle_count(self) -> int:
        rc = self.rc.astype(np.int64)
        # sum over (r, c) edges of the symbols adjacent to both
        return int(np.sum(rc * (self.rs.astype(np.int64) @ self.cs.T.astype(np.int64))))

    def __eq__(self, other):
        if not isinstance(other, TripartiteGraph):
            return NotImplemented
        return all(np.array_equal(getattr(self, k), getattr(other, k)) for k in ("rc", "rs", "cs"))

    __hash__ = None


def _as_array(p) -> np.ndarray:
    if isinstance(p, OrderedTripleSet):
        seq = p.sequence
    elif isinstance(p, TripleSet):
        seq = p.sorted()
    else:
        seq = p
    return np.asarray(seq, dtype=np.int64).reshape(-1, 3)


# ---------------------------------------------------------------------------
# the removal process


@dataclass(frozen=True)
class TrpTrace:
    """Per-step record of one run: removed triples and triangle counts.

    ``triangle_counts[i]`` is the number of triangles in G(P_i), the graph
    left after ``i`` removals.
    """

    n: int
    triples: np.ndarray
    triangle_counts: np.ndarray

    def __len__(self):
        return len(self.triples)

    def graphs(self) -> Iterator[TripartiteGraph]:
        """G(P_0), G(P_1), ... one graph per prefix."""
        n = self.n
        rc, rs, cs = (np.ones((n, n), dtype=bool) for _ in range(3))
        yield TripartiteGraph(rc, rs, cs)
        for r, c, s in self.triples.tolist():
            rc[r, c] = rs[r, s] = cs[c, s] = False
            yield TripartiteGraph(rc, rs, cs)

    def to_csv(self, h: int | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "edges", "triangles", "deviation"])
        for i, g in enumerate(self.graphs()):
            dev = "" if h is None else repr(quasirandom_deviation(g, h))
            tri = int(self.triangle_counts[i]) if i < len(self.triangle_counts) else g.triangle_count()
            w.writerow([i, 3 * self.n**2 - 3 * i, tri, dev])
        return buf.getvalue()


@dataclass(frozen=True)
class TrpOutcome:
    """Either ``m`` removed triangles in order, or the star outcome.

    ``steps`` is the number of removals performed; ``trace`` is present only
    when requested.
    """

    n: int
    m: int
    partial: OrderedTripleSet | None
    steps: int
    trace: TrpTrace | None = field(default=None, compare=False)

    @property
    def is_star(self) -> bool:
        return self.partial is None

    def __str__(self):
        return "*" if self.is_star else f"TrpOutcome(n={self.n}, m={self.m})"


STAR = "*"


def trp_run(n: int, m: int, rng, record_trace: bool = False) -> TrpOutcome:
    """Remove ``m`` uniformly random triangles one at a time from K_{n,n,n}."""
    if not 0 <= m <= n * n:
        raise ValueError(f"need 0 <= m <= n^2, got m={m}")
    triples = np.empty((m, 3), dtype=np.int32)
    counts = np.zeros(m + 1, dtype=np.int64)
    steps = int(kernels.trp(n, m, _bitgen(rng), triples, counts))
    trace = None
    if record_trace:
        trace = TrpTrace(n, triples[:steps].astype(np.int64), counts[: steps + 1].copy())
    partial = OrderedTripleSet(n, triples.tolist()) if steps == m else None
    return TrpOutcome(n, m, partial, steps, trace)


# ---------------------------------------------------------------------------
# binomial 3-graph and G*


def sample_binomial_hypergraph(n: int, p: float, rng) -> np.ndarray:
    """Each of the n^3 triples independently with probability ``p``.

    Returned as a sorted ``(k, 3)`` int64 array.
    """
    if not 0 <= p <= 1:
        raise ValueError("p must lie in [0, 1]")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.Generator(_bitgen(rng))
    total = n**3
    k = int(gen.binomial(total, p)) if total else 0
    ids = np.sort(gen.choice(total, size=k, replace=False)) if k else np.zeros(0, dtype=np.int64)
    return np.stack(np.unravel_index(ids, (n, n, n)), axis=1).astype(np.int64).reshape(-1, 3)


def _conflict_free_mask(trip: np.ndarray, n: int) -> np.ndarray:
    keep = np.ones(len(trip), dtype=bool)
    for a, b in ((0, 1), (0, 2), (1, 2)):
        key = trip[:, a] * n + trip[:, b]
        _, inv, cnt = np.unique(key, return_inverse=True, return_counts=True)
        keep &= cnt[inv] == 1
    return keep


def prune_conflicts(triples, n: int | None = None) -> TripleSet:
    """Drop, all at once, every triple agreeing with another in two coordinates."""
    trip = _as_array(triples)
    if n is None:
        n = getattr(triples, "n", None)
    if n is None:
        n = int(trip.max()) + 1 if len(trip) else 0
    if not len(trip):
        return TripleSet(n, frozenset())
    kept = trip[_conflict_free_mask(trip, n)]
    return TripleSet(n, frozenset(map(tuple, kept.tolist())))


def hypergraph_intercalates(triples, n: int) -> np.ndarray:
    """Intercalates of an arbitrary triple set, rows ``(i, j, x, y, a, b)``."""
    cube = np.zeros((n, n, n), dtype=np.uint8)
    trip = _as_array(triples)
    if len(trip):
        cube[trip[:, 0], trip[:, 1], trip[:, 2]] = 1
    return kernels.hyper_intercalates(cube)


def intercalate_total(n: int) -> int:
    """Intercalates of K_{n,n,n}: 2 C(n,2)^3."""
    return 2 * math.comb(n, 2) ** 3


def expected_gstar_intercalates(n: int, alpha: float) -> float:
    """E N(G*) with p = alpha / n."""
    p = alpha / n
    return intercalate_total(n) * p**4 * (1 - p) ** (12 * (n - 1) - 8)


def asymptotic_gstar_intercalates(n: int, alpha: float) -> float:
    return math.exp(-12 * alpha) * alpha**4 * n**2 / 4


def shared_pair_counts(n: int) -> tuple[int, int]:
    """Unordered pairs of distinct intercalates of K_{n,n,n} sharing exactly
    two, resp. exactly one, triple."""
    t = intercalate_total(n)
    return 3 * t * (n - 2), 2 * t * ((n - 1) ** 3 - 3 * n + 5)


def expected_shared_pairs(n: int, alpha: float) -> float:
    """E N2 in the binomial 3-graph with p = alpha / n (exact)."""
    p = alpha / n
    two, one = shared_pair_counts(n)
    return two * p**6 + one * p**7


# ---------------------------------------------------------------------------
# quasirandomness


def _oriented(g: TripartiteGraph):
    """For each part, its adjacencies to the other two parts (part as rows)."""
    return (
        (g.rc, g.rs),
        (g.rc.T, g.cs),
        (g.rs.T, g.cs.T),
    )


def _dev(actual: np.ndarray, predicted: float) -> float:
    if actual.size == 0:
        return 0.0
    if predicted == 0:
        return math.inf if np.any(actual > 0) else 0.0
    return float(np.max(np.abs(actual / predicted - 1.0)))


def quasirandom_deviation(g: TripartiteGraph, h: int, rng=None, samples: int = 20000) -> float:
    """Smallest eps for which ``g`` is (eps, h)-quasirandom.

    Exhaustive for h <= 2. For h = 3 the triples of vertices are sampled
    (``samples`` per part), so the value is a lower estimate.
    """
    if h < 0:
        raise ValueError("h must be non-negative")
    if h > MAX_H:
        raise HTooLarge(f"h={h} exceeds {MAX_H}")
    n = g.n
    if h == 0 or n == 0:
        return 0.0
    d = g.density()
    worst = 0.0
    for part, (m1, m2) in enumerate(_oriented(g)):
        a1 = m1.astype(np.int64)
        a2 = m2.astype(np.int64)
        worst = max(worst, _dev(np.concatenate([a1.sum(0), a2.sum(0)]), d * n))
        if h >= 2:
            pred = d * d * n
            off = ~np.eye(n, dtype=bool)
            for block in ((a1.T @ a1)[off], (a2.T @ a2)[off], (a1.T @ a2).ravel()):
                worst = max(worst, _dev(block, pred))
        if h >= 3:
            if rng is None:
                raise ValueError("h = 3 needs an rng for sampling")
            gen = rng if isinstance(rng, np.random.Generator) else np.random.Generator(_bitgen(rng))
            both = np.concatenate([m1, m2], axis=1)
            picks = np.array([gen.choice(2 * n, 3, replace=False) for _ in range(samples)])
            common = np.logical_and.reduce(both[:, picks], axis=2).sum(axis=0)
            worst = max(worst, _dev(common, d**3 * n))
    return worst


def trace_quasirandomness(trace: TrpTrace | TrpOutcome, h: int, **kwargs) -> float:
    """Maximum of :func:`quasirandom_deviation` over all prefixes of a run."""
    if isinstance(trace, TrpOutcome):
        if trace.trace is None:
            raise ValueError("run was not recorded; pass record_trace=True")
        trace = trace.trace
    return max(quasirandom_deviation(g, h, **kwargs) for g in trace.graphs())

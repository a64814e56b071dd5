"""Seeded Monte Carlo experiments and their reports.

Every experiment is split into fixed-size chunks; chunk j draws from RNG
stream j of the master seed, so the result is the same whatever the number
of worker processes.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import binomtest

from latinlab import counting
from latinlab._backend import kernels
from latinlab.core import LatinError, LatinSquare, SizeGuard
from latinlab.sampling import jm_sample_array, make_rng, square_array, stream_rngs
from latinlab.trp import (
    asymptotic_gstar_intercalates,
    expected_gstar_intercalates,
    expected_shared_pairs,
    hypergraph_intercalates,
    prune_conflicts,
    sample_binomial_hypergraph,
)

SCHEMA = "latinlab/1"
CHUNK = 250
EXHAUSTIVE_LIMIT = 5
INHERITANCE_EXACT_LIMIT = 2_000_000


class InvalidParams(LatinError):
    pass


class InvalidAlpha(LatinError):
    pass


@dataclass(frozen=True)
class FreedmanParams:
    K: float
    N: int
    p: float
    t: float

    def __post_init__(self):
        if not self.K > 0:
            raise InvalidParams("K must be positive")
        if self.N < 1:
            raise InvalidParams("N must be at least 1")
        if not 0 <= self.p <= 1:
            raise InvalidParams("p must lie in [0, 1]")
        if self.t < 0:
            raise InvalidParams("t must be non-negative")


def freedman_bound(params: FreedmanParams) -> float:
    """exp(-t^2 / (4 K^2 N p + 2 K t)) for a K-Lipschitz function of N
    independent p-coins."""
    k, t = params.K, params.t
    if t == 0:
        return 1.0
    return math.exp(-(t * t) / (4 * k * k * params.N * params.p + 2 * k * t))


@dataclass
class ExperimentReport:
    config: dict
    histogram: dict
    mean: float
    variance: float
    se: float
    tails: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    @property
    def samples(self) -> int:
        return sum(self.histogram.values())

    @classmethod
    def from_values(cls, config: dict, values) -> "ExperimentReport":
        vals = np.asarray(values, dtype=np.int64)
        keys, counts = np.unique(vals, return_counts=True)
        hist = {int(k): int(c) for k, c in zip(keys, counts)}
        return cls.from_histogram(config, hist)

    @classmethod
    def from_histogram(cls, config: dict, hist: dict) -> "ExperimentReport":
        mean, var, se = histogram_moments(hist)
        return cls(dict(config), dict(sorted(hist.items())), mean, var, se)

    def to_dict(self, include_time: bool = True) -> dict:
        out = {
            "schema": SCHEMA,
            "config": self.config,
            "histogram": {str(k): v for k, v in self.histogram.items()},
            "samples": self.samples,
            "mean": self.mean,
            "variance": self.variance,
            "se": self.se,
            "tails": self.tails,
            "extra": self.extra,
        }
        if include_time:
            out["wall_clock"] = self.wall_clock
        return out

    def to_json(self, include_time: bool = True) -> str:
        return json.dumps(self.to_dict(include_time), indent=2, sort_keys=True)

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["value", "count"])
        for k, v in self.histogram.items():
            w.writerow([k, v])
        return buf.getvalue()


def histogram_moments(hist: dict) -> tuple[float, float, float]:
    """Mean, sample variance and standard error of the mean."""
    total = sum(hist.values())
    if total == 0:
        return math.nan, math.nan, math.nan
    mean = sum(k * c for k, c in hist.items()) / total
    if total == 1:
        return mean, 0.0, 0.0
    var = sum(c * (k - mean) ** 2 for k, c in hist.items()) / (total - 1)
    return mean, var, math.sqrt(var / total)


# ---------------------------------------------------------------------------
# intercalate distribution


_STATISTICS = ("N", "order3")


def _statistic(grids: np.ndarray, statistic: str) -> np.ndarray:
    if statistic == "N":
        return kernels.grid_count_many(np.ascontiguousarray(grids, dtype=np.int16))
    return np.array([kernels.order3_count(np.ascontiguousarray(g)) for g in grids], dtype=np.int64)


def _jm_chunk(args):
    n, size, seed, index, chunks, burnin, thin, statistic = args
    rng = stream_rngs(seed, chunks)[index]
    grids = jm_sample_array(n, size, rng, burnin=burnin, thin=thin)
    return _statistic(grids, statistic)


def _chunks(samples: int) -> list[int]:
    sizes = [CHUNK] * (samples // CHUNK)
    if samples % CHUNK:
        sizes.append(samples % CHUNK)
    return sizes


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def mc_values(n: int, samples: int, seed, burnin=None, thin=None, statistic: str = "N",
              workers: int = 1) -> np.ndarray:
    """Per-sample statistic from independent Jacobson-Matthews chains.

    One chain per chunk of ``CHUNK`` samples, each with its own burn-in.
    """
    if statistic not in _STATISTICS:
        raise ValueError(f"unknown statistic {statistic!r}")
    sizes = _chunks(samples)
    jobs = [(n, s, seed, j, len(sizes), burnin, thin, statistic) for j, s in enumerate(sizes)]
    parts = _map(_jm_chunk, jobs, workers)
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def mc_distribution(n: int, sampler: str = "jm", samples: int = 1000, seed=0, burnin=None, thin=None,
                    statistic: str = "N", workers: int = 1) -> ExperimentReport:
    """Distribution of the intercalate count (or order-3 subsquare count).

    ``sampler="exhaustive"`` runs over every square of order ``n <= 5`` and
    ignores ``samples`` and ``seed``.
    """
    t0 = time.perf_counter()
    config = {"n": n, "sampler": sampler, "statistic": statistic}
    if sampler == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise SizeGuard(f"exhaustive mode is limited to n <= {EXHAUSTIVE_LIMIT}")
        values = _statistic(square_array(n), statistic)
    elif sampler == "jm":
        config.update(samples=samples, seed=seed, burnin=burnin, thin=thin, chunk=CHUNK)
        values = mc_values(n, samples, seed, burnin, thin, statistic, workers)
    else:
        raise ValueError(f"unknown sampler {sampler!r}")
    report = ExperimentReport.from_values(config, values)
    report.wall_clock = time.perf_counter() - t0
    return report


@dataclass(frozen=True)
class TailEstimate:
    direction: str
    delta: float
    threshold: float
    hits: int
    samples: int
    frequency: float
    se: float
    wilson: tuple

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def tail_from_values(values, n: int, direction: str, delta: float) -> TailEstimate:
    vals = np.asarray(values)
    if direction == "lower":
        threshold = (1 - delta) * n * n / 4
        hits = int(np.sum(vals <= threshold))
    elif direction == "upper":
        threshold = (1 + delta) * n * n / 4
        hits = int(np.sum(vals >= threshold))
    else:
        raise ValueError("direction must be 'lower' or 'upper'")
    total = len(vals)
    freq = hits / total
    ci = binomtest(hits, total).proportion_ci(method="wilson")
    se = math.sqrt(freq * (1 - freq) / total)
    return TailEstimate(direction, delta, threshold, hits, total, freq, se, (float(ci.low), float(ci.high)))


def tail_estimate(n: int, direction: str, delta: float, samples: int = 1000, seed=0,
                  sampler: str = "jm", **kwargs) -> TailEstimate:
    """Frequency of N <= (1 - delta) n^2/4 (``lower``) or N >= (1 + delta) n^2/4."""
    if sampler == "exhaustive":
        if n > EXHAUSTIVE_LIMIT:
            raise SizeGuard(f"exhaustive mode is limited to n <= {EXHAUSTIVE_LIMIT}")
        values = _statistic(square_array(n), "N")
    else:
        values = mc_values(n, samples, seed, **kwargs)
    return tail_from_values(values, n, direction, delta)


# ---------------------------------------------------------------------------
# G* experiment


def _gstar_draw(n: int, alpha: float, rng, exact_nprime: bool) -> tuple[int, int, int, bool]:
    g = sample_binomial_hypergraph(n, alpha / n, rng)
    rows = hypergraph_intercalates(g, n)
    inters = [counting.Intercalate((i, j), (x, y), (a, b)) for i, j, x, y, a, b in rows.tolist()]
    n2 = len(counting.intersecting_pairs(inters))
    gstar = prune_conflicts(g, n)
    star_inters = counting.enumerate_intercalates(gstar)
    exact = exact_nprime and len(star_inters) <= counting.EXACT_LIMIT
    nprime = counting.max_disjoint_family(star_inters, "exact" if exact else "greedy")
    return len(star_inters), n2, nprime, exact


def _gstar_chunk(args):
    n, alpha, size, seed, index, chunks, exact = args
    rng = stream_rngs(seed, chunks)[index]
    return [_gstar_draw(n, alpha, rng, exact) for _ in range(size)]


def gstar_experiment(n: int, alpha: float, samples: int = 1000, seed=0, exact_nprime: bool = True,
                     workers: int = 1) -> ExperimentReport:
    """Monte Carlo means of N(G*), N2(G) and N'(G*) against the exact means.

    The report histogram is that of N(G*); the other statistics and the
    z-scores sit in ``extra``.
    """
    if not 0 < alpha < 1:
        raise InvalidAlpha("alpha must lie in (0, 1)")
    t0 = time.perf_counter()
    sizes = _chunks(samples)
    jobs = [(n, alpha, s, seed, j, len(sizes), exact_nprime) for j, s in enumerate(sizes)]
    draws = list(itertools.chain.from_iterable(_map(_gstar_chunk, jobs, workers)))
    arr = np.array([d[:3] for d in draws], dtype=np.int64).reshape(-1, 3)
    config = {"n": n, "alpha": alpha, "samples": samples, "seed": seed, "chunk": CHUNK}
    report = ExperimentReport.from_values(config, arr[:, 0])
    exact_n = expected_gstar_intercalates(n, alpha)
    exact_n2 = expected_shared_pairs(n, alpha)

    def summary(col, target=None):
        mean = float(arr[:, col].mean()) if len(arr) else math.nan
        se = float(arr[:, col].std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else math.nan
        out = {"mean": mean, "se": se}
        if target is not None:
            out["exact"] = target
            out["z"] = (mean - target) / se if se and se > 0 else (0.0 if mean == target else math.inf)
        return out

    report.extra = {
        "N": summary(0, exact_n),
        "N2": summary(1, exact_n2),
        "Nprime": summary(2),
        "Nprime_all_exact": bool(all(d[3] for d in draws)),
        "asymptotic_N": asymptotic_gstar_intercalates(n, alpha),
        "lower_bound_holds": bool(np.all(arr[:, 2] >= arr[:, 0] - arr[:, 1])) if len(arr) else True,
    }
    report.wall_clock = time.perf_counter() - t0
    return report


# ---------------------------------------------------------------------------
# inheritance


def _cell_quads(sq: LatinSquare) -> np.ndarray:
    """Intercalates of ``sq`` as quadruples of cell ids r * n + c."""
    n = sq.n
    rows = kernels.partial_intercalates(np.ascontiguousarray(sq.cells))
    if not len(rows):
        return np.zeros((0, 4), dtype=np.int64)
    i, j, x, y = rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]
    return np.stack([i * n + x, i * n + y, j * n + x, j * n + y], axis=1)


def inheritance_estimate(sq: LatinSquare, m: int, threshold: float, samples: int = 1000, seed=0) -> float:
    """Fraction of uniformly random m-subsets of ``sq``'s triples that have
    at most ``threshold`` intercalates."""
    n2 = sq.n**2
    if not 0 <= m <= n2:
        raise counting.MTooLarge(f"m={m} must lie in 0..{n2}")
    quads = _cell_quads(sq)
    rng = make_rng(seed)
    hits = 0
    for _ in range(samples):
        mask = np.zeros(n2, dtype=bool)
        mask[rng.choice(n2, size=m, replace=False)] = True
        hits += int(np.count_nonzero(mask[quads].all(axis=1)) <= threshold)
    return hits / samples


def inheritance_exact(sq: LatinSquare, m: int, threshold: float) -> float:
    """Exact version of :func:`inheritance_estimate` by listing every subset."""
    n2 = sq.n**2
    if not 0 <= m <= n2:
        raise counting.MTooLarge(f"m={m} must lie in 0..{n2}")
    if math.comb(n2, m) > INHERITANCE_EXACT_LIMIT:
        raise SizeGuard(f"C({n2}, {m}) subsets is too many to list")
    quads = _cell_quads(sq)
    hits = 0
    total = 0
    for subset in itertools.combinations(range(n2), m):
        mask = np.zeros(n2, dtype=bool)
        mask[list(subset)] = True
        hits += int(np.count_nonzero(mask[quads].all(axis=1)) <= threshold)
        total += 1
    return hits / total

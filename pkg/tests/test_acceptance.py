"""Acceptance criteria 1-13, one test each.

Every test records a verdict in ``conftest.ACCEPTANCE`` before asserting;
the verdicts are printed as one line per criterion at the end of the run.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import chisquare

from conftest import ACCEPTANCE
from latinlab import constructions, counting, decompose, harness, sampling, switching, trp
from latinlab.core import TripleSet, square
from oracles import (
    intercalate_triples,
    max_disjoint,
    quad_count_many,
    quad_scan,
    reduced_squares,
    squares_by_permutations,
)

CRITERIA = {
    1: "enumeration totals",
    2: "intercalate-free orders",
    3: "boolean group squares",
    4: "counting equivalence",
    5: "JM uniformity at n=4",
    6: "mean of N near n^2/4",
    7: "G* expectation",
    8: "switching invariants",
    9: "star/matching partitions",
    10: "permanent sandwich",
    11: "TRP quasirandomness",
    12: "N' >= N - N2",
    13: "order-3 subsquares (reported)",
}

TRP_THRESHOLD = 0.65
TRP_SEED = 20241017


@pytest.fixture(autouse=True)
def _started(request):
    num = int(request.node.name.split("_")[2])
    ACCEPTANCE[num] = ("FAIL", "did not complete")


def verdict(num: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[num] = ("PASS" if ok else "FAIL", detail)
    print(f"criterion {num}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, detail


def test_criterion_01_enumeration():
    totals = {}
    for n in range(1, 5):
        ours = {tuple(map(tuple, g.tolist())) for g in sampling.square_array(n)}
        theirs = {tuple(map(tuple, g)) for g in squares_by_permutations(n)}
        totals[n] = (len(ours), ours == theirs)
    t = time.perf_counter()
    five = sampling.square_array(5)
    elapsed = time.perf_counter() - t
    oracle5 = len(reduced_squares(5)) * math.factorial(5) * math.factorial(4)
    distinct = len(np.unique(five.reshape(len(five), -1), axis=0))
    ok = (all(same for _, same in totals.values())
          and [totals[n][0] for n in range(1, 5)] == [1, 2, 12, 576]
          and len(five) == distinct == oracle5 == 161280 and elapsed < 120)
    verdict(1, ok, f"totals {[totals[n][0] for n in range(1, 5)] + [len(five)]}, n=5 in {elapsed:.1f}s")


def test_criterion_02_intercalate_free():
    four = sampling.square_array(4)
    min4 = int(quad_count_many(four).min())
    none4 = constructions.search_intercalate_free(4) is None
    witnesses = {}
    for n in (5, 6, 7):
        sq = constructions.search_intercalate_free(n)
        witnesses[n] = sq is not None and len(quad_scan(square((sq.cells + 1).tolist()).cells)) == 0
    ok = min4 >= 1 and none4 and all(witnesses.values())
    verdict(2, ok, f"min N over order 4 = {min4}, none at 4: {none4}, witnesses {witnesses}")


def test_criterion_03_boolean():
    rows = []
    for q in range(1, 5):
        sq = constructions.boolean_group_square(q)
        k = 2**q
        t = time.perf_counter()
        ours = counting.count_intercalates(sq)
        elapsed = time.perf_counter() - t
        rows.append((q, ours, k * math.comb(k, 2) // 2, len(quad_scan(sq.cells)), elapsed))
    ok = all(a == b == c for _, a, b, c, _ in rows) and rows[-1][4] < 1.0
    verdict(3, ok, "; ".join(f"q={q}: {a}" for q, a, *_ in rows) + f", q=4 in {rows[-1][4] * 1e3:.2f}ms")


def test_criterion_04_counting_equivalence():
    mismatches = 0
    checked = 0
    for n in range(1, 6):
        grids = sampling.square_array(n)
        ours = np.array([counting.count_intercalates(sq) for sq in map(_sq, grids)]) if n < 5 else \
            counting.kernels.grid_count_many(grids)
        mismatches += int(np.sum(ours != quad_count_many(grids)))
        checked += len(grids)
    samples = sampling.jm_sample_array(12, 1000, sampling.make_rng(12))
    ours = [counting.count_intercalates(_sq(g)) for g in samples]
    mismatches += sum(a != len(quad_scan(g)) for a, g in zip(ours, samples))
    checked += len(samples)
    verdict(4, mismatches == 0, f"{mismatches} mismatches over {checked} squares")


def _sq(grid):
    from latinlab.core import LatinSquare

    return LatinSquare._trusted(grid)


@pytest.mark.slow
def test_criterion_05_jm_uniformity():
    draws = 10**6
    t = time.perf_counter()
    grids = sampling.jm_sample_array(4, draws, sampling.make_rng(5))
    elapsed = time.perf_counter() - t
    keys = (grids.reshape(draws, 16).astype(np.int64) * (4 ** np.arange(16))).sum(axis=1)
    _, counts = np.unique(keys, return_counts=True)
    p = 1 / 576
    se = math.sqrt(p * (1 - p) / draws)
    worst = float(np.max(np.abs(counts / draws - p)) / se) if len(counts) == 576 else math.inf
    stat = chisquare(counts).statistic if len(counts) == 576 else math.nan
    ok = len(counts) == 576 and worst <= 5 and elapsed < 600
    verdict(5, ok, f"{len(counts)} squares seen, max |freq - 1/576| = {worst:.2f} SE, "
                   f"chi-square {stat:.1f} on 575 df, {elapsed:.0f}s")


@pytest.mark.slow
def test_criterion_06_mean_intercalates():
    small = harness.mc_distribution(20, samples=2000, seed=20)
    big = harness.mc_distribution(50, samples=2000, seed=50)
    r20 = small.mean / (20**2 / 4)
    r50 = big.mean / (50**2 / 4)
    ok = abs(r50 - 1) <= 0.2 and abs(r50 - 1) < abs(r20 - 1)
    verdict(6, ok, f"mean/(n^2/4) = {r20:.4f} at n=20, {r50:.4f} at n=50 "
                   f"(mean {big.mean:.1f} +- {big.se:.1f})")


@pytest.mark.slow
def test_criterion_07_gstar():
    rep = harness.gstar_experiment(60, 0.3, 10**4, seed=7)
    z = rep.extra["N"]["z"]
    ratio = trp.expected_gstar_intercalates(300, 0.3) / trp.asymptotic_gstar_intercalates(300, 0.3)
    ok = abs(z) <= 3 and abs(ratio - 1) <= 0.1
    verdict(7, ok, f"mean {rep.extra['N']['mean']:.3f} vs exact {rep.extra['N']['exact']:.3f} (z = {z:.2f}), "
                   f"exact/asymptotic at n=300 = {ratio:.4f}")


def _switching_census(k, n, fixed=None):
    rects = [r for r in map(_rect, sampling.rectangle_array(k, n, fixed))]
    max_jump = max_creating = 0
    min_destroying = math.inf
    for rect in rects:
        rep = switching.switching_effect_report(rect)
        for rec in rep.valid:
            max_jump = max(max_jump, abs(rec.delta))
        max_creating = max(max_creating, rep.creating)
        for count in switching.destroying_switchings(rect).values():
            min_destroying = min(min_destroying, count)
    levels = switching.level_sets(rects)
    checked = [ell for ell in levels if ell >= 2]
    level_ok = all(
        (ell * (n - 2 * k) - k * n) * levels[ell] <= k * n * (levels.get(ell - 1, 0) + levels.get(ell - 2, 0))
        for ell in checked
    )
    ok = max_jump <= 2 and max_creating <= k * n and min_destroying >= 2 * (n - 2 * k) and level_ok
    return ok, len(rects), max_jump, max_creating, min_destroying, dict(sorted(levels.items())), checked


def test_criterion_08_switchings():
    t = time.perf_counter()
    ok, count, jump, creating, destroying, levels, checked = _switching_census(2, 5)
    # a derangement of 5 columns has at most one 2-cycle, so no level >= 2
    # exists at n = 5; n = 6 with the first row fixed (every level set
    # scales by 6!, which the inequality ignores) makes the check bite
    fixed = np.full((2, 6), -1, dtype=np.int16)
    fixed[0] = np.arange(6)
    ok6, count6, jump6, creating6, destroying6, levels6, checked6 = _switching_census(2, 6, fixed)
    elapsed = time.perf_counter() - t
    ok = ok and ok6 and count == 5280 and checked6 and elapsed < 300
    verdict(8, ok, f"k=2 n=5: {count} rectangles, max |dl| = {jump}, max creating = {creating}, "
                   f"min destroying = {destroying}, levels {levels} (none >= 2); "
                   f"k=2 n=6 normalised: {count6} rectangles, max |dl| = {jump6}, "
                   f"max creating = {creating6}, min destroying = {destroying6}, levels {levels6}, "
                   f"inequality checked at l = {checked6}; {elapsed:.0f}s")


def _rect(grid):
    from latinlab.core import LatinRectangle

    return LatinRectangle._trusted(grid)


def test_criterion_09_decomposition():
    rng = np.random.default_rng(9)
    violations = 0
    for _ in range(1000):
        v = int(rng.integers(3, 61))
        possible = v * (v - 1) * (v - 2) // 6
        m = int(rng.integers(0, min(400, possible) + 1))
        r = int(rng.integers(3, 21))
        ids = rng.choice(possible, size=m, replace=False)
        all_edges = _all_triples(v)
        h = decompose.Hypergraph3(v, tuple(all_edges[i] for i in ids))
        parts = decompose.star_matching_partition(h, r)
        if decompose.check_partition(h, r, parts):
            violations += 1
    verdict(9, violations == 0, f"{violations} violations in 1000 hypergraphs")


_TRIPLES: dict[int, list] = {}


def _all_triples(v):
    if v not in _TRIPLES:
        from itertools import combinations

        _TRIPLES[v] = list(combinations(range(v), 3))
    return _TRIPLES[v]


def _guard_shapes():
    for n in range(2, 8):
        for k in range(1, n):
            if k * n <= 16 or (k <= 2 and n <= 7):
                yield k, n


def test_criterion_10_sandwich():
    # relabelling symbols permutes the availability columns, so fixing the
    # first row to the identity keeps every extension count
    checked = failures = 0
    equal_at_top = True
    for k, n in _guard_shapes():
        fixed = np.full((k, n), -1, dtype=np.int16)
        fixed[0] = np.arange(n)
        for grid in sampling.rectangle_array(k, n, fixed):
            ok, tight = _sandwich(_rect(grid))
            failures += not ok
            equal_at_top &= tight
            checked += 1
    rng = sampling.make_rng(10)
    for _ in range(1000):
        n = int(rng.integers(2, 21))
        k = int(rng.integers(1, min(5, n - 1) + 1))
        rect = sampling.sample_rectangle(k, n, rng, mode="square-prefix")
        ok, tight = _sandwich(rect)
        failures += not ok
        equal_at_top &= tight
        checked += 1
    verdict(10, failures == 0 and equal_at_top,
            f"{failures} failures over {checked} rectangles, equality at k=n-1: {equal_at_top}")


def _sandwich(rect):
    upper, lower = sampling.extension_bounds(rect)
    exact = sampling.count_row_extensions(rect)
    ok = lower <= exact * (1 + 1e-12) and exact <= upper * (1 + 1e-12)
    tight = rect.k != rect.n - 1 or exact == upper == 1
    return ok, tight


@pytest.mark.slow
def test_criterion_11_quasirandomness():
    n, m = 50, int(0.3 * 50**2)
    zero = trp.quasirandom_deviation(trp.TripartiteGraph.complete(n), 2)
    devs = []
    stars = 0
    for rng in sampling.stream_rngs(TRP_SEED, 100):
        out = trp.trp_run(n, m, rng, record_trace=True)
        stars += out.is_star
        devs.append(trp.trace_quasirandomness(out, 2) if not out.is_star else math.inf)
    below = sum(d < TRP_THRESHOLD for d in devs)
    ok = zero == 0.0 and below >= 95 and stars == 0
    verdict(11, ok, f"complete graph deviation {zero}, {below}/100 runs below {TRP_THRESHOLD} "
                    f"(median {np.median(devs):.3f}, max {max(devs):.3f}), {stars} stars")


def test_criterion_12_nprime():
    evaluated = violations = exact_checked = exact_wrong = 0

    def check(x, inters_sets):
        nonlocal evaluated, violations, exact_checked, exact_wrong
        st = counting.intercalate_stats(x)
        evaluated += 1
        violations += st.Nprime < st.N - st.N2
        if st.exact:
            exact_checked += 1
            exact_wrong += st.Nprime != max_disjoint(inters_sets)

    for grid in sampling.square_array(4):
        check(_sq(grid), [intercalate_triples(grid, q) for q in quad_scan(grid)])
    for n in (5, 6, 8):
        for grid in sampling.jm_sample_array(n, 100, sampling.make_rng(n)):
            check(_sq(grid), [intercalate_triples(grid, q) for q in quad_scan(grid)])
    rng = sampling.make_rng(12)
    for _ in range(300):
        n = int(rng.integers(4, 16))
        alpha = float(rng.uniform(0.5, 2.0))
        pruned = trp.prune_conflicts(trp.sample_binomial_hypergraph(n, alpha / n, rng), n)
        check(pruned, [frozenset(_hyper_triples(row)) for row in trp.hypergraph_intercalates(pruned.sorted(), n)])
    ok = violations == 0 and exact_wrong == 0 and exact_checked > 0
    verdict(12, ok, f"{violations} violations over {evaluated} instances, "
                    f"{exact_wrong} exact mismatches over {exact_checked}")


def _hyper_triples(row):
    i, j, x, y, a, b = (int(v) for v in row)
    return {(i, x, a), (i, y, b), (j, x, b), (j, y, a)}


@pytest.mark.slow
def test_criterion_13_order3_report():
    parts = []
    for n, samples in ((30, 1000), (50, 500)):
        rep = harness.mc_distribution(n, samples=samples, seed=n, statistic="order3")
        parts.append(f"n={n}: {rep.mean:.4f} +- {rep.se:.4f}")
    ACCEPTANCE[13] = ("REPORTED", ", ".join(parts) + f" (conjectured limit 1/18 = {1 / 18:.4f})")
    print("criterion 13:", ACCEPTANCE[13][1])

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from latinlab.decompose import (
    Hypergraph3,
    RNonPositive,
    check_partition,
    colours_used,
    parts_to_json,
    star_matching_partition,
)

from oracles import greedy_star_matching_reference


def random_hypergraph(rng, vertices, m):
    edges = set()
    while len(edges) < m:
        e = tuple(sorted(rng.choice(vertices, 3, replace=False).tolist()))
        edges.add(e)
    return Hypergraph3(vertices, tuple(sorted(edges, key=lambda _: rng.random())))


def test_single_star():
    h = Hypergraph3(7, ((0, 1, 2), (0, 3, 4), (0, 5, 6)))
    parts = star_matching_partition(h, 3)
    assert [(p.kind, p.edges) for p in parts] == [("star", (0, 1, 2))]


def test_perfect_matching():
    h = Hypergraph3(12, ((0, 1, 2), (3, 4, 5), (6, 7, 8), (9, 10, 11)))
    parts = star_matching_partition(h, 4)
    assert [(p.kind, p.edges) for p in parts] == [("matching", (0, 1, 2, 3))]


def test_bad_inputs():
    with pytest.raises(RNonPositive):
        star_matching_partition(Hypergraph3(3, ((0, 1, 2),)), 0)
    with pytest.raises(ValueError):
        Hypergraph3(3, ((0, 1, 2), (2, 1, 0)))
    with pytest.raises(ValueError):
        Hypergraph3(3, ((0, 1, 1),))
    with pytest.raises(ValueError):
        Hypergraph3(3, ((0, 1, 3),))


def test_empty():
    assert star_matching_partition(Hypergraph3(0, ()), 2) == []


@given(st.integers(3, 30), st.integers(0, 60), st.integers(1, 8), st.integers(0, 2**32 - 1))
def test_matches_reference_and_postconditions(v, m, r, seed):
    rng = np.random.default_rng(seed)
    m = min(m, v * (v - 1) * (v - 2) // 6)
    h = random_hypergraph(rng, v, m)
    parts = star_matching_partition(h, r)
    assert [(p.kind, p.edges) for p in parts] == greedy_star_matching_reference(h.edges, r)
    assert check_partition(h, r, parts) == []
    assert colours_used(parts) <= 3 * (r - 1) + 1


def test_checker_catches_violations():
    h = Hypergraph3(6, ((0, 1, 2), (0, 3, 4), (1, 3, 5)))
    from latinlab.decompose import Part

    bad = [Part("matching", (0, 1)), Part("star", (2,))]
    assert any("intersecting" in p for p in check_partition(h, 3, bad))
    assert any("partition" in p for p in check_partition(h, 3, [Part("star", (0,))]))


def test_latin_triples():
    h = Hypergraph3.from_triples(3, [(0, 0, 0), (1, 1, 1), (2, 2, 2), (0, 1, 2)])
    assert h.edges[0] == (0, 3, 6) and h.vertices == 9


def test_json():
    h = Hypergraph3(7, ((0, 1, 2), (0, 3, 4), (0, 5, 6)))
    doc = json.loads(parts_to_json(h, star_matching_partition(h, 2)))
    assert doc["schema"] == "latinlab/1"
    assert [p["kind"] for p in doc["parts"]] == ["star", "matching"]

import math

import pytest

from latinlab.constructions import (
    GroupSpec,
    boolean_group_square,
    boolean_intercalates,
    choose_k,
    cyclic_square,
    group_square,
    search_intercalate_free,
)
from latinlab.core import SizeGuard, validate
from latinlab.counting import count_intercalates

from oracles import is_latin, quad_count

CYCLIC_ODD = range(1, 16, 2)
CYCLIC_EVEN = range(2, 15, 2)


def test_group_spec_validation():
    with pytest.raises(ValueError):
        GroupSpec()
    with pytest.raises(ValueError):
        GroupSpec(boolean=1, cyclic=2)
    with pytest.raises(ValueError):
        GroupSpec(boolean=-1)
    with pytest.raises(ValueError):
        GroupSpec(cyclic=0)
    assert GroupSpec(boolean=3).order == 8 and GroupSpec(cyclic=6).order == 6


def test_boolean_one():
    x = boolean_group_square(1)
    assert (x.cells + 1).tolist() == [[1, 2], [2, 1]]
    assert count_intercalates(x) == 1


def test_boolean_two():
    assert count_intercalates(boolean_group_square(2)) == 12


@pytest.mark.parametrize("q", range(0, 6))
def test_tables_are_latin(q):
    x = boolean_group_square(q)
    assert is_latin(x.cells)
    validate(x.cells + 1)


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_boolean_formula(q):
    k = 2**q
    assert count_intercalates(boolean_group_square(q)) == boolean_intercalates(q) == k * math.comb(k, 2) // 2


@pytest.mark.parametrize("m", CYCLIC_ODD)
def test_cyclic_odd_free(m):
    x = cyclic_square(m)
    assert quad_count(x.cells) == 0 == count_intercalates(x)


@pytest.mark.parametrize("m", CYCLIC_EVEN)
def test_cyclic_even_has_some(m):
    x = cyclic_square(m)
    assert count_intercalates(x) == quad_count(x.cells) > 0


def test_size_guard():
    with pytest.raises(SizeGuard):
        group_square(GroupSpec(boolean=15))
    with pytest.raises(SizeGuard):
        search_intercalate_free(10)


def test_search_four_not_found():
    assert search_intercalate_free(4) is None


def test_search_two_not_found():
    assert search_intercalate_free(2) is None


@pytest.mark.parametrize("n", [1, 3, 5, 6, 7, 8])
def test_search_witness(n):
    x = search_intercalate_free(n)
    assert x is not None and is_latin(x.cells) and quad_count(x.cells) == 0


def test_choose_k_examples():
    assert choose_k(0.5, 16) == 8
    # at n = 2, k = 2 reaches exactly n^2/4 = 1, short of (1 + delta) for any delta > 0
    assert choose_k(1e-9, 2) == 4
    with pytest.raises(ValueError):
        choose_k(0, 4)
    with pytest.raises(ValueError):
        choose_k(0.5, 1)


def test_choose_k_is_minimal_power_of_two():
    for n in range(2, 200):
        k = choose_k(0.3, n)
        target = 1.3 * n * n / 4
        assert k & (k - 1) == 0
        assert k * math.comb(k, 2) / 2 >= target
        assert k == 1 or (k // 2) * math.comb(k // 2, 2) / 2 < target


def test_choose_k_growth():
    ks = [choose_k(0.5, 2**e) for e in range(4, 13)]
    for a, b in zip(ks, ks[1:]):
        assert b // a in (1, 2, 4)
    # k^3 / 4 ~ n^2 / 4, so k / n^(2/3) stays bounded
    ratios = [k / (2**e) ** (2 / 3) for k, e in zip(ks, range(4, 13))]
    assert max(ratios) / min(ratios) < 4

"""Samplers, exhaustive enumerators and one-row extension counts.

Random Latin squares come from the Jacobson-Matthews chain on n x n x n
0/1 arrays with unit line sums, where one cell may temporarily hold -1.
No mixing time is known for this chain, so the default burn-in (n^3 moves)
and thinning (n^2 proper-state visits) are heuristics.

All randomness is drawn from a numpy ``BitGenerator`` (Philox by default,
see :func:`make_rng`); the compiled and pure-Python kernels consume it
identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from latinlab._backend import kernels
from latinlab.core import LatinError, LatinRectangle, LatinSquare, SizeGuard, validate

RYSER_LIMIT = 30
MATCHING_DP_LIMIT = 20
BATCH = 4096


class CompletionFailed(LatinError):
    pass


def make_rng(seed=None, stream: int = 0) -> np.random.Generator:
    """Generator for stream ``stream`` of master seed ``seed`` (Philox)."""
    ss = np.random.SeedSequence(seed)
    if stream:
        ss = ss.spawn(stream + 1)[stream]
    return np.random.Generator(np.random.Philox(ss))


def stream_rngs(seed, count: int) -> list[np.random.Generator]:
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(count)]


def _bitgen(rng):
    if isinstance(rng, np.random.Generator):
        return rng.bit_generator
    if isinstance(rng, np.random.BitGenerator):
        return rng
    if rng is None or isinstance(rng, (int, np.integer)):
        return make_rng(rng).bit_generator
    raise TypeError(f"expected a numpy Generator or BitGenerator, got {type(rng).__name__}")


# ---------------------------------------------------------------------------
# Jacobson-Matthews


@dataclass(frozen=True, eq=False)
class JmState:
    """Incidence cube of a (possibly improper) Latin square."""

    cube: np.ndarray
    improper: tuple[int, int, int] | None = None

    def __post_init__(self):
        cube = np.array(self.cube, dtype=np.int8)
        cube.flags.writeable = False
        object.__setattr__(self, "cube", cube)
        if self.improper is not None:
            object.__setattr__(self, "improper", tuple(int(v) for v in self.improper))

    @property
    def n(self) -> int:
        return self.cube.shape[0]

    @property
    def is_proper(self) -> bool:
        return self.improper is None

    @classmethod
    def from_square(cls, x: LatinSquare) -> "JmState":
        n = x.n
        cube = np.zeros((n, n, n), dtype=np.int8)
        r, c = np.indices((n, n))
        cube[r, c, x.cells] = 1
        return cls(cube)

    def to_square(self) -> LatinSquare:
        if not self.is_proper:
            raise LatinError("improper state has no square")
        return LatinSquare._trusted(np.argmax(self.cube, axis=2))

    def check(self) -> None:
        """Raise ``AssertionError`` unless the line-sum invariants hold."""
        cube = self.cube
        n = self.n
        assert cube.min() >= -1 and cube.max() <= 1
        for axis in range(3):
            assert np.all(cube.sum(axis=axis) == 1), "line sum differs from 1"
        neg = np.argwhere(cube < 0)
        if self.improper is None:
            assert len(neg) == 0
        else:
            assert len(neg) == 1 and tuple(neg[0]) == self.improper
            r, c, s = self.improper
            for line in (cube[:, c, s], cube[r, :, s], cube[r, c, :]):
                assert np.count_nonzero(line == 1) == 2
        assert n >= 1

    def __eq__(self, other):
        if not isinstance(other, JmState):
            return NotImplemented
        return self.improper == other.improper and np.array_equal(self.cube, other.cube)

    def __hash__(self):
        return hash((self.cube.tobytes(), self.improper))


def _imp_array(state: JmState) -> np.ndarray:
    return np.array(state.improper if state.improper else (-1, -1, -1), dtype=np.int64)


def jm_step(state: JmState, rng, moves: int = 1) -> JmState:
    """Apply ``moves`` Jacobson-Matthews moves and return the new state."""
    cube = np.array(state.cube, dtype=np.int8, order="C")
    imp = _imp_array(state)
    kernels.jm_moves(cube, imp, moves, _bitgen(rng))
    return JmState(cube, None if imp[0] < 0 else tuple(imp))


def cyclic_start(n: int) -> LatinSquare:
    idx = np.arange(n)
    return LatinSquare._trusted((idx[:, None] + idx[None, :]) % n)


def default_burnin(n: int) -> int:
    return n**3


def default_thin(n: int) -> int:
    return n**2


def jm_sample_array(n: int, count: int, rng, burnin: int | None = None, thin: int | None = None,
                    start: LatinSquare | None = None) -> np.ndarray:
    """``count`` snapshots of one chain as a ``(count, n, n)`` int16 array."""
    return np.concatenate(list(_jm_batches(n, count, rng, burnin, thin, start)) or
                          [np.zeros((0, n, n), dtype=np.int16)])


def _jm_batches(n, count, rng, burnin, thin, start, batch=BATCH):
    if n < 1:
        raise ValueError("n must be positive")
    burnin = default_burnin(n) if burnin is None else burnin
    thin = default_thin(n) if thin is None else thin
    if burnin < 0 or thin < 0:
        raise ValueError("burnin and thin must be non-negative")
    start = cyclic_start(n) if start is None else start
    bitgen = _bitgen(rng)
    cube = np.array(JmState.from_square(start).cube, order="C")
    imp = np.full(3, -1, dtype=np.int64)
    done = 0
    first = True
    while done < count:
        size = min(batch, count - done)
        out = np.empty((size, n, n), dtype=np.int16)
        kernels.jm_chain(cube, imp, burnin if first else 0, thin, size, out, first, bitgen)
        first = False
        done += size
        yield out


def jm_sample(n: int, count: int, rng, burnin: int | None = None, thin: int | None = None,
              start: LatinSquare | None = None) -> Iterator[LatinSquare]:
    """Stream of squares from one chain.

    After ``burnin`` moves the first proper state is emitted; later samples
    are at least ``thin`` proper-state visits apart (at least one move).
    """
    for block in _jm_batches(n, count, rng, burnin, thin, start):
        for cells in block:
            yield LatinSquare._trusted(cells)


# ---------------------------------------------------------------------------
# exhaustive enumeration


def _square_guard(n):
    if n > 5:
        raise SizeGuard(f"exhaustive square enumeration is limited to n <= 5 (got {n})")


def _rect_guard(k, n):
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not (k * n <= 16 or (k <= 2 and n <= 7)):
        raise SizeGuard(f"exhaustive rectangle enumeration refuses k={k}, n={n}")


def square_array(n: int) -> np.ndarray:
    """All order-n Latin squares, lexicographic row-major, as an int16 array."""
    _square_guard(n)
    return rectangle_array(n, n, _checked=True)


def rectangle_array(k: int, n: int, fixed=None, _checked: bool = False) -> np.ndarray:
    if not _checked:
        _rect_guard(k, n)
    fx = np.full((k, n), -1, dtype=np.int16) if fixed is None else np.asarray(fixed, dtype=np.int16)
    total = kernels.backtrack(k, n, fx, None)
    out = np.empty((total, k, n), dtype=np.int16)
    kernels.backtrack(k, n, fx, out)
    return out


def count_rectangles(k: int, n: int, fixed=None) -> int:
    """Number of k x n Latin rectangles agreeing with the ``fixed`` cells (-1 = free)."""
    _rect_guard(k, n)
    fx = np.full((k, n), -1, dtype=np.int16) if fixed is None else np.asarray(fixed, dtype=np.int16)
    return int(kernels.backtrack(k, n, fx, None))


def enumerate_squares(n: int) -> Iterator[LatinSquare]:
    for cells in square_array(n):
        yield LatinSquare._trusted(cells)


def enumerate_rectangles(k: int, n: int) -> Iterator[LatinRectangle]:
    _rect_guard(k, n)
    if k * n <= 16 or n <= 6:
        for cells in rectangle_array(k, n):
            yield LatinRectangle._trusted(cells)
        return
    # k <= 2, n = 7: stream by first row to keep memory flat
    for first in rectangle_array(1, n):
        fixed = np.full((k, n), -1, dtype=np.int16)
        fixed[0] = first[0]
        for cells in rectangle_array(k, n, fixed, _checked=True):
            yield LatinRectangle._trusted(cells)


# ---------------------------------------------------------------------------
# one-row extensions


def availability_matrix(rect: LatinRectangle) -> np.ndarray:
    """``A[c, s] = 1`` iff symbol ``s`` is absent from column ``c``."""
    n = rect.n
    avail = np.ones((n, n), dtype=np.uint8)
    if rect.k:
        cols = np.broadcast_to(np.arange(n), rect.cells.shape)
        avail[cols, rect.cells] = 0
    return avail


def permanent(mat) -> int:
    """Exact permanent of a 0/1 matrix (Ryser, Gray-code order)."""
    a = np.ascontiguousarray(mat, dtype=np.uint8)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("square matrix required")
    if a.shape[0] > RYSER_LIMIT:
        raise SizeGuard(f"Ryser is limited to n <= {RYSER_LIMIT}")
    return int(kernels.permanent01(a))


def count_row_extensions(rect: LatinRectangle) -> int:
    """Ways to append one row: the permanent of the availability matrix."""
    if rect.k >= rect.n:
        raise ValueError("rectangle is already a square")
    return permanent(availability_matrix(rect))


def extension_bounds(rect: LatinRectangle) -> tuple[float, float]:
    """(Bregman upper, Egorychev-Falikman lower) bounds on the extension count.

    With d = n - k every row and column of the availability matrix sums to
    d, so the upper bound is (d!)^(n/d) and the lower bound n! (d/n)^n.
    """
    n, k = rect.n, rect.k
    if k >= n:
        raise ValueError("rectangle is already a square")
    d = n - k
    if n <= 150:
        # direct products keep integer cases exact (d = 1 gives 1.0)
        return float(math.factorial(d)) ** (n / d), math.factorial(n) * (d / n) ** n
    log_upper = (n / d) * math.lgamma(d + 1)
    log_lower = math.lgamma(n + 1) + n * math.log(d / n)
    return math.exp(log_upper), math.exp(log_lower)


def _greedy_row(avail: np.ndarray, gen: np.random.Generator) -> np.ndarray:
    from scipy.optimize import linear_sum_assignment

    n = avail.shape[0]
    # random tie-breaking weights keep the assignment spread out; any
    # zero-cost assignment is a perfect matching of the availability graph
    cost = np.where(avail > 0, gen.random((n, n)), n + 1.0)
    rows, cols = linear_sum_assignment(cost)
    if np.any(avail[rows, cols] == 0):
        raise CompletionFailed("availability graph has no perfect matching")
    out = np.empty(n, dtype=np.int16)
    out[rows] = cols
    return out


def random_completion(rect: LatinRectangle, rng, method: str = "auto") -> LatinSquare:
    """Complete ``rect`` row by row.

    ``method="exact"`` draws each new row uniformly among all rows that fit
    (weights from the matching-count table, n <= 20). ``"greedy"`` uses a
    randomised assignment; it always succeeds but is not uniform.
    ``"auto"`` picks exact when allowed. The square as a whole is not
    uniform over completions in either mode.
    """
    n = rect.n
    if method == "auto":
        method = "exact" if n <= MATCHING_DP_LIMIT else "greedy"
    if method == "exact" and n > MATCHING_DP_LIMIT:
        raise SizeGuard(f"exact row sampling is limited to n <= {MATCHING_DP_LIMIT}")
    bitgen = _bitgen(rng)
    gen = rng if isinstance(rng, np.random.Generator) else np.random.Generator(bitgen)
    cells = np.empty((n, n), dtype=np.int16)
    cells[: rect.k] = rect.cells
    avail = availability_matrix(rect)
    for r in range(rect.k, n):
        if method == "exact":
            row = kernels.sample_matching(np.ascontiguousarray(avail), bitgen)
            if row is None:
                raise CompletionFailed(f"no way to add row {r}")
        else:
            row = _greedy_row(avail, gen)
        cells[r] = row
        avail[np.arange(n), row] = 0
    return LatinSquare._trusted(cells)


def sample_rectangle(k: int, n: int, rng, mode: str = "exact-tiny", **jm_kwargs) -> LatinRectangle:
    """A random k x n Latin rectangle.

    ``exact-tiny`` is uniform over the enumerated list; ``square-prefix``
    takes the first k rows of a Jacobson-Matthews sample, which is uniform
    only up to the measure change between rectangles and square prefixes.
    """
    if mode == "exact-tiny":
        _rect_guard(k, n)
        total = count_rectangles(k, n)
        idx = int(kernels.bounded(_bitgen(rng), total))
        return LatinRectangle._trusted(_rectangle_at(k, n, idx))
    if mode == "square-prefix":
        sq = next(jm_sample(n, 1, rng, **jm_kwargs))
        return sq.prefix(k)
    raise ValueError(f"unknown mode {mode!r}")


_RECT_CACHE: dict = {}


def _rectangle_at(k, n, idx):
    key = (k, n)
    if key not in _RECT_CACHE:
        if len(_RECT_CACHE) > 8:
            _RECT_CACHE.clear()
        _RECT_CACHE[key] = rectangle_array(k, n)
    return _RECT_CACHE[key][idx]


def prefix_probabilities(n: int, k: int) -> dict[bytes, float]:
    """Exact Pr(first k rows = Q) under the uniform square, for n <= 5."""
    squares = square_array(n)
    keys, counts = np.unique(squares[:, :k].reshape(len(squares), -1), axis=0, return_counts=True)
    return {key.astype(np.int16).tobytes(): c / len(squares) for key, c in zip(keys, counts)}


def measure_change_ratio(n: int, k: int) -> float:
    """max/min of Pr(first k rows = Q) over all k-row rectangles Q."""
    probs = list(prefix_probabilities(n, k).values())
    if count_rectangles(k, n) != len(probs):
        return math.inf
    return max(probs) / min(probs)


def subset_probability(k: int, n: int, entries) -> float:
    """Exact Pr(all ``entries`` (r, c, s) appear) in a uniform k x n rectangle."""
    fixed = np.full((k, n), -1, dtype=np.int16)
    for r, c, s in entries:
        if fixed[r, c] not in (-1, s):
            return 0.0
        fixed[r, c] = s
    return count_rectangles(k, n, fixed) / count_rectangles(k, n)


def godsil_mckay_constant(k: int, n: int, entries) -> float:
    """Implied constant C in Pr = ((1 + C k/(n - 2k - D)) / n)^|P|.

    ``D`` is the largest number of entries in one row.
    """
    entries = list(entries)
    p = subset_probability(k, n, entries)
    rows = [r for r, _, _ in entries]
    delta = max((rows.count(r) for r in set(rows)), default=0)
    slack = n - 2 * k - delta
    base = n * p ** (1 / len(entries)) - 1
    return base * slack / k


def square_from_rows(rows) -> LatinSquare:
    return validate(rows, "square")

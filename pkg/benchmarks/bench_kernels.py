"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Both backends receive identical inputs and identical Philox streams, so
their outputs are also compared.
"""

import argparse
import time

import numpy as np

from latinlab import _pykernels
from latinlab.sampling import JmState, cyclic_start, make_rng

try:
    from latinlab import _ckernels
except ImportError:
    _ckernels = None


def _jm(mod, n=12, samples=20):
    cube = np.array(JmState.from_square(cyclic_start(n)).cube, order="C")
    imp = np.full(3, -1, dtype=np.int64)
    out = np.empty((samples, n, n), dtype=np.int16)
    mod.jm_chain(cube, imp, n**3, n**2, samples, out, True, make_rng(1).bit_generator)
    return out


def _squares(n=20, count=200):
    from latinlab.sampling import jm_sample_array

    return jm_sample_array(n, count, make_rng(2), burnin=2000, thin=50)


def _trp(mod, n=30):
    m = int(0.3 * n * n)
    triples = np.zeros((m, 3), dtype=np.int32)
    counts = np.zeros(m + 1, dtype=np.int64)
    mod.trp(n, m, make_rng(3).bit_generator, triples, counts)
    return triples


def _backtrack(mod, k=4, n=4):
    fixed = np.full((k, n), -1, dtype=np.int16)
    return mod.backtrack(k, n, fixed, None)


def cases():
    squares = _squares()
    mat = np.ascontiguousarray(np.random.default_rng(4).random((14, 14)) < 0.6, dtype=np.uint8)
    return {
        "jm_chain n=12, 20 samples": _jm,
        "grid_count_many 200 x n=20": lambda m: m.grid_count_many(squares),
        "order3_count 200 x n=20": lambda m: [m.order3_count(g) for g in squares],
        "permanent01 14 x 14": lambda m: m.permanent01(mat),
        "count_matchings 14 x 14": lambda m: m.count_matchings(mat),
        "trp n=30, m=270": _trp,
        "backtrack 4 x 4": _backtrack,
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        result = fn()
        times.append(time.perf_counter() - t)
    return min(times), result


def same(a, b):
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    return a == b


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    if _ckernels is None:
        print("compiled kernels not built; only the fallback is available")
    print(f"{'kernel':30s} {'python':>10s} {'cython':>10s} {'speedup':>9s}  agree")
    for name, fn in cases().items():
        tp, rp = best_of(lambda: fn(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:30s} {tp:10.4f}")
            continue
        tc, rc = best_of(lambda: fn(_ckernels), args.repeat)
        print(f"{name:30s} {tp:10.4f} {tc:10.4f} {tp / tc:8.1f}x  {same(rp, rc)}")


if __name__ == "__main__":
    main()

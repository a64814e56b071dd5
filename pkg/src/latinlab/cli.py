"""Command-line entry point: ``latinlab <verb> ...``."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from latinlab import constructions, counting, decompose, harness, sampling, switching, trp
from latinlab._backend import BACKEND
from latinlab.core import LatinError, LatinRectangle, LatinSquare, decode, encode


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _read(path: str, fmt: str, ordered: bool = False):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    if fmt == "auto":
        fmt = "json" if text.lstrip().startswith("{") else "grid"
    return decode(text, fmt, ordered)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_sample(args):
    squares = list(
        sampling.jm_sample(args.n, args.samples, sampling.make_rng(args.seed), burnin=args.burnin, thin=args.thin)
    )
    if args.format == "json":
        _emit(args, _dump({"schema": harness.SCHEMA, "n": args.n, "seed": args.seed,
                           "squares": [(sq.cells + 1).tolist() for sq in squares]}))
    else:
        _emit(args, "\n".join(encode(sq, "grid") for sq in squares))


def cmd_count(args):
    x = _read(args.input, args.input_format)
    doc = {"schema": harness.SCHEMA, "N": counting.count_intercalates(x)}
    if args.stats:
        st = counting.intercalate_stats(x)
        doc.update(N2=st.N2, Nprime=st.Nprime, Nprime_exact=st.exact)
    if isinstance(x, LatinSquare):
        doc["order3"] = counting.count_order3_subsquares(x)
    _emit(args, _dump(doc))


def cmd_enumerate(args):
    k = args.n if args.k is None else args.k
    if k == args.n:
        arr = sampling.square_array(args.n)
    else:
        arr = sampling.rectangle_array(k, args.n)
    if args.list:
        cls = LatinSquare if k == args.n else LatinRectangle
        _emit(args, "\n".join(encode(cls._trusted(c), "grid") for c in arr))
    else:
        _emit(args, _dump({"schema": harness.SCHEMA, "k": k, "n": args.n, "count": len(arr)}))


def cmd_trp(args):
    m = args.m if args.m is not None else int(args.density * args.n**2)
    out = trp.trp_run(args.n, m, sampling.make_rng(args.seed), record_trace=args.trace)
    if args.trace:
        _emit(args, out.trace.to_csv(args.h))
        return
    doc = {"schema": harness.SCHEMA, "n": args.n, "m": m, "seed": args.seed, "star": out.is_star,
           "steps": out.steps}
    if not out.is_star:
        doc["triples"] = [[r + 1, c + 1, s + 1] for r, c, s in out.partial.sequence]
    _emit(args, _dump(doc))


def cmd_gstar(args):
    rep = harness.gstar_experiment(args.n, args.alpha, args.samples, args.seed, workers=args.workers)
    _emit(args, rep.histogram_csv() if args.format == "csv" else rep.to_json() + "\n")


def cmd_switchings(args):
    rect = _read(args.rect, args.input_format)
    rep = switching.switching_effect_report(rect, args.restrict_rows)
    _emit(args, rep.to_csv())


def _read_edges(path: str) -> decompose.Hypergraph3:
    edges = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            edges.append(tuple(int(tok) for tok in line.split()))
    vertices = 1 + max((max(e) for e in edges), default=-1)
    return decompose.Hypergraph3(vertices, tuple(edges))


def cmd_decompose(args):
    h = _read_edges(args.edges)
    parts = decompose.star_matching_partition(h, args.r)
    _emit(args, decompose.parts_to_json(h, parts) + "\n")


def cmd_construct(args):
    if args.boolean is not None:
        sq = constructions.boolean_group_square(args.boolean)
    elif args.cyclic is not None:
        sq = constructions.cyclic_square(args.cyclic)
    else:
        sq = constructions.search_intercalate_free(args.intercalate_free)
        if sq is None:
            print(f"no intercalate-free square of order {args.intercalate_free}", file=sys.stderr)
            return 1
    # json is the shared default; a square reads best as a grid
    _emit(args, encode(sq, args.format if args.format in ("grid", "triples") else "grid"))


def cmd_experiment(args):
    rep = harness.mc_distribution(args.n, args.sampler, args.samples, args.seed, burnin=args.burnin,
                                  thin=args.thin, statistic=args.statistic, workers=args.workers)
    values = [k for k, c in rep.histogram.items() for _ in range(c)]
    for item in args.tail:
        direction, delta = item.split(":")
        rep.tails[item] = harness.tail_from_values(values, args.n, direction, float(delta)).to_dict()
    _emit(args, rep.histogram_csv() if args.format == "csv" else rep.to_json() + "\n")


def cmd_bounds(args):
    if args.freedman:
        k, n, p, t = args.freedman
        value = harness.freedman_bound(harness.FreedmanParams(k, int(n), p, t))
        _emit(args, _dump({"schema": harness.SCHEMA, "freedman": value}))
        return
    rect = _read(args.rect, args.input_format)
    upper, lower = sampling.extension_bounds(rect)
    exact = sampling.count_row_extensions(rect) if rect.n <= sampling.RYSER_LIMIT else None
    _emit(args, _dump({"schema": harness.SCHEMA, "k": rect.k, "n": rect.n, "bregman_upper": upper,
                       "evf_lower": lower, "exact": exact}))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="write here instead of stdout")
    common.add_argument("--format", default="json", choices=["json", "csv", "grid", "triples"])
    common.add_argument("--input-format", default="auto", choices=["auto", "grid", "json", "triples"])

    p = argparse.ArgumentParser(prog="latinlab", description="Random Latin squares and intercalates.")
    p.add_argument("--version", action="version", version=f"latinlab ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("sample", parents=[common], help="Jacobson-Matthews samples")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--samples", type=int, default=1)
    s.add_argument("--burnin", type=int)
    s.add_argument("--thin", type=int)
    s.set_defaults(func=cmd_sample)

    s = sub.add_parser("count", parents=[common], help="intercalate statistics of a square")
    s.add_argument("input", help="file, or - for stdin")
    s.add_argument("--stats", action="store_true", help="also N2 and the disjoint family size")
    s.set_defaults(func=cmd_count)

    s = sub.add_parser("enumerate", parents=[common], help="all squares or rectangles of a small size")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", type=int)
    s.add_argument("--list", action="store_true", help="print them instead of the count")
    s.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("trp", parents=[common], help="triangle removal process")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int)
    s.add_argument("--density", type=float, default=0.3, help="m = density * n^2 when --m is absent")
    s.add_argument("--trace", action="store_true", help="per-step CSV")
    s.add_argument("--h", type=int, default=2)
    s.set_defaults(func=cmd_trp)

    s = sub.add_parser("gstar", parents=[common], help="pruned binomial model")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--alpha", type=float, required=True)
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_gstar)

    s = sub.add_parser("switchings", parents=[common], help="switching effects on a rectangle")
    s.add_argument("--rect", required=True)
    s.add_argument("--restrict-rows", type=int)
    s.set_defaults(func=cmd_switchings)

    s = sub.add_parser("decompose", parents=[common], help="star/matching partition")
    s.add_argument("--edges", required=True, help="one edge per line: three vertex ids")
    s.add_argument("--r", type=int, required=True)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("construct", parents=[common], help="structured squares")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--boolean", type=int, metavar="Q")
    g.add_argument("--cyclic", type=int, metavar="M")
    g.add_argument("--intercalate-free", type=int, metavar="N")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("experiment", parents=[common], help="distribution of N")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--sampler", default="jm", choices=["jm", "exhaustive"])
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--burnin", type=int)
    s.add_argument("--thin", type=int)
    s.add_argument("--statistic", default="N", choices=["N", "order3"])
    s.add_argument("--tail", action="append", default=[], metavar="DIR:DELTA",
                   help="e.g. lower:0.5 or upper:0.5; repeatable")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("bounds", parents=[common], help="extension-count bounds or Freedman's bound")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--rect")
    g.add_argument("--freedman", nargs=4, type=float, metavar=("K", "N", "P", "T"))
    s.set_defaults(func=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args) or 0
    except LatinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Random Latin squares: intercalates, Jacobson-Matthews sampling, triangle
removal, switchings and star/matching decompositions."""

from latinlab._backend import BACKEND
from latinlab.core import (
    Intercalate,
    LatinError,
    LatinRectangle,
    LatinSquare,
    OrderedTripleSet,
    TripleSet,
    decode,
    encode,
    grid_view,
    rectangle,
    square,
    triple_view,
    validate,
)
from latinlab.counting import (
    count_intercalates,
    count_order3_subsquares,
    enumerate_intercalates,
    intercalate_stats,
    max_disjoint_family,
    shared_edge_pairs,
)
from latinlab.sampling import jm_sample, make_rng, random_completion

__all__ = [
    "BACKEND",
    "Intercalate",
    "LatinError",
    "LatinRectangle",
    "LatinSquare",
    "OrderedTripleSet",
    "TripleSet",
    "count_intercalates",
    "count_order3_subsquares",
    "decode",
    "encode",
    "enumerate_intercalates",
    "grid_view",
    "intercalate_stats",
    "jm_sample",
    "make_rng",
    "max_disjoint_family",
    "random_completion",
    "rectangle",
    "shared_edge_pairs",
    "square",
    "triple_view",
    "validate",
]

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from latinlab.core import LatinSquare, square
from latinlab.sampling import jm_sample_array, make_rng

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIG1_ROWS = [
    [4, 1, 5, 3, 2],
    [5, 3, 2, 1, 4],
    [2, 4, 1, 5, 3],
    [3, 5, 4, 2, 1],
    [1, 2, 3, 4, 5],
]


@pytest.fixture
def fig1():
    return square(FIG1_ROWS)


@st.composite
def latin_squares(draw, min_n=1, max_n=8):
    """Random squares: a JM sample, isotoped by random permutations."""
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    cells = jm_sample_array(n, 1, make_rng(seed), burnin=4 * n**2)[0]
    rp = np.array(draw(st.permutations(range(n))), dtype=np.int64)
    cp = np.array(draw(st.permutations(range(n))), dtype=np.int64)
    sp = np.array(draw(st.permutations(range(n))), dtype=np.int64)
    return LatinSquare._trusted(sp[cells[rp][:, cp]])


@st.composite
def latin_rectangles(draw, min_n=1, max_n=8):
    sq = draw(latin_squares(min_n, max_n))
    k = draw(st.integers(0, sq.n))
    return sq.prefix(k)


# acceptance criteria record their verdicts here; printed after the run
ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import CRITERIA

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num, title in CRITERIA.items():
        verdict, detail = ACCEPTANCE.get(num, ("NOT RUN", "deselected"))
        terminalreporter.write_line(f"criterion {num:2d} {verdict:8s} {title}: {detail}")

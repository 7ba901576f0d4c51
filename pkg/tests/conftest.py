from fractions import Fraction

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from boundarystab import linalg
from boundarystab.tensor import BoundaryTensor, Format

settings.register_profile("default", deadline=None, max_examples=25,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_FORMATS = [(2, 1, 1), (3, 1, 2), (4, 2, 2), (3, 1, 1, 1)]
IDENTITY_FORMATS = [(2, 1, 1), (3, 1, 2), (3, 1, 1, 1), (4, 2, 2), (4, 1, 1, 2), (6, 2, 2, 2)]

small_ints = st.integers(-9, 9)
rationals = st.fractions(min_value=-9, max_value=9, max_denominator=7)


def rational_matrix(rows, cols, elements=small_ints):
    return st.lists(elements, min_size=rows * cols, max_size=rows * cols).map(
        lambda v: linalg.as_exact(np.array(v, dtype=object).reshape(rows, cols)))


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(1, max_rows))
    c = draw(st.integers(1, max_cols))
    return draw(rational_matrix(r, c, rationals))


@st.composite
def rational_tensors(draw, formats=SMALL_FORMATS):
    k = draw(st.sampled_from(formats))
    fmt = Format(k)
    vals = draw(st.lists(small_ints, min_size=int(np.prod(fmt.dims)), max_size=int(np.prod(fmt.dims))))
    return BoundaryTensor(fmt, linalg.as_exact(np.array(vals, dtype=object).reshape(fmt.dims)))


def frac_vec(*vals):
    return np.array([Fraction(v) for v in vals], dtype=object)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criteria: number -> (passed, title, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d} {'PASS' if ok else 'FAIL'}  {title}  {detail}")

import os

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from tsrkit.synth import generate

settings.register_profile("default", max_examples=60, deadline=None)
settings.register_profile("thorough", max_examples=1000, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@st.composite
def synth_tables(draw, max_rows=8, max_cols=8, max_merge=0.3, max_empty=0.3, max_jitter=5.0):
    seed = draw(st.integers(0, 2**32))
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    merge = draw(st.floats(0, max_merge))
    empty = draw(st.floats(0, max_empty))
    jitter = draw(st.floats(0, max_jitter))
    return generate(seed, rows, cols, merge, empty, jitter)


def spans_of(t):
    return [c.spans.as_tuple() for c in t.cells]


@pytest.fixture
def abc_table():
    """A at (0,0), B at (0,1), C spanning both columns of row 1."""
    from tsrkit.model import table_from_spans
    return table_from_spans([(0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 1)])


@pytest.fixture
def grid2x2():
    from tsrkit.model import table_from_spans
    return table_from_spans([(0, 0, 0, 0), (0, 0, 1, 1), (1, 1, 0, 0), (1, 1, 1, 1)])

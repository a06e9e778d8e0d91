import hypothesis.strategies as st
import pytest

from rotavg import ALL_OPS, PowerMatrix, ValueCache, enumerate_power_matrices, selection_rule


@st.composite
def power_matrices(draw, max_rank=6):
    """Random exponent matrices built by dropping rank-many factors into cells."""
    n = draw(st.integers(min_value=0, max_value=max_rank))
    cells = draw(st.lists(st.integers(0, 8), min_size=n, max_size=n))
    flat = [0] * 9
    for c in cells:
        flat[c] += 1
    return PowerMatrix.from_flat(flat)


symmetry_ops = st.sampled_from(ALL_OPS)


def _selection_passing(max_rank):
    out = []
    for n in range(max_rank + 1):
        out.extend(chi for chi in enumerate_power_matrices(n) if selection_rule(chi))
    return out


# every selection-rule-passing matrix of rank <= 6; cheap to precompute and
# avoids filter-heavy hypothesis strategies
SELECTION_PASSING_6 = _selection_passing(6)

selection_passing = st.sampled_from(SELECTION_PASSING_6)


@pytest.fixture(scope="session")
def cache():
    """One evaluator cache shared across the whole test session."""
    return ValueCache()

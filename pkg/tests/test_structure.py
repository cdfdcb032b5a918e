import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import spans_of, synth_tables
from oracles import brute_adjacency
from tsrkit.model import (AdjacencyMatrices, BBox, CellBox, DimensionMismatchError,
                          InsufficientCellsError, NonSymmetricError, SpanIndices, table_from_spans)
from tsrkit.structure import (adjacency_to_spans, check_consistency, compact_spans,
                              sample_pairs, spans_to_adjacency)
from tsrkit.synth import generate


def _pairs(m):
    n = len(m)
    return {(i, j) for i in range(n) for j in range(i + 1, n) if m[i][j]}


def test_abc_adjacency(abc_table):
    adj = spans_to_adjacency(abc_table)
    row, col = brute_adjacency(spans_of(abc_table))
    assert _pairs(adj.row) == _pairs(row) == {(0, 1)}
    assert _pairs(adj.col) == _pairs(col) == {(0, 2), (1, 2)}


def test_single_cell_adjacency():
    adj = spans_to_adjacency(table_from_spans([(0, 0, 0, 0)]))
    assert adj.row.tolist() == [[1]] and adj.col.tolist() == [[1]]


def test_grid_adjacency(grid2x2):
    adj = spans_to_adjacency(grid2x2)
    assert _pairs(adj.row) == {(0, 1), (2, 3)}
    assert _pairs(adj.col) == {(0, 2), (1, 3)}


@given(synth_tables())
def test_adjacency_matches_grid_occupancy(t):
    adj = spans_to_adjacency(t)
    row, col = brute_adjacency(spans_of(t))
    assert adj.row.tolist() == row and adj.col.tolist() == col
    assert np.array_equal(adj.row, adj.row.T) and np.all(np.diag(adj.row) == 1)
    assert np.array_equal(adj.col, adj.col.T) and np.all(np.diag(adj.col) == 1)


def test_roundtrip_grid(grid2x2):
    back = adjacency_to_spans(grid2x2.without_spans().cells, spans_to_adjacency(grid2x2))
    assert spans_of(back) == spans_of(grid2x2)


def test_single_cell_spans():
    cell = CellBox(0, BBox(0, 0, 5, 5))
    out = adjacency_to_spans([cell], AdjacencyMatrices([[1]], [[1]]))
    assert out.cells[0].spans == SpanIndices(0, 0, 0, 0)


def test_abc_spans(abc_table):
    out = adjacency_to_spans(abc_table.without_spans().cells, spans_to_adjacency(abc_table))
    assert out.cells[2].spans == SpanIndices(1, 1, 0, 1)
    assert spans_of(out) == spans_of(abc_table)


def test_spanning_cell_sorted_first():
    # tall cell on the left is first in top-edge order; it must not glue rows together
    t = table_from_spans([(0, 2, 0, 0), (0, 0, 1, 1), (1, 1, 1, 1), (2, 2, 1, 1)])
    out = adjacency_to_spans(t.without_spans().cells, spans_to_adjacency(t))
    assert spans_of(out) == spans_of(t)


@given(synth_tables(max_rows=10, max_cols=10))
def test_roundtrip_property(t):
    back = adjacency_to_spans(t.without_spans().cells, spans_to_adjacency(t))
    assert [c.spans for c in back] == compact_spans([c.spans for c in t])
    assert [c.id for c in back] == [c.id for c in t]


@given(synth_tables())
def test_deterministic(t):
    adj = spans_to_adjacency(t)
    a = adjacency_to_spans(t.without_spans().cells, adj)
    b = adjacency_to_spans(t.without_spans().cells, adj)
    assert a == b


def test_compact_merges_indistinguishable_rows():
    # single column whose only cell spans both rows
    assert compact_spans([SpanIndices(0, 1, 0, 0)]) == [SpanIndices(0, 0, 0, 0)]
    spans = [SpanIndices(0, 0, 0, 0), SpanIndices(2, 3, 1, 1), SpanIndices(2, 3, 0, 0)]
    assert compact_spans(spans) == [SpanIndices(0, 0, 0, 0), SpanIndices(1, 1, 1, 1),
                                    SpanIndices(1, 1, 0, 0)]


def test_errors():
    cells = [CellBox(0, BBox(0, 0, 1, 1)), CellBox(1, BBox(1, 0, 2, 1))]
    with pytest.raises(DimensionMismatchError):
        adjacency_to_spans(cells, AdjacencyMatrices(np.eye(3), np.eye(3)))
    bad = np.array([[1, 1], [0, 1]])
    with pytest.raises(NonSymmetricError):
        adjacency_to_spans(cells, AdjacencyMatrices(bad, np.eye(2)))


@given(synth_tables())
def test_generator_output_is_consistent(t):
    report = check_consistency(spans_to_adjacency(t), t.cells)
    assert report.consistent and report.row_diffs == [] and report.col_diffs == []


def test_all_ones_consistent():
    ones = np.ones((4, 4), dtype=int)
    assert check_consistency(AdjacencyMatrices(ones, ones)).consistent


def test_path_is_interval_representable():
    # 0-1, 1-2 but not 0-2: cell 1 spans two rows, so no pair changes
    m = np.array([[1, 1, 0], [1, 1, 1], [0, 1, 1]])
    cells = [CellBox(0, BBox(0, 0, 10, 10)), CellBox(1, BBox(10, 0, 20, 20)),
             CellBox(2, BBox(0, 10, 10, 20))]
    assert check_consistency(AdjacencyMatrices(m, np.eye(3)), cells).row_consistent


def test_four_cycle_is_flagged():
    # 0-1-2-3-0 has no interval representation
    m = np.array([[1, 1, 0, 1], [1, 1, 1, 0], [0, 1, 1, 1], [1, 0, 1, 1]])
    report = check_consistency(AdjacencyMatrices(m, np.eye(4)))
    assert not report.row_consistent
    assert report.col_consistent
    assert report.row_diffs
    assert all(i < j for i, j in report.row_diffs)


def test_sample_zero():
    assert sample_pairs(spans_to_adjacency(generate(0, 2, 2)), 0, seed=1) == []


def test_sample_single_class():
    n = 5
    adj = AdjacencyMatrices(np.ones((n, n)), np.eye(n))
    draws = sample_pairs(adj, 50, seed=3)
    assert len(draws) == 50
    assert all(r == 1 and c == 0 for _, _, r, c in draws)


def test_sample_balances_rare_class():
    # 10 cells, 5 row-positive pairs out of 45
    n = 10
    row = np.eye(n, dtype=int)
    for i in range(0, 10, 2):
        row[i, i + 1] = row[i + 1, i] = 1
    adj = AdjacencyMatrices(row, np.eye(n))
    draws = sample_pairs(adj, 1000, seed=11)
    frac = sum(r for _, _, r, _ in draws) / len(draws)
    assert 0.45 <= frac <= 0.55
    assert all(i < j and row[i, j] == r for i, j, r, _ in draws)
    # the five positives are used up before any repeats
    first_pos = [(i, j) for i, j, r, _ in draws if r][:5]
    assert len(set(first_pos)) == 5


def test_sample_reaches_every_stratum():
    t = generate(4, 5, 5)
    draws = sample_pairs(spans_to_adjacency(t), 4000, seed=2)
    share = {key: sum((d[2], d[3]) == key for d in draws) / len(draws)
             for key in ((1, 0), (0, 1), (0, 0))}
    # a plain grid has no (1, 1) pairs: rows split 1/2, row negatives split by column label
    assert 0.47 <= share[(1, 0)] <= 0.53
    assert 0.22 <= share[(0, 1)] <= 0.28
    assert 0.22 <= share[(0, 0)] <= 0.28


@given(synth_tables(max_rows=5, max_cols=5), st.integers(0, 2**40), st.integers(0, 200))
def test_sample_reproducible(t, seed, k):
    if t.n_cells < 2:
        return
    adj = spans_to_adjacency(t)
    a = sample_pairs(adj, k, seed)
    assert a == sample_pairs(adj, k, seed)
    assert len(a) == k
    for i, j, r, c in a:
        assert i < j and adj.row[i, j] == r and adj.col[i, j] == c


def test_sample_needs_two_cells():
    with pytest.raises(InsufficientCellsError):
        sample_pairs(AdjacencyMatrices([[1]], [[1]]), 1, seed=0)

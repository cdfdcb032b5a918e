"""Conversions between cell spans and row/column adjacency matrices.

``adjacency_to_spans`` is the post-processing step that turns predicted cells
plus predicted matrices into spanning indices. Cells are visited in order of
their top edge (left edge for columns). Each cell that has no row index yet
opens a fresh index ``k``; ``k`` is handed to the seed and then, visiting the
remaining cells in the same order, to every cell connected to the seed *and*
to all cells already holding ``k``. A cell's start/end row is the min/max of the
indices it collected. On tables without spanning cells this is plain
propagation to the seed's neighbours; the mutual-connection condition keeps a
spanning seed from pulling cells of different rows into one index.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .model import (AdjacencyMatrices, BBox, CellBox,
                    InsufficientCellsError, SpanIndices, TableAnnotation,
                    require_valid)
from .rng import SplitMix64


def _interval_overlap(start: np.ndarray, end: np.ndarray) -> np.ndarray:
    return ((start[:, None] <= end[None, :]) & (start[None, :] <= end[:, None])).astype(np.uint8)


def _adjacency(t: TableAnnotation) -> AdjacencyMatrices:
    s = np.array([c.spans.as_tuple() for c in t.cells], dtype=int).reshape(-1, 4)
    return AdjacencyMatrices(_interval_overlap(s[:, 0], s[:, 1]),
                             _interval_overlap(s[:, 2], s[:, 3]))


def spans_to_adjacency(t: TableAnnotation) -> AdjacencyMatrices:
    """Cells share a row (column) when their row (column) intervals intersect."""
    t.require_spans()
    require_valid(t)
    return _adjacency(t)


def _belonging_lists(order: Sequence[int], m: np.ndarray) -> list[list[int]]:
    lists: list[list[int]] = [[] for _ in order]
    k = 0
    for seed in order:
        if lists[seed]:
            continue
        members = [seed]
        for d in order:
            if d != seed and m[seed, d] and all(m[d, e] for e in members):
                members.append(d)
        for d in members:
            lists[d].append(k)
        k += 1
    return lists


def adjacency_to_spans(cells: Sequence[CellBox], adj: AdjacencyMatrices) -> TableAnnotation:
    """Assign spanning indices to ``cells`` from their row/column matrices.

    Sorting ties on the top edge are broken by the left edge, then by cell id
    (symmetrically for columns). Inconsistent matrices are processed as-is.
    """
    cells = list(cells)
    adj.check(len(cells))
    idx = range(len(cells))
    row_order = sorted(idx, key=lambda i: (cells[i].bbox.y1, cells[i].bbox.x1, cells[i].id))
    col_order = sorted(idx, key=lambda i: (cells[i].bbox.x1, cells[i].bbox.y1, cells[i].id))
    rows = _belonging_lists(row_order, adj.row)
    cols = _belonging_lists(col_order, adj.col)
    return TableAnnotation(
        c.with_spans(SpanIndices(min(r), max(r), min(k), max(k)))
        for c, r, k in zip(cells, rows, cols)
    )


def _compact_axis(intervals: list[tuple[int, int]]) -> dict[int, int]:
    top = max((e for _, e in intervals), default=-1)
    covers = [frozenset(i for i, (s, e) in enumerate(intervals) if s <= r <= e)
              for r in range(top + 1)]
    mapping, new, prev = {}, -1, None
    for r, cover in enumerate(covers):
        if not cover:
            continue
        if cover != prev:
            new += 1
            prev = cover
        mapping[r] = new
    return mapping


def compact_spans(spans: Sequence[SpanIndices]) -> list[SpanIndices]:
    """Order-preserving renumbering of row and column indices.

    Unused indices are dropped and neighbouring indices covered by exactly the
    same cells are merged, since no adjacency matrix can tell them apart.
    """
    rmap = _compact_axis([(s.sr, s.er) for s in spans])
    cmap = _compact_axis([(s.sc, s.ec) for s in spans])
    return [SpanIndices(rmap[s.sr], rmap[s.er], cmap[s.sc], cmap[s.ec]) for s in spans]


@dataclass(frozen=True)
class ConsistencyReport:
    row_diffs: list = field(default_factory=list)
    col_diffs: list = field(default_factory=list)

    @property
    def row_consistent(self) -> bool:
        return not self.row_diffs

    @property
    def col_consistent(self) -> bool:
        return not self.col_diffs

    @property
    def consistent(self) -> bool:
        return self.row_consistent and self.col_consistent


def _diff_pairs(a: np.ndarray, b: np.ndarray) -> list[tuple[int, int]]:
    ii, jj = np.nonzero(np.triu(a != b, k=1))
    return [(int(i), int(j)) for i, j in zip(ii, jj)]


def check_consistency(adj: AdjacencyMatrices,
                      cells: Optional[Sequence[CellBox]] = None) -> ConsistencyReport:
    """Round-trip the matrices through span assignment and list pairs whose entry changed.

    Without ``cells`` the matrix index order stands in for geometric order.
    """
    adj.check()
    if cells is None:
        cells = [CellBox(i, BBox(i, i, i + 1, i + 1)) for i in range(adj.n)]
    back = _adjacency(adjacency_to_spans(cells, adj))
    return ConsistencyReport(_diff_pairs(adj.row, back.row), _diff_pairs(adj.col, back.col))


_STRATA = ((0, 0), (0, 1), (1, 0), (1, 1))


def _stratum_weights(counts: dict) -> dict:
    """Half the mass per row label present, then an equal split over the column labels inside it.

    Exact balance of both marginals would force p(1,1) = p(0,0); distinct cells
    never share a row and a column, so that would starve the (0,0) pairs.
    """
    present = [s for s in _STRATA if counts.get(s)]
    row_labels = sorted({s[0] for s in present})
    w = {}
    for r in row_labels:
        inner = [s for s in present if s[0] == r]
        for s in inner:
            w[s] = 1.0 / (len(row_labels) * len(inner))
    return w


def sample_pairs(adj: AdjacencyMatrices, k: int, seed: int) -> list[tuple[int, int, int, int]]:
    """Draw ``k`` class-balanced cell pairs ``(i, j, row_label, col_label)`` with ``i < j``.

    Pairs are bucketed by their (row, column) labels. Row positives and
    negatives are equally likely when both exist; within each row class the
    column labels present are equally likely. Every non-empty bucket is drawn
    from with positive probability. Inside a
    bucket, pairs are drawn without replacement until it runs dry, then with
    replacement. Uses :class:`~tsrkit.rng.SplitMix64`, so results are bitwise
    reproducible for a seed.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    adj.check()
    if k == 0:
        return []
    n = adj.n
    if n < 2:
        raise InsufficientCellsError(f"need at least 2 cells to sample pairs, got {n}")
    buckets = {s: [] for s in _STRATA}
    for i in range(n):
        for j in range(i + 1, n):
            buckets[(int(adj.row[i, j]), int(adj.col[i, j]))].append((i, j))
    weights = _stratum_weights({s: len(p) for s, p in buckets.items()})
    strata = [s for s in _STRATA if s in weights]
    cum, acc = [], 0.0
    for s in strata:
        acc += weights[s]
        cum.append(acc)
    remaining = {s: list(buckets[s]) for s in strata}
    rng = SplitMix64(seed)
    out = []
    for _ in range(k):
        u = rng.uniform() * acc
        s = next((s for s, c in zip(strata, cum) if u < c), strata[-1])
        pool = remaining[s]
        if pool:
            pos = rng.below(len(pool))
            pool[pos], pool[-1] = pool[-1], pool[pos]
            i, j = pool.pop()
        else:
            i, j = buckets[s][rng.below(len(buckets[s]))]
        out.append((i, j, s[0], s[1]))
    return out

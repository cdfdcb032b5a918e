import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import spans_of, synth_tables
from oracles import grid_scan_relations, optimal_matching_size, raster_iou
from tsrkit.eval_phys import (PRF, cell_prf, generate_relations, iou, match_cells,
                              micro_average, relation_f1, threshold_sweep)
from tsrkit.model import (BBox, CellBox, Direction, SpanIndices, TableAnnotation,
                          table_from_spans)
from tsrkit.synth import corrupt, generate


def _rel_tuples(rs):
    return {(r.from_cell, r.to_cell, r.direction.value) for r in rs}


def test_iou_identical_and_disjoint():
    a = BBox(0, 0, 10, 10)
    assert iou(a, a) == 1.0
    assert iou(a, BBox(20, 20, 30, 30)) == 0.0
    assert iou(a, BBox(10, 0, 20, 10)) == 0.0


def test_iou_half_overlap():
    a, b = BBox(0, 0, 10, 10), BBox(5, 0, 15, 10)
    assert raster_iou(a.as_tuple(), b.as_tuple()) == pytest.approx(1 / 3, abs=1e-12)
    assert iou(a, b) == pytest.approx(1 / 3, abs=1e-15)


@given(st.lists(st.integers(0, 20), min_size=8, max_size=8))
def test_iou_matches_raster(v):
    a = BBox(min(v[0], v[1]), min(v[2], v[3]), max(v[0], v[1]) + 1, max(v[2], v[3]) + 1)
    b = BBox(min(v[4], v[5]), min(v[6], v[7]), max(v[4], v[5]) + 1, max(v[6], v[7]) + 1)
    assert iou(a, b) == pytest.approx(raster_iou(a.as_tuple(), b.as_tuple()), abs=1e-12)
    assert iou(a, b) == iou(b, a)


def test_match_identical(grid2x2):
    m = match_cells(grid2x2, grid2x2, 0.6)
    assert sorted(m.pairs) == [(i, i, 1.0) for i in range(4)]
    assert m.unmatched_pred == [] and m.unmatched_gt == []


def test_match_prefers_higher_iou():
    # pred overlaps gt 10 at 0.7 and gt 11 at 0.6
    pred = TableAnnotation([CellBox(0, BBox(0, 0, 10, 10))])
    gt = TableAnnotation([CellBox(10, BBox(0, 0, 10, 7)), CellBox(11, BBox(0, 0, 6, 10))])
    assert iou(pred.cells[0].bbox, gt.cells[0].bbox) == pytest.approx(0.7)
    assert iou(pred.cells[0].bbox, gt.cells[1].bbox) == pytest.approx(0.6)
    m = match_cells(pred, gt, 0.5)
    assert [(p, g) for p, g, _ in m.pairs] == [(0, 10)]
    assert m.unmatched_gt == [11]
    ious = [[iou(p.bbox, g.bbox) for g in gt] for p in pred]
    assert len(m.pairs) == optimal_matching_size(ious, 0.5)


def test_match_empty_pred(grid2x2):
    m = match_cells(TableAnnotation(), grid2x2, 0.5)
    assert m.pairs == [] and m.unmatched_gt == [0, 1, 2, 3]


@given(synth_tables(max_rows=3, max_cols=3), st.integers(0, 1000), st.floats(0, 0.3),
       st.sampled_from([0.5, 0.6, 0.9]))
def test_match_invariants(t, seed, shift, th):
    pred = corrupt(t, seed, 0.2, shift)
    m = match_cells(pred, t, th)
    assert len({p for p, _, _ in m.pairs}) == len(m.pairs)
    assert len({g for _, g, _ in m.pairs}) == len(m.pairs)
    assert all(v >= th for _, _, v in m.pairs)
    assert len(m.pairs) + len(m.unmatched_pred) == len(pred)
    assert len(m.pairs) + len(m.unmatched_gt) == len(t)


def test_relations_grid(grid2x2):
    rels = generate_relations(grid2x2)
    assert _rel_tuples(rels.of(Direction.HORIZONTAL)) == {(0, 1, "horizontal"), (2, 3, "horizontal")}
    assert _rel_tuples(rels.of(Direction.VERTICAL)) == {(0, 2, "vertical"), (1, 3, "vertical")}


def test_relations_skip_empty_middle():
    t = table_from_spans([(0, 0, 0, 0), (0, 0, 1, 1), (0, 0, 2, 2)], contents=["a", " ", "c"])
    rels = generate_relations(t)
    assert _rel_tuples(rels) == {(0, 2, "horizontal")}
    assert _rel_tuples(rels) == grid_scan_relations([0, 1, 2], spans_of(t), [False, True, False])


def test_relations_single_cell():
    assert len(generate_relations(table_from_spans([(0, 0, 0, 0)]))) == 0


@given(synth_tables(max_empty=0.5))
def test_relations_match_grid_scan(t):
    ids = [c.id for c in t]
    got = _rel_tuples(generate_relations(t))
    assert got == grid_scan_relations(ids, spans_of(t), [c.empty for c in t])
    full = [c for c in t if not c.empty]
    max_span = max((max(c.spans.rowspan, c.spans.colspan) for c in full), default=0)
    assert len(got) <= 2 * len(full) * max_span


def test_all_pairs_mode(grid2x2):
    rels = generate_relations(grid2x2, mode="all-pairs")
    assert _rel_tuples(rels) == {(0, 1, "horizontal"), (2, 3, "horizontal"),
                                 (0, 2, "vertical"), (1, 3, "vertical")}
    t = table_from_spans([(0, 0, 0, 0), (0, 0, 1, 1), (0, 0, 2, 2)])
    assert len(generate_relations(t, mode="all-pairs")) == 3
    assert len(generate_relations(t)) == 2
    with pytest.raises(ValueError):
        generate_relations(t, mode="bogus")


def test_relation_f1_identity(grid2x2):
    s = relation_f1(grid2x2, grid2x2, 0.6)
    assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)


def test_relation_f1_one_missing(grid2x2):
    # cell 3 predicted one row too low: keeps (1,3,v), loses (2,3,h), adds nothing
    moved = grid2x2.cells[3].with_spans(SpanIndices(2, 2, 1, 1))
    pred = TableAnnotation(list(grid2x2.cells[:3]) + [moved])
    s = relation_f1(pred, grid2x2, 0.6)
    assert (s.tp, s.fp, s.fn) == (3, 0, 1)
    assert s.precision == 1.0 and s.recall == 0.75
    assert s.f1 == pytest.approx(6 / 7)


def test_relation_f1_no_pred(grid2x2):
    s = relation_f1(TableAnnotation(), grid2x2, 0.5)
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


def test_prf_zero_denominators():
    s = PRF(0, 0, 0)
    assert (s.precision, s.recall, s.f1) == (0.0, 0.0, 0.0)


@given(synth_tables(max_empty=0.4), st.sampled_from([0.5, 0.6, 0.9, 1.0]))
def test_self_evaluation_identity(t, th):
    s = relation_f1(t, t, th)
    if len(generate_relations(t)):
        assert (s.precision, s.recall, s.f1) == (1.0, 1.0, 1.0)
    assert s.fp == 0 and s.fn == 0


@given(synth_tables(max_empty=0.5), st.integers(0, 999), st.floats(0, 0.15))
def test_blank_cells_do_not_matter(t, seed, shift):
    pred_full = corrupt(t, seed, 0.1, shift)
    pred = TableAnnotation(c.with_spans(t.by_id()[c.id].spans) for c in pred_full)
    strip = lambda x: TableAnnotation(c for c in x if not c.empty)
    assert relation_f1(pred, t, 0.6) == relation_f1(strip(pred), strip(t), 0.6)


@given(synth_tables(max_rows=4, max_cols=4), st.integers(0, 999))
def test_count_symmetry(t, seed):
    pred = TableAnnotation(c.with_spans(t.by_id()[c.id].spans) for c in corrupt(t, seed, 0.3, 0.0))
    a, b = relation_f1(pred, t, 0.6), relation_f1(t, pred, 0.6)
    assert a.fp == b.fn and a.fn == b.fp and a.tp == b.tp


def test_micro_average_pools_counts():
    scores = [PRF(3, 1, 0), PRF(0, 2, 5), PRF(7, 0, 1)]
    pooled = micro_average(scores)
    assert (pooled.tp, pooled.fp, pooled.fn) == (10, 3, 6)
    assert pooled.precision == 10 / 13 and pooled.recall == 10 / 16


def test_sweep_identity(grid2x2):
    for th, cells, rels in threshold_sweep(grid2x2, grid2x2, [0.5, 0.7, 1.0]):
        assert cells.f1 == rels.f1 == 1.0


def test_sweep_shrunk_boxes():
    gt = generate(1, 3, 3)
    # every box shrunk 20% per side length about its centre -> IoU 0.64
    def shrink(b):
        cx, cy, w, h = (b.x1 + b.x2) / 2, (b.y1 + b.y2) / 2, b.width * 0.8, b.height * 0.8
        return BBox(cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)
    pred = TableAnnotation(c.with_bbox(shrink(c.bbox)) for c in gt)
    for p, g in zip(pred, gt):
        assert iou(p.bbox, g.bbox) == pytest.approx(raster_iou(
            p.bbox.as_tuple(), g.bbox.as_tuple(), step=0.5), abs=0.02)
        assert iou(p.bbox, g.bbox) == pytest.approx(0.64)
    (_, lo, _), (_, hi, _) = threshold_sweep(pred, gt, [0.5, 0.9])
    assert lo.tp == 9 and hi.tp == 0


@given(synth_tables(max_rows=5, max_cols=5), st.integers(0, 999), st.floats(0, 0.3))
def test_sweep_tp_non_increasing(t, seed, shift):
    pred = corrupt(t, seed, 0.1, shift)
    tps = [cell_prf(pred, t, th).tp for th in (0.5, 0.6, 0.7, 0.8, 0.9)]
    assert all(a >= b for a, b in zip(tps, tps[1:]))

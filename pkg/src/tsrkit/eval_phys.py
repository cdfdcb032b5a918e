"""Physical-structure evaluation: IoU matching, neighbour relations, precision/recall/F1."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .model import BBox, Direction, Relation, RelationSet, TableAnnotation

DEFAULT_IOU = 0.6


@dataclass(frozen=True)
class MatchResult:
    pairs: list = field(default_factory=list)  # (pred_id, gt_id, iou)
    unmatched_pred: list = field(default_factory=list)
    unmatched_gt: list = field(default_factory=list)
    threshold: float = DEFAULT_IOU

    def mapping(self) -> dict[int, int]:
        return {p: g for p, g, _ in self.pairs}


@dataclass(frozen=True)
class PRF:
    tp: int
    fp: int
    fn: int

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def __add__(self, other: PRF) -> PRF:
        return PRF(self.tp + other.tp, self.fp + other.fp, self.fn + other.fn)


def micro_average(scores: Iterable[PRF]) -> PRF:
    """Pool counts over a corpus; precision/recall/F1 then follow from the totals."""
    return sum(scores, PRF(0, 0, 0))


def iou(a: BBox, b: BBox) -> float:
    w = min(a.x2, b.x2) - max(a.x1, b.x1)
    h = min(a.y2, b.y2) - max(a.y1, b.y1)
    if w <= 0 or h <= 0:
        return 0.0
    inter = w * h
    return inter / (a.area + b.area - inter)


def match_cells(pred: TableAnnotation, gt: TableAnnotation,
                threshold: float = DEFAULT_IOU) -> MatchResult:
    """Greedy one-to-one matching, highest IoU first; ties go to the lower (pred id, gt id)."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError(f"threshold must lie in (0, 1], got {threshold}")
    candidates = []
    for p in pred.cells:
        for g in gt.cells:
            v = iou(p.bbox, g.bbox)
            if v >= threshold:
                candidates.append((-v, p.id, g.id))
    candidates.sort()
    used_p, used_g, pairs = set(), set(), []
    for neg, pid, gid in candidates:
        if pid in used_p or gid in used_g:
            continue
        used_p.add(pid)
        used_g.add(gid)
        pairs.append((pid, gid, -neg))
    return MatchResult(
        pairs,
        [c.id for c in pred.cells if c.id not in used_p],
        [c.id for c in gt.cells if c.id not in used_g],
        threshold,
    )


def generate_relations(t: TableAnnotation, mode: str = "neighbors") -> RelationSet:
    """Directed relations between non-empty cells.

    ``neighbors`` (used for scoring) links each non-empty cell, for every row it
    spans, to the closest non-empty cell on its right, and for every column to
    the closest non-empty cell below; blanks are skipped over. ``all-pairs``
    links every pair of non-empty cells sharing a row or a column instead, which
    is handy for diagnosing matrix predictions.
    """
    t.require_spans()
    full = [c for c in t.cells if not c.empty]
    rels = set()
    if mode == "neighbors":
        by_row, by_col = defaultdict(list), defaultdict(list)
        for c in full:
            s = c.spans
            for r in range(s.sr, s.er + 1):
                by_row[r].append(c)
            for k in range(s.sc, s.ec + 1):
                by_col[k].append(c)
        for line, start, end, direction in ((by_row, "sc", "ec", Direction.HORIZONTAL),
                                             (by_col, "sr", "er", Direction.VERTICAL)):
            for members in line.values():
                members.sort(key=lambda c: (getattr(c.spans, start), c.id))
                for a, b in zip(members, members[1:]):
                    if getattr(b.spans, start) > getattr(a.spans, end):
                        rels.add(Relation(a.id, b.id, direction))
    elif mode == "all-pairs":
        for i, a in enumerate(full):
            for b in full[i + 1:]:
                sa, sb = a.spans, b.spans
                if sa.sr <= sb.er and sb.sr <= sa.er:
                    lo, hi = (a, b) if (sa.sc, a.id) < (sb.sc, b.id) else (b, a)
                    rels.add(Relation(lo.id, hi.id, Direction.HORIZONTAL))
                if sa.sc <= sb.ec and sb.sc <= sa.ec:
                    lo, hi = (a, b) if (sa.sr, a.id) < (sb.sr, b.id) else (b, a)
                    rels.add(Relation(lo.id, hi.id, Direction.VERTICAL))
    else:
        raise ValueError(f"unknown relation mode {mode!r}")
    return RelationSet(rels)


def _nonempty(t: TableAnnotation) -> TableAnnotation:
    return TableAnnotation(c for c in t.cells if not c.empty)


def relation_f1(pred: TableAnnotation, gt: TableAnnotation,
                threshold: float = DEFAULT_IOU, mode: str = "neighbors") -> PRF:
    """Score predicted neighbour relations against ground truth in gt-id space.

    Only non-empty cells take part in matching, since blank cells never carry
    relations. A predicted relation touching an unmatched cell is a false positive.
    """
    mapping = match_cells(_nonempty(pred), _nonempty(gt), threshold).mapping()
    gt_rels = generate_relations(gt, mode).relations
    tp = fp = 0
    for r in generate_relations(pred, mode).relations:
        if r.from_cell in mapping and r.to_cell in mapping and \
                Relation(mapping[r.from_cell], mapping[r.to_cell], r.direction) in gt_rels:
            tp += 1
        else:
            fp += 1
    return PRF(tp, fp, len(gt_rels) - tp)


def cell_prf(pred: TableAnnotation, gt: TableAnnotation, threshold: float = DEFAULT_IOU) -> PRF:
    m = match_cells(pred, gt, threshold)
    return PRF(len(m.pairs), len(m.unmatched_pred), len(m.unmatched_gt))


def threshold_sweep(pred: TableAnnotation, gt: TableAnnotation,
                    thresholds: Sequence[float] = (0.5, 0.6, 0.7, 0.8, 0.9),
                    mode: str = "neighbors") -> list[tuple[float, PRF, PRF]]:
    """Cell-detection and relation scores at each IoU threshold."""
    return [(th, cell_prf(pred, gt, th), relation_f1(pred, gt, th, mode)) for th in thresholds]

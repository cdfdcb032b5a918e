"""Ground-truth preparation: content-level boxes to aligned cell-level boxes."""

from __future__ import annotations

from collections import defaultdict
from typing import Mapping, Sequence

from .model import (BBox, CellBox, EmptyInputError, TableAnnotation, require_valid)


def _group_extreme(cells, key, coord, pick):
    groups = defaultdict(list)
    for c in cells:
        groups[key(c.spans)].append(getattr(c.bbox, coord))
    return {k: pick(v) for k, v in groups.items()}


def unify_boxes(t: TableAnnotation) -> TableAnnotation:
    """Expand every box so cells sharing a start/end row or column line up exactly.

    Start edges snap to the minimum of their group and end edges to the maximum,
    which is the smallest expansion that zeroes the alignment loss.
    """
    t.require_spans()
    require_valid(t)
    y1 = _group_extreme(t.cells, lambda s: s.sr, "y1", min)
    y2 = _group_extreme(t.cells, lambda s: s.er, "y2", max)
    x1 = _group_extreme(t.cells, lambda s: s.sc, "x1", min)
    x2 = _group_extreme(t.cells, lambda s: s.ec, "x2", max)
    return TableAnnotation(
        c.with_bbox(BBox(x1[c.spans.sc], y1[c.spans.sr], x2[c.spans.ec], y2[c.spans.er]))
        for c in t.cells
    )


def words_to_cells(words: Sequence[tuple[BBox, str]],
                   cell_assignment: Mapping[int, int]) -> TableAnnotation:
    """Group word boxes into content-level cells.

    ``cell_assignment`` maps word index to cell id. Words are joined in reading
    order: a word starts a new line when its top lies below the running line's
    bottom, and words within a line are ordered by x1. Output cells are sorted by id.
    """
    if not words:
        raise EmptyInputError("no words given")
    missing = [i for i in range(len(words)) if i not in cell_assignment]
    if missing:
        raise EmptyInputError(f"words without a cell assignment: {missing}")
    members = defaultdict(list)
    for i, (box, text) in enumerate(words):
        members[cell_assignment[i]].append((box, text))
    cells = []
    for cid in sorted(members):
        group = members[cid]
        box = BBox(min(b.x1 for b, _ in group), min(b.y1 for b, _ in group),
                   max(b.x2 for b, _ in group), max(b.y2 for b, _ in group))
        cells.append(CellBox(cid, box, None, _reading_order_text(group)))
    return TableAnnotation(cells)


def _reading_order_text(group):
    lines = []
    for box, text in sorted(group, key=lambda w: (w[0].y1, w[0].x1)):
        if lines and box.y1 < lines[-1][0]:
            line = lines[-1]
            line[1].append((box.x1, text))
            line[0] = max(line[0], box.y2)
        else:
            lines.append([box.y2, [(box.x1, text)]])
    return " ".join(" ".join(t for _, t in sorted(words, key=lambda w: w[0]))
                    for _, words in lines)

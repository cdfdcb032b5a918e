"""Alignment regulariser over cell boxes and the composite training loss."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .model import NonFiniteError, TableAnnotation

# (span field, coordinate column in the per-cell array [x1, y1, x2, y2])
_TERMS = (("sr", 1), ("er", 3), ("sc", 0), ("ec", 2))


@dataclass(frozen=True)
class AlignmentLossBreakdown:
    l1: float
    l2: float
    l3: float
    l4: float

    @property
    def total(self) -> float:
        return self.l1 + self.l2 + self.l3 + self.l4


@dataclass(frozen=True)
class TotalLossInputs:
    l_box: float = 0.0
    l_cls: float = 0.0
    l_mask: float = 0.0
    l_gnn: float = 0.0
    l_align: float = 0.0


def _coords(t: TableAnnotation) -> np.ndarray:
    return np.array([c.bbox.as_tuple() for c in t.cells], dtype=float).reshape(-1, 4)


def _groups(t: TableAnnotation, span_field: str) -> list[list[int]]:
    g = defaultdict(list)
    for i, c in enumerate(t.cells):
        g[getattr(c.spans, span_field)].append(i)
    return [idx for _, idx in sorted(g.items()) if len(idx) > 1]


def _pair_sum(values: np.ndarray) -> float:
    # sum over i<j of (v_i - v_j)^2 == n * sum(v^2) - (sum v)^2, but the explicit
    # form avoids cancellation when coordinates are large and nearly equal
    diff = values[:, None] - values[None, :]
    return float(np.sum(np.triu(diff * diff, k=1)))


def alignment_loss(t: TableAnnotation) -> AlignmentLossBreakdown:
    """Squared disagreement of start/end coordinates among cells sharing a start/end row/column.

    Each unordered pair of cells in a group is counted once.
    """
    t.require_spans()
    xy = _coords(t)
    parts = []
    for span_field, col in _TERMS:
        parts.append(sum((_pair_sum(xy[idx, col]) for idx in _groups(t, span_field)), 0.0))
    l1, l2, l3, l4 = parts
    return AlignmentLossBreakdown(l1, l2, l3, l4)


def alignment_loss_grad(t: TableAnnotation) -> np.ndarray:
    """Gradient of the total alignment loss, shape (n_cells, 4) in (x1, y1, x2, y2) order."""
    t.require_spans()
    xy = _coords(t)
    grad = np.zeros_like(xy)
    for span_field, col in _TERMS:
        for idx in _groups(t, span_field):
            v = xy[idx, col]
            # d/dv_c sum_{i<j}(v_i-v_j)^2 = 2 * sum_{d != c}(v_c - v_d)
            grad[idx, col] += 2.0 * (len(v) * v - v.sum())
    return grad


def total_loss(inp: TotalLossInputs, align_weight: float = 1.0) -> float:
    """Sum of detector, structure and alignment losses; alignment optionally reweighted."""
    terms = (inp.l_box, inp.l_cls, inp.l_mask, inp.l_align, inp.l_gnn, align_weight)
    if not all(math.isfinite(v) for v in terms):
        raise NonFiniteError(f"non-finite loss term in {inp}")
    return inp.l_box + inp.l_cls + inp.l_mask + align_weight * inp.l_align + inp.l_gnn

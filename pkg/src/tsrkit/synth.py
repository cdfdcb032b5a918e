"""Seeded synthetic tables and simulated detector output.

All randomness comes from :class:`~tsrkit.rng.SplitMix64` and is drawn in a
fixed order, so a (seed, parameters) pair pins the output exactly.

``generate`` draw order:

1. Grid squares are visited row-major. An unclaimed square anchors a new cell
   (ids count up from 0 in anchor order). While ``bernoulli(merge_prob)``
   succeeds, the cell tries to grow one column to the right; a blocked or
   out-of-grid growth ends the loop. The same is then done downwards. Then one
   ``bernoulli(empty_prob)`` decides whether the cell is blank.
2. For every cell in id order, the four edges x1, y1, x2, y2 each get
   ``uniform_range(-e, e)`` where ``e = min(jitter, 0.49 * pitch)`` and
   pitch is ``cell_width`` (x edges) or ``cell_height`` (y edges). Edges that
   sit on different grid lines therefore never swap order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import BBox, CellBox, InvalidParamsError, SpanIndices, TableAnnotation
from .rng import SplitMix64


@dataclass(frozen=True)
class SynthConfig:
    rows: int = 3
    cols: int = 3
    merge_prob: float = 0.0
    empty_prob: float = 0.0
    jitter: float = 0.0
    cell_width: float = 100.0
    cell_height: float = 40.0
    origin_x: float = 10.0
    origin_y: float = 10.0

    def check(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise InvalidParamsError(f"need rows, cols >= 1, got {self.rows}x{self.cols}")
        for name in ("merge_prob", "empty_prob"):
            p = getattr(self, name)
            if not 0.0 <= p < 1.0:
                raise InvalidParamsError(f"{name} must lie in [0, 1), got {p}")
        if not (math.isfinite(self.jitter) and self.jitter >= 0):
            raise InvalidParamsError(f"jitter must be finite and >= 0, got {self.jitter}")
        if not (self.cell_width > 0 and self.cell_height > 0):
            raise InvalidParamsError("cell size must be positive")


def _perturb(rng: SplitMix64, box: BBox, limit_x: float, limit_y: float) -> BBox:
    return BBox(box.x1 + rng.uniform_range(-limit_x, limit_x),
                box.y1 + rng.uniform_range(-limit_y, limit_y),
                box.x2 + rng.uniform_range(-limit_x, limit_x),
                box.y2 + rng.uniform_range(-limit_y, limit_y))


def generate_from_config(seed: int, cfg: SynthConfig) -> TableAnnotation:
    cfg.check()
    rng = SplitMix64(seed)
    rows, cols = cfg.rows, cfg.cols
    owner = [[None] * cols for _ in range(rows)]
    placed = []
    for r in range(rows):
        for c in range(cols):
            if owner[r][c] is not None:
                continue
            h = w = 1
            while rng.bernoulli(cfg.merge_prob):
                if c + w < cols and all(owner[rr][c + w] is None for rr in range(r, r + h)):
                    w += 1
                else:
                    break
            while rng.bernoulli(cfg.merge_prob):
                if r + h < rows and all(owner[r + h][cc] is None for cc in range(c, c + w)):
                    h += 1
                else:
                    break
            cid = len(placed)
            for rr in range(r, r + h):
                for cc in range(c, c + w):
                    owner[rr][cc] = cid
            blank = rng.bernoulli(cfg.empty_prob)
            placed.append((SpanIndices(r, r + h - 1, c, c + w - 1), blank))

    cells = []
    for cid, (s, blank) in enumerate(placed):
        box = BBox(cfg.origin_x + s.sc * cfg.cell_width, cfg.origin_y + s.sr * cfg.cell_height,
                   cfg.origin_x + (s.ec + 1) * cfg.cell_width,
                   cfg.origin_y + (s.er + 1) * cfg.cell_height)
        box = _perturb(rng, box, min(cfg.jitter, 0.49 * cfg.cell_width),
                       min(cfg.jitter, 0.49 * cfg.cell_height))
        cells.append(CellBox(cid, box, s, "" if blank else f"r{s.sr}c{s.sc}"))
    return TableAnnotation(cells)


def generate(seed: int, rows: int, cols: int, merge_prob: float = 0.0,
             empty_prob: float = 0.0, jitter: float = 0.0) -> TableAnnotation:
    """Random table on a uniform 100x40 grid with exact spans."""
    return generate_from_config(seed, SynthConfig(rows, cols, merge_prob, empty_prob, jitter))


def corrupt(t: TableAnnotation, seed: int, drop_prob: float = 0.0,
            shift: float = 0.0) -> TableAnnotation:
    """Simulate detector output: drop cells, move each surviving edge, strip spans.

    Each cell draws ``bernoulli(drop_prob)``; a survivor then moves every edge by
    ``uniform_range(-e, e)`` with ``e = min(shift, 0.49) * extent``. Ids are kept
    so tests can align predictions with their origin.
    """
    if not 0.0 <= drop_prob <= 1.0:
        raise InvalidParamsError(f"drop_prob must lie in [0, 1], got {drop_prob}")
    if not (math.isfinite(shift) and shift >= 0):
        raise InvalidParamsError(f"shift must be finite and >= 0, got {shift}")
    rng = SplitMix64(seed)
    frac = min(shift, 0.49)
    out = []
    for c in t.cells:
        if rng.bernoulli(drop_prob):
            continue
        box = _perturb(rng, c.bbox, frac * c.bbox.width, frac * c.bbox.height)
        out.append(CellBox(c.id, box, None, c.content))
    return TableAnnotation(out)

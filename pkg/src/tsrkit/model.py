"""Shared domain types for table structure: boxes, spans, cells, adjacency, relations."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np


class TsrError(Exception):
    """Base class for all toolkit errors."""


class MissingSpansError(TsrError):
    pass


class InvalidTableError(TsrError):
    pass


class EmptyInputError(TsrError):
    pass


class DimensionMismatchError(TsrError):
    pass


class NonSymmetricError(TsrError):
    pass


class InsufficientCellsError(TsrError):
    pass


class NonFiniteError(TsrError):
    pass


class EmptyReferenceError(TsrError):
    pass


class EmptyTreeError(TsrError):
    pass


class InvalidParamsError(TsrError):
    pass


@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def problems(self) -> list[str]:
        out = []
        if not all(math.isfinite(v) for v in self.as_tuple()):
            out.append("non-finite coordinate")
        else:
            if not self.x1 < self.x2:
                out.append(f"x1 < x2 violated ({self.x1} >= {self.x2})")
            if not self.y1 < self.y2:
                out.append(f"y1 < y2 violated ({self.y1} >= {self.y2})")
        return out

    def contains(self, other: BBox) -> bool:
        return (self.x1 <= other.x1 and self.y1 <= other.y1
                and self.x2 >= other.x2 and self.y2 >= other.y2)


@dataclass(frozen=True)
class SpanIndices:
    """Logical grid placement: start/end row (sr, er) and start/end column (sc, ec), inclusive."""

    sr: int
    er: int
    sc: int
    ec: int

    @property
    def rowspan(self) -> int:
        return self.er - self.sr + 1

    @property
    def colspan(self) -> int:
        return self.ec - self.sc + 1

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.sr, self.er, self.sc, self.ec)

    def problems(self) -> list[str]:
        out = []
        if min(self.as_tuple()) < 0:
            out.append("negative span index")
        if self.sr > self.er:
            out.append(f"sr <= er violated ({self.sr} > {self.er})")
        if self.sc > self.ec:
            out.append(f"sc <= ec violated ({self.sc} > {self.ec})")
        return out

    def overlaps(self, other: SpanIndices) -> bool:
        return (self.sr <= other.er and other.sr <= self.er
                and self.sc <= other.ec and other.sc <= self.ec)


@dataclass(frozen=True)
class CellBox:
    id: int
    bbox: BBox
    spans: Optional[SpanIndices] = None
    content: str = ""

    @property
    def empty(self) -> bool:
        return self.content.strip() == ""

    def with_spans(self, spans: Optional[SpanIndices]) -> CellBox:
        return replace(self, spans=spans)

    def with_bbox(self, bbox: BBox) -> CellBox:
        return replace(self, bbox=bbox)


@dataclass(frozen=True)
class TableAnnotation:
    cells: tuple[CellBox, ...] = ()

    def __init__(self, cells: Iterable[CellBox] = ()):
        object.__setattr__(self, "cells", tuple(cells))

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    @property
    def has_spans(self) -> bool:
        return all(c.spans is not None for c in self.cells)

    def by_id(self) -> dict[int, CellBox]:
        return {c.id: c for c in self.cells}

    def require_spans(self) -> None:
        missing = [c.id for c in self.cells if c.spans is None]
        if missing:
            raise MissingSpansError(f"cells without spans: {missing}")

    def without_spans(self) -> TableAnnotation:
        return TableAnnotation(c.with_spans(None) for c in self.cells)

    @property
    def n_rows(self) -> int:
        self.require_spans()
        return max((c.spans.er for c in self.cells), default=-1) + 1

    @property
    def n_cols(self) -> int:
        self.require_spans()
        return max((c.spans.ec for c in self.cells), default=-1) + 1


def _as_binary_matrix(m) -> np.ndarray:
    a = np.array(m, dtype=np.uint8)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class AdjacencyMatrices:
    """Row and column association matrices over cells, indexed in table order.

    Entries are 0/1, both matrices symmetric with a unit diagonal.
    """

    row: np.ndarray
    col: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "row", _as_binary_matrix(self.row))
        object.__setattr__(self, "col", _as_binary_matrix(self.col))

    @property
    def n(self) -> int:
        return int(self.row.shape[0]) if self.row.ndim == 2 else 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, AdjacencyMatrices):
            return NotImplemented
        return (self.row.shape == other.row.shape and self.col.shape == other.col.shape
                and bool(np.array_equal(self.row, other.row))
                and bool(np.array_equal(self.col, other.col)))

    def check(self, n_cells: Optional[int] = None) -> None:
        """Raise if matrices are not square, the expected size, binary, symmetric."""
        for name, m in (("row", self.row), ("col", self.col)):
            if m.ndim != 2 or m.shape[0] != m.shape[1]:
                raise DimensionMismatchError(f"{name} matrix is not square: shape {m.shape}")
            if n_cells is not None and m.shape[0] != n_cells:
                raise DimensionMismatchError(
                    f"{name} matrix has dimension {m.shape[0]}, expected {n_cells}")
            if m.size and m.max() > 1:
                raise InvalidTableError(f"{name} matrix is not binary")
            if not np.array_equal(m, m.T):
                raise NonSymmetricError(f"{name} matrix is not symmetric")
        if self.row.shape != self.col.shape:
            raise DimensionMismatchError(
                f"row/col shapes differ: {self.row.shape} vs {self.col.shape}")


class Direction(str, Enum):
    HORIZONTAL = "horizontal"
    VERTICAL = "vertical"


@dataclass(frozen=True, order=True)
class Relation:
    from_cell: int
    to_cell: int
    direction: Direction

    def __post_init__(self):
        if self.from_cell == self.to_cell:
            raise ValueError(f"self relation on cell {self.from_cell}")


@dataclass(frozen=True)
class RelationSet:
    relations: frozenset = field(default_factory=frozenset)

    def __init__(self, relations: Iterable[Relation] = ()):
        object.__setattr__(self, "relations", frozenset(relations))

    def __len__(self) -> int:
        return len(self.relations)

    def __iter__(self):
        return iter(sorted(self.relations))

    def __contains__(self, rel) -> bool:
        return rel in self.relations

    def of(self, direction: Direction) -> set[Relation]:
        return {r for r in self.relations if r.direction == direction}


def validate_table(t: TableAnnotation) -> list[str]:
    """Return a description of every invariant violation in ``t``; empty when valid."""
    out = []
    seen: dict[int, int] = {}
    for c in t.cells:
        if c.id in seen:
            out.append(f"cell {c.id}: duplicate id")
        seen[c.id] = seen.get(c.id, 0) + 1
        for p in c.bbox.problems():
            out.append(f"cell {c.id}: bbox {p}")
        if c.spans is not None:
            for p in c.spans.problems():
                out.append(f"cell {c.id}: spans {p}")
    if t.cells and t.has_spans:
        cells = t.cells
        for i in range(len(cells)):
            for j in range(i + 1, len(cells)):
                if cells[i].spans.overlaps(cells[j].spans):
                    out.append(f"cell {cells[i].id}: span rectangle overlaps cell {cells[j].id}")
    return out


def require_valid(t: TableAnnotation) -> None:
    problems = validate_table(t)
    if problems:
        raise InvalidTableError("; ".join(problems))


def table_from_spans(spans: Sequence[tuple[int, int, int, int]], width: float = 100.0,
                     height: float = 40.0, contents: Optional[Sequence[str]] = None) -> TableAnnotation:
    """Build a grid-aligned table from (sr, er, sc, ec) tuples; ids follow the input order."""
    cells = []
    for i, (sr, er, sc, ec) in enumerate(spans):
        box = BBox(sc * width, sr * height, (ec + 1) * width, (er + 1) * height)
        text = contents[i] if contents is not None else f"r{sr}c{sc}"
        cells.append(CellBox(i, box, SpanIndices(sr, er, sc, ec), text))
    return TableAnnotation(cells)

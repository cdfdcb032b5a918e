"""Table file formats: the XML structure output and the canonical cell JSON.

XML layout (UTF-8, two-space indent, trailing newline)::

    <?xml version="1.0" encoding="UTF-8"?>
    <table>
      <cell id="0" start-row="0" end-row="0" start-col="0" end-col="0">
        <bounding-box x1="1.0" y1="2.0" x2="3.0" y2="4.0"/>
        <content>a</content>
      </cell>
    </table>

Cells are written sorted by (start-row, start-col, y1, x1, id); coordinates use
Python's shortest round-trip float repr. Reading also accepts ICDAR-2013 style
``<document><table><region><cell ...>`` files, where ``id`` and ``end-*``
attributes may be missing.
"""

from __future__ import annotations

import json
import math
from importlib import resources
from pathlib import Path
from typing import Optional, Union
from xml.parsers import expat
from xml.sax.saxutils import escape

import jsonschema
import numpy as np

from .model import (AdjacencyMatrices, BBox, CellBox, DimensionMismatchError,
                    InvalidTableError, SpanIndices, TableAnnotation, TsrError,
                    validate_table)

PathLike = Union[str, Path]
JSON_VERSION = "tsrkit-table/1"


class TableParseError(TsrError):
    pass


class InvariantViolationError(InvalidTableError):
    pass


class IoFailure(TsrError):
    pass


def _fmt(v: float) -> str:
    return repr(float(v))


def _xml_text(s: str) -> str:
    return escape(s).replace("\r", "&#13;")


def xml_string(t: TableAnnotation) -> str:
    t.require_spans()
    cells = sorted(t.cells, key=lambda c: (c.spans.sr, c.spans.sc, c.bbox.y1, c.bbox.x1, c.id))
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', "<table>"]
    for c in cells:
        s, b = c.spans, c.bbox
        lines.append(f'  <cell id="{c.id}" start-row="{s.sr}" end-row="{s.er}" '
                     f'start-col="{s.sc}" end-col="{s.ec}">')
        lines.append(f'    <bounding-box x1="{_fmt(b.x1)}" y1="{_fmt(b.y1)}" '
                     f'x2="{_fmt(b.x2)}" y2="{_fmt(b.y2)}"/>')
        lines.append(f"    <content>{_xml_text(c.content)}</content>")
        lines.append("  </cell>")
    lines.append("</table>")
    return "\n".join(lines) + "\n"


def write_xml(t: TableAnnotation, path: PathLike) -> None:
    data = xml_string(t).encode("utf-8")
    try:
        Path(path).write_bytes(data)
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


class _Elem:
    __slots__ = ("tag", "attrs", "line", "children", "text")

    def __init__(self, tag, attrs, line):
        self.tag, self.attrs, self.line = tag, attrs, line
        self.children, self.text = [], []


def _parse_tree(data: bytes, source: str) -> _Elem:
    p = expat.ParserCreate()
    root = _Elem("#doc", {}, 0)
    stack = [root]

    def start(tag, attrs):
        e = _Elem(tag, attrs, p.CurrentLineNumber)
        stack[-1].children.append(e)
        stack.append(e)

    def end(tag):
        stack.pop()

    p.StartElementHandler = start
    p.EndElementHandler = end
    p.CharacterDataHandler = lambda text: stack[-1].text.append(text)
    try:
        p.Parse(data, True)
    except expat.ExpatError as e:
        raise TableParseError(f"{source}:{e.lineno}:{e.offset}: {expat.ErrorString(e.code)}") from e
    return root.children[0]


def _iter(e: _Elem, tag: str):
    for ch in e.children:
        if ch.tag == tag:
            yield ch
        yield from _iter(ch, tag)


def _num(e: _Elem, name: str, conv, source: str, default=None):
    raw = e.attrs.get(name)
    if raw is None:
        if default is not None:
            return default
        raise TableParseError(f"{source}:{e.line}: <{e.tag}> lacks attribute {name!r}")
    try:
        v = conv(raw)
    except ValueError:
        raise TableParseError(
            f"{source}:{e.line}: <{e.tag}> attribute {name}={raw!r} is not a valid number") from None
    if conv is float and not math.isfinite(v):
        raise TableParseError(f"{source}:{e.line}: <{e.tag}> attribute {name} is not finite")
    return v


def parse_xml(data: bytes, source: str = "<string>") -> TableAnnotation:
    root = _parse_tree(data, source)
    table = root if root.tag == "table" else next(_iter(root, "table"), root)
    cells = []
    for n, ce in enumerate(_iter(table, "cell")):
        sr = _num(ce, "start-row", int, source)
        sc = _num(ce, "start-col", int, source)
        er = _num(ce, "end-row", int, source, default=sr)
        ec = _num(ce, "end-col", int, source, default=sc)
        cid = _num(ce, "id", int, source, default=n)
        bb = next((ch for ch in ce.children if ch.tag == "bounding-box"), None)
        if bb is None:
            raise TableParseError(f"{source}:{ce.line}: <cell> has no <bounding-box>")
        box = BBox(*(_num(bb, k, float, source) for k in ("x1", "y1", "x2", "y2")))
        content_el = next((ch for ch in ce.children if ch.tag == "content"), None)
        content = "".join(content_el.text) if content_el is not None else ""
        cells.append(CellBox(cid, box, SpanIndices(sr, er, sc, ec), content))
    t = TableAnnotation(cells)
    problems = validate_table(t)
    if problems:
        raise InvariantViolationError(f"{source}: " + "; ".join(problems))
    return t


def _read_bytes(path: PathLike) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise IoFailure(f"cannot read {path}: {e}") from e


def read_xml(path: PathLike) -> TableAnnotation:
    return parse_xml(_read_bytes(path), str(path))


def _schema() -> dict:
    return json.loads(resources.files("tsrkit").joinpath("table.schema.json").read_text())


def table_to_json(t: TableAnnotation, adj: Optional[AdjacencyMatrices] = None) -> dict:
    cells = []
    for c in t.cells:
        d = {"id": c.id, "x1": float(c.bbox.x1), "y1": float(c.bbox.y1),
             "x2": float(c.bbox.x2), "y2": float(c.bbox.y2),
             "content": c.content, "empty": c.empty}
        if c.spans is not None:
            d.update(sr=c.spans.sr, er=c.spans.er, sc=c.spans.sc, ec=c.spans.ec)
        cells.append(d)
    doc = {"version": JSON_VERSION, "cells": cells}
    if adj is not None:
        adj.check(len(cells))
        doc["row_adjacency"] = adj.row.astype(int).tolist()
        doc["col_adjacency"] = adj.col.astype(int).tolist()
    return doc


def table_from_json(doc, source: str = "<json>") -> tuple[TableAnnotation, Optional[AdjacencyMatrices]]:
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as e:
        where = "/".join(str(p) for p in e.absolute_path) or "<root>"
        raise TableParseError(f"{source}: at {where}: {e.message}") from None
    cells = []
    for d in doc["cells"]:
        spans = (SpanIndices(int(d["sr"]), int(d["er"]), int(d["sc"]), int(d["ec"]))
                 if "sr" in d else None)
        c = CellBox(int(d["id"]), BBox(float(d["x1"]), float(d["y1"]), float(d["x2"]), float(d["y2"])),
                    spans, d["content"])
        if "empty" in d and d["empty"] != c.empty:
            raise InvariantViolationError(
                f"{source}: cell {c.id}: empty={d['empty']} contradicts content {c.content!r}")
        cells.append(c)
    t = TableAnnotation(cells)
    problems = validate_table(t)
    if problems:
        raise InvariantViolationError(f"{source}: " + "; ".join(problems))
    adj = None
    if ("row_adjacency" in doc) != ("col_adjacency" in doc):
        raise TableParseError(f"{source}: row_adjacency and col_adjacency must appear together")
    if "row_adjacency" in doc:
        n = len(cells)
        for key in ("row_adjacency", "col_adjacency"):
            m = doc[key]
            if len(m) != n or any(len(r) != n for r in m):
                raise DimensionMismatchError(
                    f"{source}: {key} must be {n}x{n} to match the cell count")
        adj = AdjacencyMatrices(np.array(doc["row_adjacency"]).reshape(n, n),
                                np.array(doc["col_adjacency"]).reshape(n, n))
        adj.check(n)
    return t, adj


def write_json(t: TableAnnotation, path: PathLike,
               adj: Optional[AdjacencyMatrices] = None) -> None:
    text = json.dumps(table_to_json(t, adj), indent=2, ensure_ascii=False) + "\n"
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as e:
        raise IoFailure(f"cannot write {path}: {e}") from e


def read_json(path: PathLike) -> tuple[TableAnnotation, Optional[AdjacencyMatrices]]:
    raw = _read_bytes(path)
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise TableParseError(f"{path}: {e}") from None
    return table_from_json(doc, str(path))


def read_table(path: PathLike) -> tuple[TableAnnotation, Optional[AdjacencyMatrices]]:
    """Dispatch on suffix: ``.xml`` is the structure XML, anything else canonical JSON."""
    if str(path).lower().endswith(".xml"):
        return read_xml(path), None
    return read_json(path)


def write_table(t: TableAnnotation, path: PathLike,
                adj: Optional[AdjacencyMatrices] = None) -> None:
    if str(path).lower().endswith(".xml"):
        write_xml(t, path)
    else:
        write_json(t, path, adj)

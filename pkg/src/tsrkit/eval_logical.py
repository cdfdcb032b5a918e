"""Logical-structure metrics: markup tokens, BLEU and tree-edit-distance similarity."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import EmptyReferenceError, EmptyTreeError, TableAnnotation

ROW_OPEN = "<tr>"
ROW_CLOSE = "</tr>"


def cell_token(rowspan: int = 1, colspan: int = 1) -> str:
    attrs = ""
    if rowspan != 1:
        attrs += f' rowspan="{rowspan}"'
    if colspan != 1:
        attrs += f' colspan="{colspan}"'
    return f"<td{attrs}>"


def _rows(t: TableAnnotation) -> list[list]:
    t.require_spans()
    rows = [[] for _ in range(t.n_rows)]
    for c in t.cells:
        rows[c.spans.sr].append(c)
    for r in rows:
        r.sort(key=lambda c: (c.spans.sc, c.id))
    return rows


def to_markup(t: TableAnnotation) -> list[str]:
    """Structure-only token sequence: one ``<tr>``..``</tr>`` per row index, a ``<td>`` per cell.

    A cell is emitted in its starting row; span attributes appear only when > 1.
    """
    tokens = []
    for row in _rows(t):
        tokens.append(ROW_OPEN)
        tokens.extend(cell_token(c.spans.rowspan, c.spans.colspan) for c in row)
        tokens.append(ROW_CLOSE)
    return tokens


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu(candidate: Sequence[str], reference: Sequence[str], max_n: int = 4) -> float:
    """Sentence BLEU without smoothing; the n-gram order is capped at the candidate length."""
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    if not reference:
        raise EmptyReferenceError("reference sequence is empty")
    c_len, r_len = len(candidate), len(reference)
    if c_len == 0:
        return 0.0
    orders = min(max_n, c_len)
    log_sum = 0.0
    for n in range(1, orders + 1):
        cand = _ngrams(candidate, n)
        ref = _ngrams(reference, n)
        clipped = sum(min(cnt, ref[g]) for g, cnt in cand.items())
        if clipped == 0:
            return 0.0
        log_sum += math.log(clipped / sum(cand.values()))
    bp = 1.0 if c_len >= r_len else math.exp(1.0 - r_len / c_len)
    return bp * math.exp(log_sum / orders)


@dataclass
class Node:
    label: str
    children: list = field(default_factory=list)

    def add(self, child: Node) -> Node:
        self.children.append(child)
        return self

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)


def table_to_tree(t: TableAnnotation, include_content: bool = False) -> Node:
    """``table`` root, one ``tr`` per row index, ``td`` leaves under each cell's start row."""
    root = Node("table")
    for row in _rows(t):
        tr = Node("tr")
        for c in row:
            label = f"td rowspan={c.spans.rowspan} colspan={c.spans.colspan}"
            if include_content:
                label += f" content={c.content!r}"
            tr.add(Node(label))
        root.add(tr)
    return root


def _postorder(root: Node):
    """Postorder labels, leftmost-leaf index per node, and keyroots."""
    labels, lml = [], []

    def walk(node):
        first = None
        for ch in node.children:
            leaf = walk(ch)
            if first is None:
                first = leaf
        idx = len(labels)
        labels.append(node.label)
        lml.append(idx if first is None else first)
        return lml[idx]

    walk(root)
    seen, keyroots = set(), []
    for i in range(len(labels) - 1, -1, -1):
        if lml[i] not in seen:
            seen.add(lml[i])
            keyroots.append(i)
    keyroots.sort()
    return labels, lml, keyroots


def tree_edit_distance(a: Node, b: Node) -> int:
    """Unit-cost ordered tree edit distance (Zhang and Shasha keyroot decomposition)."""
    la, lml_a, kr_a = _postorder(a)
    lb, lml_b, kr_b = _postorder(b)
    n, m = len(la), len(lb)
    td = [[0] * m for _ in range(n)]
    for i in kr_a:
        for j in kr_b:
            li, lj = lml_a[i], lml_b[j]
            rows, cols = i - li + 2, j - lj + 2
            fd = [[0] * cols for _ in range(rows)]
            for x in range(1, rows):
                fd[x][0] = x
            for y in range(1, cols):
                fd[0][y] = y
            for x in range(1, rows):
                ni = li + x - 1
                for y in range(1, cols):
                    nj = lj + y - 1
                    if lml_a[ni] == li and lml_b[nj] == lj:
                        cost = 0 if la[ni] == lb[nj] else 1
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                                       fd[x - 1][y - 1] + cost)
                        td[ni][nj] = fd[x][y]
                    else:
                        fd[x][y] = min(fd[x - 1][y] + 1, fd[x][y - 1] + 1,
                                       fd[lml_a[ni] - li][lml_b[nj] - lj] + td[ni][nj])
    return td[n - 1][m - 1]


def teds(a: Node, b: Node) -> float:
    """1 - TED(a, b) / max(|a|, |b|), floored at 0.

    With unit costs TED can exceed the larger size (relabel everything and
    reshape), which would push the raw ratio below zero.
    """
    if a is None or b is None:
        raise EmptyTreeError("both trees must be non-empty")
    return max(0.0, 1.0 - tree_edit_distance(a, b) / max(a.size(), b.size()))


def mean_score(scores: Iterable[float]) -> Optional[float]:
    """Document-level average; None for an empty corpus."""
    scores = list(scores)
    return sum(scores) / len(scores) if scores else None

"""Builders for the adjacency, incidence and D4M table schemas."""

from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence, TextIO

from . import kernels
from .errors import DuplicateRow, ParseError, SelfLoopUnsupported
from .semiring import PLUS_TIMES
from .sparse import DenseVector, KeySpace, SparseMatrix, from_triples, parse_value, transpose

__all__ = [
    "Edge",
    "EdgeList",
    "D4mTableSet",
    "adjacency_from_edges",
    "incidence_from_edges",
    "adjacency_from_incidence",
    "d4m_explode",
    "escape_value",
    "read_edge_list",
    "write_edge_list",
    "read_d4m_csv",
    "edge_label",
]


@dataclass(frozen=True)
class Edge:
    src: Hashable
    dst: Hashable
    weight: float = 1
    label: Hashable | None = None


@dataclass
class EdgeList:
    edges: list[Edge] = field(default_factory=list)
    directed: bool = False

    def __post_init__(self):
        for e in self.edges:
            if e.src == "" or e.dst == "":
                raise ValueError("edge endpoints must be nonempty labels")
            if not math.isfinite(e.weight):
                raise ValueError(f"edge weight must be finite, got {e.weight!r}")

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence], directed: bool = False,
                   labels: Iterable[Hashable] | None = None) -> "EdgeList":
        """``pairs`` holds ``(src, dst)`` or ``(src, dst, weight)`` tuples."""
        pairs = [tuple(p) for p in pairs]
        labels = list(labels) if labels is not None else [None] * len(pairs)
        edges = [Edge(p[0], p[1], p[2] if len(p) > 2 else 1, lab) for p, lab in zip(pairs, labels)]
        return cls(edges, directed)

    def __len__(self) -> int:
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def vertices(self) -> KeySpace:
        return KeySpace([e.src for e in self.edges] + [e.dst for e in self.edges])

    def edge_labels(self) -> list:
        return [e.label if e.label is not None else edge_label(n)
                for n, e in enumerate(self.edges, 1)]


def edge_label(n: int) -> str:
    return f"e{n:06d}"


def adjacency_from_edges(edges: EdgeList, vertices: KeySpace | None = None) -> SparseMatrix:
    """``A(i, j)`` = summed weight of edges ``i -> j``; undirected edges count both ways.

    A self loop adds its weight once to the diagonal.
    """
    vertices = edges.vertices() if vertices is None else vertices
    triples = []
    for e in edges:
        triples.append((e.src, e.dst, e.weight))
        if not edges.directed and e.src != e.dst:
            triples.append((e.dst, e.src, e.weight))
    return from_triples(vertices, vertices, triples, PLUS_TIMES, collision="add")


def incidence_from_edges(edges: EdgeList, oriented: bool = False,
                         vertices: KeySpace | None = None) -> SparseMatrix:
    """Edge-by-vertex matrix.

    Unoriented: 1 in both endpoint columns.  Oriented: ``+|w|`` where the edge
    goes in, ``-|w|`` where it leaves (an oriented self loop cancels to an
    empty row).
    """
    vertices = edges.vertices() if vertices is None else vertices
    labels = edges.edge_labels()
    if len(set(labels)) != len(labels):
        raise ValueError("edge labels must be unique")
    triples = []
    for lab, e in zip(labels, edges):
        if oriented:
            w = abs(e.weight)
            triples.append((lab, e.src, -w))
            triples.append((lab, e.dst, w))
        else:
            if e.src == e.dst:
                raise SelfLoopUnsupported(f"self loop on {e.src!r} (edge {lab!r}) in unoriented incidence")
            triples.append((lab, e.src, 1))
            triples.append((lab, e.dst, 1))
    return from_triples(KeySpace(labels), vertices, triples, PLUS_TIMES, collision="add")


def adjacency_from_incidence(E: SparseMatrix) -> SparseMatrix:
    """``A = E'E - diag(E'E)`` for an unoriented 0/1 incidence matrix."""
    return kernels.remove_diagonal(kernels.spgemm(transpose(E), E))


# -- D4M ----------------------------------------------------------------------


@dataclass
class D4mTableSet:
    Tedge: SparseMatrix
    TedgeT: SparseMatrix
    Tdeg: DenseVector
    Traw: dict[Hashable, str]


def escape_value(text: str) -> str:
    return text.replace("\\", "\\\\").replace("|", "\\|")


def unescape_value(text: str) -> str:
    out, it = [], iter(text)
    for ch in it:
        out.append(next(it, "\\") if ch == "\\" else ch)
    return "".join(out)


def d4m_explode(records: Iterable[tuple[Hashable, Sequence[tuple[str, str]]]],
                raw: dict[Hashable, str] | None = None) -> D4mTableSet:
    """Explode ``(row, [(name, value), ...])`` records so each ``name|value`` pair is a column."""
    triples = []
    traw: dict[Hashable, str] = {}
    seen = set()
    for row, pairs in records:
        if row in seen:
            raise DuplicateRow(f"duplicate row label {row!r}")
        seen.add(row)
        pairs = list(pairs)
        for name, value in pairs:
            triples.append((row, f"{name}|{escape_value(str(value))}", 1))
        if raw is not None and row in raw:
            traw[row] = raw[row]
        else:
            traw[row] = ",".join(f"{n}={v}" for n, v in pairs)
    Tedge = from_triples(KeySpace(seen), None, triples, PLUS_TIMES, collision="overwrite")
    Tdeg = kernels.reduce(kernels.apply(Tedge, lambda v: 1), "cols")
    return D4mTableSet(Tedge, transpose(Tedge), Tdeg, traw)


# -- file formats ---------------------------------------------------------------


def read_edge_list(source: str | os.PathLike | TextIO) -> EdgeList:
    """Parse ``src<TAB>dst[<TAB>weight[<TAB>label]]`` lines.

    A ``#directed`` line makes the edges directed; other ``#`` lines are comments.
    """
    if isinstance(source, (str, os.PathLike)):
        name = str(source)
        with open(source, encoding="utf-8") as fh:
            return _parse_edge_list(fh, name)
    return _parse_edge_list(source, getattr(source, "name", None))


def _parse_edge_list(fh: TextIO, name: str | None) -> EdgeList:
    edges = []
    directed = False
    for lineno, line in enumerate(fh, 1):
        line = line.rstrip("\r\n")
        if not line.strip():
            continue
        if line.startswith("#"):
            if line.strip().lower() == "#directed":
                directed = True
            continue
        parts = line.split("\t")
        if len(parts) < 2 or len(parts) > 4:
            raise ParseError(f"expected src<TAB>dst[<TAB>weight[<TAB>label]], got {len(parts)} fields",
                             lineno, name)
        src, dst = parts[0].strip(), parts[1].strip()
        if not src or not dst:
            raise ParseError("empty vertex label", lineno, name)
        weight = 1
        if len(parts) >= 3 and parts[2].strip():
            try:
                weight = parse_value(parts[2])
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", lineno, name) from None
            if not math.isfinite(weight):
                raise ParseError(f"weight must be finite, got {parts[2]!r}", lineno, name)
        label = parts[3].strip() if len(parts) == 4 and parts[3].strip() else None
        edges.append(Edge(src, dst, weight, label))
    return EdgeList(edges, directed)


def write_edge_list(edges: EdgeList, fh: TextIO, with_labels: bool = False) -> None:
    from .sparse import format_value
    if edges.directed:
        fh.write("#directed\n")
    for lab, e in zip(edges.edge_labels(), edges):
        line = f"{e.src}\t{e.dst}\t{format_value(e.weight)}"
        if with_labels:
            line += f"\t{lab}"
        fh.write(line + "\n")


def read_d4m_csv(source: str | os.PathLike | TextIO) -> D4mTableSet:
    """CSV with a header row; the first column is the row label, the rest are fields.

    Empty cells are skipped.  The verbatim CSV line is kept as the raw record.
    """
    if isinstance(source, (str, os.PathLike)):
        with open(source, encoding="utf-8", newline="") as fh:
            text = fh.read()
        name = str(source)
    else:
        text = source.read()
        name = getattr(source, "name", None)
    lines = text.splitlines()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        return d4m_explode([])
    if len(header) < 1:
        raise ParseError("empty header", 1, name)
    records, raw = [], {}
    start = reader.line_num
    for cells in reader:
        lineno = start + 1
        verbatim = "\n".join(lines[start:reader.line_num])
        start = reader.line_num
        if not cells or not any(c.strip() for c in cells):
            continue
        if len(cells) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(cells)}", lineno, name)
        row = cells[0].strip()
        if not row:
            raise ParseError("empty row label", lineno, name)
        pairs = [(h.strip(), c) for h, c in zip(header[1:], cells[1:]) if c != ""]
        records.append((row, pairs))
        raw[row] = verbatim
    try:
        return d4m_explode(records, raw)
    except DuplicateRow as exc:
        raise ParseError(str(exc), source=name) from None

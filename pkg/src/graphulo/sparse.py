"""Labeled two-dimensional associative arrays stored as sparse matrices.

Labels live in a :class:`KeySpace`; entries are kept row-compressed by
integer position, so every matrix is both an associative array (labels are
always available) and a sparse matrix (positions, possibly empty rows and
columns).  Matrices are immutable once built and never store the semiring
zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, TextIO

import numpy as np

from .errors import UnknownLabel, ParseError
from .semiring import PLUS_TIMES, Semiring

__all__ = [
    "KeySpace",
    "SparseMatrix",
    "DenseVector",
    "from_triples",
    "get",
    "transpose",
    "equal",
    "format_value",
    "parse_value",
    "write_tsv",
    "read_tsv",
]

Label = Hashable


class KeySpace:
    """Sorted, duplicate-free sequence of row or column labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Iterable[Label] = ()):
        try:
            self.labels: tuple = tuple(sorted(set(labels)))
        except TypeError as exc:
            raise TypeError(f"labels in one key space must be mutually orderable: {exc}") from None
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except (KeyError, TypeError):
            raise UnknownLabel(f"unknown label {label!r}") from None

    def __contains__(self, label) -> bool:
        try:
            return label in self._index
        except TypeError:
            return False

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[Label]:
        return iter(self.labels)

    def __getitem__(self, i: int) -> Label:
        return self.labels[i]

    def __eq__(self, other) -> bool:
        return isinstance(other, KeySpace) and self.labels == other.labels

    def __hash__(self) -> int:
        return hash(self.labels)

    def __repr__(self) -> str:
        if len(self.labels) > 6:
            shown = ", ".join(map(repr, self.labels[:3])) + ", ..., " + repr(self.labels[-1])
        else:
            shown = ", ".join(map(repr, self.labels))
        return f"KeySpace([{shown}])"

    def union(self, other: "KeySpace") -> "KeySpace":
        if self == other:
            return self
        return KeySpace(self.labels + other.labels)

    def subset(self, labels: Iterable[Label]) -> "KeySpace":
        labels = list(labels)
        for lab in labels:
            self.index(lab)
        return KeySpace(labels)


class SparseMatrix:
    """Finite-support map ``rows x cols -> V`` over a semiring.

    Build with :func:`from_triples`, :meth:`from_dense` or the kernels; the
    constructor itself is internal and expects positional row dictionaries.
    """

    __slots__ = ("rows", "cols", "semiring", "_data", "_nnz")

    def __init__(self, rows: KeySpace, cols: KeySpace, data: Mapping[int, Mapping[int, Any]],
                 semiring: Semiring = PLUS_TIMES):
        self.rows = rows
        self.cols = cols
        self.semiring = semiring
        zero = semiring.zero
        clean: dict[int, dict[int, Any]] = {}
        nnz = 0
        for i in sorted(data):
            row = {j: v for j, v in sorted(data[i].items()) if not v == zero}
            if row:
                clean[i] = row
                nnz += len(row)
        self._data = clean
        self._nnz = nnz

    # -- construction helpers -------------------------------------------------

    @classmethod
    def empty(cls, rows: KeySpace, cols: KeySpace, semiring: Semiring = PLUS_TIMES) -> "SparseMatrix":
        return cls(rows, cols, {}, semiring)

    @classmethod
    def identity(cls, keys: KeySpace, semiring: Semiring = PLUS_TIMES) -> "SparseMatrix":
        return cls(keys, keys, {i: {i: semiring.one} for i in range(len(keys))}, semiring)

    @classmethod
    def diag(cls, vector: "DenseVector", semiring: Semiring = PLUS_TIMES) -> "SparseMatrix":
        data = {i: {i: v} for i, v in enumerate(vector.values)}
        return cls(vector.keys, vector.keys, data, semiring)

    @classmethod
    def from_dense(cls, array, rows: Iterable[Label] | KeySpace | None = None,
                   cols: Iterable[Label] | KeySpace | None = None,
                   semiring: Semiring = PLUS_TIMES) -> "SparseMatrix":
        """Wrap a 2-D array.  Row ``i`` of ``array`` maps to the ``i``-th sorted label."""
        arr = np.asarray(array)
        if arr.ndim != 2:
            raise ValueError("from_dense expects a 2-D array")
        rows = _as_keyspace(rows, arr.shape[0])
        cols = _as_keyspace(cols, arr.shape[1])
        if len(rows) != arr.shape[0] or len(cols) != arr.shape[1]:
            raise ValueError(f"label counts {len(rows)}x{len(cols)} do not match array shape {arr.shape}")
        data = {}
        for i in range(arr.shape[0]):
            data[i] = {j: arr[i, j].item() for j in np.flatnonzero(arr[i] != semiring.zero).tolist()}
        return cls(rows, cols, data, semiring)

    # -- inspection -----------------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.cols)

    @property
    def nnz(self) -> int:
        return self._nnz

    def __len__(self) -> int:
        return self._nnz

    def __repr__(self) -> str:
        m, n = self.shape
        return f"<SparseMatrix {m}x{n}, nnz={self._nnz}, {self.semiring.name}>"

    def get(self, row: Label, col: Label) -> Any:
        i = self.rows.index(row)
        j = self.cols.index(col)
        return self._data.get(i, {}).get(j, self.semiring.zero)

    def __getitem__(self, key: tuple[Label, Label]) -> Any:
        return self.get(*key)

    def items(self) -> Iterator[tuple[int, int, Any]]:
        """Positional ``(i, j, value)`` entries in sorted order."""
        for i, row in self._data.items():
            for j, v in row.items():
                yield i, j, v

    def triples(self) -> Iterator[tuple[Label, Label, Any]]:
        """Labeled ``(row, col, value)`` entries in sorted order."""
        rl, cl = self.rows.labels, self.cols.labels
        for i, j, v in self.items():
            yield rl[i], cl[j], v

    def row_items(self, i: int) -> Mapping[int, Any]:
        return self._data.get(i, {})

    def nonempty_rows(self) -> list[int]:
        return list(self._data)

    def to_dense(self, dtype=float) -> np.ndarray:
        out = np.full(self.shape, self.semiring.zero, dtype=dtype)
        for i, j, v in self.items():
            out[i, j] = v
        return out

    def pruned(self) -> "SparseMatrix":
        """Associative-array view: drop labels whose row or column is empty."""
        used_rows = list(self._data)
        used_cols = sorted({j for row in self._data.values() for j in row})
        rows = KeySpace(self.rows.labels[i] for i in used_rows)
        cols = KeySpace(self.cols.labels[j] for j in used_cols)
        cmap = {j: cols.index(self.cols.labels[j]) for j in used_cols}
        data = {rows.index(self.rows.labels[i]): {cmap[j]: v for j, v in row.items()}
                for i, row in self._data.items()}
        return SparseMatrix(rows, cols, data, self.semiring)

    def with_semiring(self, semiring: Semiring) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.cols, self._data, semiring)

    @property
    def T(self) -> "SparseMatrix":
        return transpose(self)


@dataclass(frozen=True)
class DenseVector:
    """One value per label of ``keys``; zeros are stored."""

    keys: KeySpace
    values: tuple = field(default=())

    def __post_init__(self):
        if not isinstance(self.values, tuple):
            object.__setattr__(self, "values", tuple(self.values))
        if len(self.values) != len(self.keys):
            raise ValueError(f"vector has {len(self.values)} values for {len(self.keys)} keys")

    @classmethod
    def filled(cls, keys: KeySpace, value: Any) -> "DenseVector":
        return cls(keys, (value,) * len(keys))

    @classmethod
    def ones(cls, keys: KeySpace, semiring: Semiring = PLUS_TIMES) -> "DenseVector":
        return cls.filled(keys, semiring.one)

    @classmethod
    def zeros(cls, keys: KeySpace, semiring: Semiring = PLUS_TIMES) -> "DenseVector":
        return cls.filled(keys, semiring.zero)

    def __getitem__(self, label: Label) -> Any:
        return self.values[self.keys.index(label)]

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Any]:
        return iter(self.values)

    def items(self) -> Iterator[tuple[Label, Any]]:
        return zip(self.keys.labels, self.values)

    def to_numpy(self, dtype=float) -> np.ndarray:
        return np.asarray(self.values, dtype=dtype)

    def tolist(self) -> list:
        return list(self.values)

    def map(self, fn: Callable[[Any], Any]) -> "DenseVector":
        return DenseVector(self.keys, tuple(fn(v) for v in self.values))


def _as_keyspace(labels, n: int) -> KeySpace:
    if labels is None:
        return KeySpace(range(n))
    if isinstance(labels, KeySpace):
        return labels
    return KeySpace(labels)


def from_triples(rows: KeySpace | Iterable[Label] | None,
                 cols: KeySpace | Iterable[Label] | None,
                 triples: Iterable[tuple[Label, Label, Any]],
                 semiring: Semiring = PLUS_TIMES,
                 collision: str = "add") -> SparseMatrix:
    """Build a matrix from ``(row, col, value)`` triples.

    ``rows``/``cols`` may be ``None`` to take the labels used by the triples.
    Duplicate keys are combined with the semiring ``add`` (``collision="add"``)
    or the last one wins (``"overwrite"``).  Results equal to zero are dropped.
    """
    if collision not in ("add", "overwrite"):
        raise ValueError(f"collision must be 'add' or 'overwrite', not {collision!r}")
    triples = list(triples)
    rows = KeySpace(r for r, _, _ in triples) if rows is None else rows
    cols = KeySpace(c for _, c, _ in triples) if cols is None else cols
    if not isinstance(rows, KeySpace):
        rows = KeySpace(rows)
    if not isinstance(cols, KeySpace):
        cols = KeySpace(cols)
    data: dict[int, dict[int, Any]] = {}
    add = semiring.add
    for r, c, v in triples:
        i, j = rows.index(r), cols.index(c)
        row = data.setdefault(i, {})
        if collision == "add" and j in row:
            row[j] = add(row[j], v)
        else:
            row[j] = v
    return SparseMatrix(rows, cols, data, semiring)


def get(A: SparseMatrix, row: Label, col: Label) -> Any:
    return A.get(row, col)


def transpose(A: SparseMatrix) -> SparseMatrix:
    data: dict[int, dict[int, Any]] = {}
    for i, j, v in A.items():
        data.setdefault(j, {})[i] = v
    return SparseMatrix(A.cols, A.rows, data, A.semiring)


def equal(A: SparseMatrix, B: SparseMatrix, tol: float = 0.0) -> bool:
    """Same key spaces and every entry within ``tol`` (absolute)."""
    if A.rows != B.rows or A.cols != B.cols:
        return False
    zero = A.semiring.zero
    for i in set(A._data) | set(B._data):
        ra, rb = A._data.get(i, {}), B._data.get(i, {})
        for j in set(ra) | set(rb):
            a, b = ra.get(j, zero), rb.get(j, zero)
            if a == b:
                continue
            try:
                if not abs(a - b) <= tol:
                    return False
            except TypeError:
                return False
    return True


# -- text encoding -------------------------------------------------------------


def format_value(v: Any) -> str:
    """Decimal text that parses back to the same value (17 significant digits at most)."""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        # repr is the shortest string that round-trips
        return repr(float(v))
    raise TypeError(f"cannot encode value of type {type(v).__name__}")


def parse_value(text: str) -> int | float:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"not a number: {text!r}") from None


def _check_label_text(label) -> str:
    s = str(label)
    if "\t" in s or "\n" in s or "\r" in s:
        raise ValueError(f"label {s!r} contains a tab or newline")
    return s


def write_tsv(A: SparseMatrix, fh: TextIO) -> int:
    """Write ``row<TAB>col<TAB>value`` lines in sorted order; returns the line count."""
    n = 0
    for r, c, v in A.triples():
        fh.write(f"{_check_label_text(r)}\t{_check_label_text(c)}\t{format_value(v)}\n")
        n += 1
    return n


def read_tsv(fh: TextIO, rows: KeySpace | None = None, cols: KeySpace | None = None,
             semiring: Semiring = PLUS_TIMES, collision: str = "add",
             source: str | None = None) -> SparseMatrix:
    """Parse triples written by :func:`write_tsv`; labels come back as strings."""
    triples = []
    for lineno, line in enumerate(fh, 1):
        line = line.rstrip("\n").rstrip("\r")
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", lineno, source)
        try:
            value = parse_value(parts[2])
        except ValueError as exc:
            raise ParseError(str(exc), lineno, source) from None
        triples.append((parts[0], parts[1], value))
    return from_triples(rows, cols, triples, semiring, collision)

"""Sorted ``(row, col) -> value`` tables standing in for a NoSQL tablet.

A :class:`Table` keeps its keys in lexicographic ``(row, col)`` order and can
snapshot itself to a text file::

    #graphulo-table v1 <name>
    row<TAB>col<TAB>value
    ...

Numbers are written as shortest round-trip decimals, strings as JSON string
literals.  A :class:`Store` is a directory of such snapshots plus the
matrix bookkeeping needed to rebuild a :class:`~graphulo.sparse.SparseMatrix`
exactly, including empty rows and columns.
"""

from __future__ import annotations

import bisect
import json
import os
import re
import tempfile
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Iterator

from filelock import FileLock

from .errors import IoFailure, NameCollision, NotFound, ParseError
from .semiring import get_semiring
from .sparse import KeySpace, SparseMatrix, format_value, parse_value

__all__ = ["ScanRange", "Table", "Store", "HEADER_PREFIX"]

HEADER_PREFIX = "#graphulo-table v1 "
_NAME_RE = re.compile(r"^[A-Za-z0-9_][A-Za-z0-9_.\-]*$")
_KEYS_SUFFIX = ".keys"

Triple = tuple[str, str, Any]


@dataclass(frozen=True)
class ScanRange:
    """Row-key range; ``None`` bounds are open."""

    start: str | None = None
    end: str | None = None
    start_inclusive: bool = True
    end_inclusive: bool = False

    def __contains__(self, row: str) -> bool:
        if self.start is not None:
            if row < self.start or (row == self.start and not self.start_inclusive):
                return False
        if self.end is not None:
            if row > self.end or (row == self.end and not self.end_inclusive):
                return False
        return True

    @classmethod
    def exact(cls, row: str) -> "ScanRange":
        return cls(row, row, True, True)


def _encode(v: Any) -> str:
    if isinstance(v, str):
        return json.dumps(v, ensure_ascii=False)
    return format_value(v)


def _decode(text: str) -> Any:
    if text.startswith('"'):
        return json.loads(text)
    return parse_value(text)


def _check_key(k: Any, what: str) -> str:
    if not isinstance(k, str):
        raise TypeError(f"{what} key must be str, got {type(k).__name__}")
    if "\t" in k or "\n" in k or "\r" in k:
        raise ValueError(f"{what} key {k!r} contains a tab or newline")
    return k


class Table:
    """In-memory sorted table with optional snapshot file.

    One writer at a time; scans iterate over a copy taken under the lock, so
    readers see a consistent view while a write proceeds.
    """

    def __init__(self, name: str, path: str | os.PathLike | None = None):
        self.name = name
        self.path = Path(path) if path is not None else None
        self._keys: list[tuple[str, str]] = []
        self._values: dict[tuple[str, str], Any] = {}
        self._lock = threading.RLock()

    def __len__(self) -> int:
        return len(self._keys)

    def __repr__(self) -> str:
        return f"<Table {self.name!r}, {len(self)} entries>"

    def batch_write(self, triples: Iterable[Triple]) -> int:
        """Upsert triples; returns how many were written (overwrites count)."""
        staged = []
        for row, col, value in triples:
            key = (_check_key(row, "row"), _check_key(col, "column"))
            if not isinstance(value, (int, float, str)):
                raise TypeError(f"unsupported value type {type(value).__name__}")
            staged.append((key, value))
        if not staged:
            return 0
        with self._lock:
            fresh = False
            for key, value in staged:
                if key not in self._values:
                    fresh = True
                self._values[key] = value
            if fresh:
                self._keys = sorted(self._values)
        return len(staged)

    def get(self, row: str, col: str, default: Any = None) -> Any:
        return self._values.get((row, col), default)

    def scan(self, rng: ScanRange | None = None, fn: Callable[..., Any] | None = None,
             index_aware: bool = False) -> Iterator[Triple]:
        """Yield ``(row, col, value)`` in sorted order, restricted to ``rng``.

        ``fn`` runs on each value as it is read, like a server-side iterator
        (``fn(value)``, or ``fn(row, col, value)`` with ``index_aware``).
        """
        with self._lock:
            keys = self._keys
            lo, hi = 0, len(keys)
            if rng is not None:
                if rng.start is not None:
                    lo = bisect.bisect_left(keys, (rng.start, ""))
                if rng.end is not None:
                    hi = bisect.bisect_left(keys, (rng.end, ""))
                    if rng.end_inclusive:
                        while hi < len(keys) and keys[hi][0] == rng.end:
                            hi += 1
            view = [(k, self._values[k]) for k in keys[lo:hi]]
        for (row, col), value in view:
            if rng is not None and row not in rng:
                continue
            if fn is not None:
                value = fn(row, col, value) if index_aware else fn(value)
            yield row, col, value

    # -- persistence ----------------------------------------------------------

    def dumps(self) -> str:
        lines = [HEADER_PREFIX + self.name]
        for row, col, value in self.scan():
            lines.append(f"{row}\t{col}\t{_encode(value)}")
        return "\n".join(lines) + "\n"

    def snapshot(self, path: str | os.PathLike | None = None) -> Path:
        target = Path(path) if path is not None else self.path
        if target is None:
            raise ValueError(f"table {self.name!r} has no snapshot path")
        text = self.dumps()
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=target.parent)
            with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
            os.replace(tmp, target)
        except OSError as exc:
            raise IoFailure(f"cannot write snapshot {target}: {exc}") from exc
        return target

    @classmethod
    def loads(cls, text: str, source: str | None = None) -> "Table":
        lines = text.split("\n")
        if not lines or not lines[0].startswith(HEADER_PREFIX):
            raise ParseError(f"missing header {HEADER_PREFIX.strip()!r}", 1, source)
        table = cls(lines[0][len(HEADER_PREFIX):])
        triples = []
        for lineno, line in enumerate(lines[1:], 2):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"expected 3 tab-separated fields, got {len(parts)}", lineno, source)
            try:
                value = _decode(parts[2])
            except ValueError as exc:
                raise ParseError(f"bad value: {exc}", lineno, source) from None
            triples.append((parts[0], parts[1], value))
        table.batch_write(triples)
        return table

    @classmethod
    def load(cls, path: str | os.PathLike) -> "Table":
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except FileNotFoundError:
            raise NotFound(f"no snapshot at {path}") from None
        except OSError as exc:
            raise IoFailure(f"cannot read snapshot {path}: {exc}") from exc
        table = cls.loads(text, source=str(path))
        table.path = path
        return table


def _label_type(label) -> str:
    if isinstance(label, bool) or not isinstance(label, (int, str)):
        raise TypeError(f"only int or str labels can be stored, got {type(label).__name__}")
    return "int" if isinstance(label, int) else "str"


class Store:
    """A named collection of tables, persisted under ``root`` (or memory-only when ``root`` is None)."""

    def __init__(self, root: str | os.PathLike | None = None):
        self.root = Path(root) if root is not None else None
        self._tables: dict[str, Table] = {}
        if self.root is not None:
            try:
                self.root.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise IoFailure(f"cannot create store at {self.root}: {exc}") from exc
            self._lock = FileLock(str(self.root / ".lock"))
        else:
            self._lock = threading.RLock()

    def __repr__(self) -> str:
        return f"<Store {str(self.root) if self.root else ':memory:'}>"

    def _path(self, name: str) -> Path | None:
        return None if self.root is None else self.root / f"{name}.tsv"

    def _all_names(self) -> set[str]:
        names = set(self._tables)
        if self.root is not None:
            names |= {p.name[:-4] for p in self.root.glob("*.tsv")}
        return names

    def names(self) -> list[str]:
        """User-visible table names (bookkeeping tables excluded)."""
        return sorted(n for n in self._all_names() if not n.endswith(_KEYS_SUFFIX))

    def __contains__(self, name: str) -> bool:
        return name in self._all_names()

    @staticmethod
    def check_name(name: str) -> str:
        if not _NAME_RE.match(name) or name.endswith(_KEYS_SUFFIX):
            raise ValueError(f"invalid table name {name!r}")
        return name

    def create_table(self, name: str, exist_ok: bool = False) -> Table:
        if name in self:
            if exist_ok:
                return self.table(name)
            raise NameCollision(f"table {name!r} already exists")
        table = Table(name, self._path(name))
        self._tables[name] = table
        return table

    def table(self, name: str) -> Table:
        if name in self._tables:
            return self._tables[name]
        path = self._path(name)
        if path is None or not path.exists():
            raise NotFound(f"no table named {name!r}")
        table = Table.load(path)
        self._tables[name] = table
        return table

    def write(self, name: str, triples: Iterable[Triple], create: bool = True) -> int:
        """Batch-write into a table and persist it."""
        with self._lock:
            table = self.create_table(name, exist_ok=True) if create else self.table(name)
            n = table.batch_write(triples)
            if table.path is not None:
                table.snapshot()
        return n

    def drop(self, name: str) -> None:
        with self._lock:
            if name not in self:
                raise NotFound(f"no table named {name!r}")
            for n in (name, name + _KEYS_SUFFIX):
                self._tables.pop(n, None)
                path = self._path(n)
                if path is not None and path.exists():
                    path.unlink()

    # -- matrices -------------------------------------------------------------

    def store_matrix(self, A: SparseMatrix, name: str, kind: str = "matrix",
                     overwrite: bool = False) -> Table:
        """Persist ``A`` as table ``name`` plus its key spaces; ``load_matrix`` inverts it."""
        self.check_name(name)
        with self._lock:
            if name in self:
                if not overwrite:
                    raise NameCollision(f"table {name!r} already exists")
                self.drop(name)
            keys = [("meta", "kind", kind), ("meta", "semiring", A.semiring.name)]
            keys += [("row", str(lab), _label_type(lab)) for lab in A.rows]
            keys += [("col", str(lab), _label_type(lab)) for lab in A.cols]
            data = [(str(r), str(c), v) for r, c, v in A.triples()]
            for n, triples in ((name + _KEYS_SUFFIX, keys), (name, data)):
                table = Table(n, self._path(n))
                table.batch_write(triples)
                self._tables[n] = table
                if table.path is not None:
                    table.snapshot()
            return self._tables[name]

    def _keys_table(self, name: str) -> Table:
        try:
            return self.table(name + _KEYS_SUFFIX)
        except NotFound:
            raise NotFound(f"table {name!r} does not hold a matrix") from None

    def matrix_kind(self, name: str) -> str:
        return self._keys_table(name).get("meta", "kind", "matrix")

    def load_matrix(self, name: str) -> SparseMatrix:
        data_table = self.table(name)
        keys = self._keys_table(name)
        semiring = get_semiring(keys.get("meta", "semiring", "plus_times"))
        labels: dict[str, dict[str, Any]] = {"row": {}, "col": {}}
        for axis, text, typ in keys.scan():
            if axis in labels:
                labels[axis][text] = int(text) if typ == "int" else text
        rows = KeySpace(labels["row"].values())
        cols = KeySpace(labels["col"].values())
        data: dict[int, dict[int, Any]] = {}
        for r, c, v in data_table.scan():
            try:
                i = rows.index(labels["row"][r])
                j = cols.index(labels["col"][c])
            except KeyError:
                raise ParseError(f"entry ({r!r}, {c!r}) uses a label missing from the key table",
                                 source=name) from None
            data.setdefault(i, {})[j] = v
        return SparseMatrix(rows, cols, data, semiring)

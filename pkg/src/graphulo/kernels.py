"""Sparse kernels: SpGEMM, SpMV, SpEWiseX, SpRef, SpAsgn, Scale, Apply, Reduce.

All kernels are pure functions of immutable matrices.  The semiring argument
defaults to the semiring carried by the first operand.
"""

from __future__ import annotations

import math
import operator
from typing import Any, Callable, Hashable, Iterable

from .errors import DimensionMismatch, NotSquare
from .semiring import Semiring
from .sparse import DenseVector, KeySpace, SparseMatrix

__all__ = [
    "spgemm",
    "spmv",
    "spewisex",
    "spref",
    "spasgn",
    "scale",
    "apply",
    "reduce",
    "add",
    "subtract",
    "diagonal",
    "remove_diagonal",
    "triu",
    "frobenius_norm",
]

Selector = Iterable[Hashable] | Callable[[Hashable], bool] | None


def _sr(A: SparseMatrix, sr: Semiring | None) -> Semiring:
    return A.semiring if sr is None else sr


def _remap(A: SparseMatrix, rows: KeySpace, cols: KeySpace) -> dict[int, dict[int, Any]]:
    """Positional data of ``A`` re-expressed in the (super)spaces ``rows``/``cols``."""
    if A.rows == rows and A.cols == cols:
        return A._data
    rmap = [rows.index(lab) for lab in A.rows.labels]
    cmap = [cols.index(lab) for lab in A.cols.labels]
    return {rmap[i]: {cmap[j]: v for j, v in row.items()} for i, row in A._data.items()}


def _align(A: SparseMatrix, B: SparseMatrix, strict: bool):
    if A.rows == B.rows and A.cols == B.cols:
        return A.rows, A.cols, A._data, B._data
    if strict:
        raise DimensionMismatch(
            f"shape mismatch: {A.shape} with rows {A.rows!r}, cols {A.cols!r} "
            f"vs {B.shape} with rows {B.rows!r}, cols {B.cols!r}")
    rows, cols = A.rows.union(B.rows), A.cols.union(B.cols)
    return rows, cols, _remap(A, rows, cols), _remap(B, rows, cols)


def spgemm(A: SparseMatrix, B: SparseMatrix, sr: Semiring | None = None,
           strict: bool = True) -> SparseMatrix:
    """``C(i, j) = add_k A(i, k) * B(k, j)`` over the semiring ``sr``.

    Requires ``A.cols == B.rows``; with ``strict=False`` differing inner key
    spaces are allowed and only shared labels contribute.
    """
    sr = _sr(A, sr)
    if A.cols == B.rows:
        bdata = B._data
    elif strict:
        raise DimensionMismatch(f"inner key spaces differ: {A.cols!r} vs {B.rows!r}")
    else:
        bdata = {A.cols.index(lab): B._data[B.rows.index(lab)]
                 for lab in B.rows.labels
                 if lab in A.cols and B.rows.index(lab) in B._data}
    if not sr.checked:
        return _spgemm_union(A, B, bdata, sr)

    add, mul = sr.add, sr.multiply
    out: dict[int, dict[int, Any]] = {}
    for i, arow in A._data.items():
        acc: dict[int, Any] = {}
        for k, a in arow.items():
            brow = bdata.get(k)
            if not brow:
                continue
            for j, b in brow.items():
                p = mul(a, b)
                if j in acc:
                    acc[j] = add(acc[j], p)
                else:
                    acc[j] = p
        if acc:
            out[i] = acc
    return SparseMatrix(A.rows, B.cols, out, sr)


def _spgemm_union(A: SparseMatrix, B: SparseMatrix, bdata, sr: Semiring) -> SparseMatrix:
    # zero may not annihilate: every (i, j) is visited, k ranges over the union
    # of supp(A(i, :)) and supp(B(:, j)).  Assumes multiply(zero, zero) == zero.
    zero = sr.zero
    bcols: dict[int, dict[int, Any]] = {}
    for k, brow in bdata.items():
        for j, b in brow.items():
            bcols.setdefault(j, {})[k] = b
    out: dict[int, dict[int, Any]] = {}
    for i in range(len(A.rows)):
        arow = A._data.get(i, {})
        acc_row = {}
        for j in range(len(B.cols)):
            bcol = bcols.get(j, {})
            ks = sorted(set(arow) | set(bcol))
            if not ks:
                continue
            acc = zero
            for k in ks:
                acc = sr.add(acc, sr.multiply(arow.get(k, zero), bcol.get(k, zero)))
            acc_row[j] = acc
        out[i] = acc_row
    return SparseMatrix(A.rows, B.cols, out, sr)


def spmv(A: SparseMatrix, x: DenseVector, sr: Semiring | None = None) -> DenseVector:
    """``y(i) = add_j A(i, j) * x(j)``."""
    sr = _sr(A, sr)
    if x.keys != A.cols:
        raise DimensionMismatch(f"vector keys {x.keys!r} do not match matrix columns {A.cols!r}")
    add, mul, zero = sr.add, sr.multiply, sr.zero
    xs = x.values
    y = [zero] * len(A.rows)
    if sr.checked:
        for i, row in A._data.items():
            acc = zero
            for j, a in row.items():
                xj = xs[j]
                if xj == zero:
                    continue
                acc = add(acc, mul(a, xj))
            y[i] = acc
    else:
        for i in range(len(A.rows)):
            row = A._data.get(i, {})
            acc = zero
            for j, xj in enumerate(xs):
                acc = add(acc, mul(row.get(j, zero), xj))
            y[i] = acc
    return DenseVector(A.rows, tuple(y))


def spewisex(A: SparseMatrix, B: SparseMatrix, fn: Callable[[Any, Any], Any],
             strict: bool = True) -> SparseMatrix:
    """``C(i, j) = fn(A(i, j), B(i, j))`` on the union of supports.

    Missing operands are passed as the semiring zero, so subtraction works;
    for ``fn = multiply`` the result support is the intersection.
    """
    rows, cols, ad, bd = _align(A, B, strict)
    zero = A.semiring.zero
    out: dict[int, dict[int, Any]] = {}
    for i in sorted(set(ad) | set(bd)):
        ra, rb = ad.get(i, {}), bd.get(i, {})
        out[i] = {j: fn(ra.get(j, zero), rb.get(j, zero)) for j in set(ra) | set(rb)}
    return SparseMatrix(rows, cols, out, A.semiring)


def add(A: SparseMatrix, B: SparseMatrix, sr: Semiring | None = None,
        strict: bool = False) -> SparseMatrix:
    """Element-wise semiring sum; key spaces are unioned unless ``strict``."""
    sr = _sr(A, sr)
    rows, cols, ad, bd = _align(A, B, strict)
    out: dict[int, dict[int, Any]] = {}
    for i in set(ad) | set(bd):
        ra, rb = ad.get(i, {}), bd.get(i, {})
        row = dict(ra)
        for j, b in rb.items():
            row[j] = sr.add(row[j], b) if j in row else b
        out[i] = row
    return SparseMatrix(rows, cols, out, sr)


def subtract(A: SparseMatrix, B: SparseMatrix, strict: bool = True) -> SparseMatrix:
    return spewisex(A, B, operator.sub, strict=strict)


def _select(keys: KeySpace, sel: Selector) -> list:
    if sel is None:
        return list(keys.labels)
    if callable(sel):
        return [lab for lab in keys.labels if sel(lab)]
    labels = list(sel)
    for lab in labels:
        keys.index(lab)
    return labels


def spref(A: SparseMatrix, rows: Selector = None, cols: Selector = None) -> SparseMatrix:
    """Sub-matrix on the selected labels (a label collection or a predicate; ``None`` = all)."""
    rsel = KeySpace(_select(A.rows, rows))
    csel = KeySpace(_select(A.cols, cols))
    if rsel == A.rows and csel == A.cols:
        return A
    rmap = {A.rows.index(lab): i for i, lab in enumerate(rsel.labels)}
    cmap = {A.cols.index(lab): j for j, lab in enumerate(csel.labels)}
    out: dict[int, dict[int, Any]] = {}
    for i, row in A._data.items():
        ni = rmap.get(i)
        if ni is None:
            continue
        out[ni] = {cmap[j]: v for j, v in row.items() if j in cmap}
    return SparseMatrix(rsel, csel, out, A.semiring)


def spasgn(A: SparseMatrix, rows: Selector, cols: Selector, B: SparseMatrix) -> SparseMatrix:
    """Replace the selected block of ``A`` by ``B``, including deleting entries where ``B`` is zero.

    ``B`` must be labeled with exactly the selected row and column labels.
    """
    rsel = KeySpace(_select(A.rows, rows))
    csel = KeySpace(_select(A.cols, cols))
    if B.rows != rsel or B.cols != csel:
        raise DimensionMismatch(
            f"block labeled {B.rows!r} x {B.cols!r} does not match selection {rsel!r} x {csel!r}")
    rpos = {A.rows.index(lab) for lab in rsel.labels}
    cpos = {A.cols.index(lab) for lab in csel.labels}
    out: dict[int, dict[int, Any]] = {}
    for i, row in A._data.items():
        if i in rpos:
            out[i] = {j: v for j, v in row.items() if j not in cpos}
        else:
            out[i] = dict(row)
    for bi, bj, v in B.items():
        i = A.rows.index(rsel.labels[bi])
        j = A.cols.index(csel.labels[bj])
        out.setdefault(i, {})[j] = v
    return SparseMatrix(A.rows, A.cols, out, A.semiring)


def scale(A: SparseMatrix, c: Any, sr: Semiring | None = None) -> SparseMatrix:
    """Multiply every stored entry by the scalar ``c`` (on the right)."""
    sr = _sr(A, sr)
    mul = sr.multiply
    out = {i: {j: mul(v, c) for j, v in row.items()} for i, row in A._data.items()}
    return SparseMatrix(A.rows, A.cols, out, sr)


def apply(A: SparseMatrix, fn: Callable[..., Any], index_aware: bool = False,
          densify: bool = False) -> SparseMatrix:
    """Map ``fn`` over stored entries; produced zeros are dropped.

    With ``index_aware=True``, ``fn`` receives ``(i, j, value)`` where ``i``
    and ``j`` are positions in the row and column key spaces.  By default
    ``fn`` only sees stored entries, so absent entries stay absent even when
    ``fn(0) != 0``.  Pass ``densify=True`` to evaluate ``fn`` at every position,
    absent ones as the semiring zero.
    """
    if densify:
        zero = A.semiring.zero
        out = {}
        for i in range(len(A.rows)):
            row = A._data.get(i, {})
            if index_aware:
                out[i] = {j: fn(i, j, row.get(j, zero)) for j in range(len(A.cols))}
            else:
                out[i] = {j: fn(row.get(j, zero)) for j in range(len(A.cols))}
    elif index_aware:
        out = {i: {j: fn(i, j, v) for j, v in row.items()} for i, row in A._data.items()}
    else:
        out = {i: {j: fn(v) for j, v in row.items()} for i, row in A._data.items()}
    return SparseMatrix(A.rows, A.cols, out, A.semiring)


def reduce(A: SparseMatrix, axis: str = "rows", sr: Semiring | None = None) -> DenseVector:
    """Fold each row (``axis="rows"``) or column (``"cols"``) with the semiring add."""
    sr = _sr(A, sr)
    if axis in ("rows", "row"):
        acc = [sr.zero] * len(A.rows)
        for i, row in A._data.items():
            acc[i] = sr.fold(row.values())
        return DenseVector(A.rows, tuple(acc))
    if axis in ("cols", "col", "columns"):
        acc = [sr.zero] * len(A.cols)
        for _, j, v in A.items():
            acc[j] = sr.add(acc[j], v)
        return DenseVector(A.cols, tuple(acc))
    raise ValueError(f"axis must be 'rows' or 'cols', not {axis!r}")


def diagonal(A: SparseMatrix) -> DenseVector:
    if A.rows != A.cols:
        raise NotSquare(f"diagonal needs a square matrix with matching key spaces, got {A.shape}")
    zero = A.semiring.zero
    return DenseVector(A.rows, tuple(A._data.get(i, {}).get(i, zero) for i in range(len(A.rows))))


def remove_diagonal(A: SparseMatrix) -> SparseMatrix:
    """``A - diag(A)``."""
    return subtract(A, SparseMatrix.diag(diagonal(A), A.semiring))


def triu(A: SparseMatrix, strict: bool = False) -> SparseMatrix:
    """Upper triangle by position, as an index-aware apply."""
    zero = A.semiring.zero
    if strict:
        return apply(A, lambda i, j, v: v if i < j else zero, index_aware=True)
    return apply(A, lambda i, j, v: v if i <= j else zero, index_aware=True)


def frobenius_norm(A: SparseMatrix) -> float:
    try:
        return math.hypot(*(float(v) for _, _, v in A.items()))
    except OverflowError:
        return math.inf

"""k-truss extraction on unoriented incidence matrices.

The support of an edge ``(u, w)`` is the number of 2s in its row of
``R = E A``: row ``e`` of ``E A`` is ``A(u, :) + A(w, :)``, which equals 2
exactly at the common neighbours of ``u`` and ``w``.  Edges whose support is
below ``k - 2`` are removed all at once, and ``R`` is corrected with the
adjacency of the removed edges rather than recomputed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterator

from . import kernels
from .errors import MalformedIncidence
from .schema import adjacency_from_incidence
from .semiring import PLUS_TIMES
from .sparse import DenseVector, SparseMatrix, transpose

__all__ = [
    "TrussState",
    "validate_incidence",
    "edge_support",
    "truss_states",
    "ktruss",
    "truss_decomposition",
    "edge_endpoints",
]


@dataclass(frozen=True)
class TrussState:
    """One pass of the peeling loop.

    ``E`` and ``R`` are the matrices *after* removing ``removed`` (the
    previous pass's ``x``), ``s`` is the support computed from that ``R``,
    and ``x`` lists the edges that fall below threshold next.
    """

    E: SparseMatrix
    d: DenseVector
    R: SparseMatrix
    s: DenseVector
    x: tuple
    removed: tuple

    @property
    def x_c(self) -> tuple:
        xs = set(self.x)
        return tuple(e for e in self.E.rows if e not in xs)


def validate_incidence(E: SparseMatrix) -> None:
    """Each row must hold exactly two 1s and no two rows may join the same pair."""
    seen: dict[tuple[int, int], Hashable] = {}
    for i in range(len(E.rows)):
        row = E.row_items(i)
        label = E.rows[i]
        if len(row) != 2 or any(v != 1 for v in row.values()):
            raise MalformedIncidence(
                f"edge {label!r} must have exactly two entries equal to 1, got {dict(row)!r}")
        pair = tuple(row)
        if pair in seen:
            raise MalformedIncidence(f"edges {seen[pair]!r} and {label!r} are parallel")
        seen[pair] = label


def _support(R: SparseMatrix) -> DenseVector:
    twos = kernels.apply(R, lambda v: 1 if v == 2 else 0)
    return kernels.spmv(twos, DenseVector.ones(R.cols), PLUS_TIMES)


def edge_support(E: SparseMatrix) -> tuple[SparseMatrix, DenseVector]:
    """``R = E A`` and the per-edge triangle count ``s = (R == 2) 1``."""
    validate_incidence(E)
    R = kernels.spgemm(E, adjacency_from_incidence(E), PLUS_TIMES)
    return R, _support(R)


def _below(s: DenseVector, k: int) -> tuple:
    return tuple(lab for lab, v in s.items() if v < k - 2)


def truss_states(E: SparseMatrix, k: int) -> Iterator[TrussState]:
    """Yield the loop state after initialization and after every removal pass."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    validate_incidence(E)
    d = kernels.reduce(E, "cols", PLUS_TIMES)
    A = kernels.subtract(kernels.spgemm(transpose(E), E, PLUS_TIMES), SparseMatrix.diag(d))
    R = kernels.spgemm(E, A, PLUS_TIMES)
    s = _support(R)
    x = _below(s, k)
    yield TrussState(E, d, R, s, x, ())
    while x:
        drop = set(x)
        keep = lambda lab: lab not in drop  # noqa: E731
        E_x = kernels.spref(E, x)
        E = kernels.spref(E, keep)
        d_x = kernels.reduce(E_x, "cols", PLUS_TIMES)
        A_x = kernels.subtract(kernels.spgemm(transpose(E_x), E_x, PLUS_TIMES), SparseMatrix.diag(d_x))
        R = kernels.spref(R, keep)
        R = kernels.subtract(R, kernels.spgemm(E, A_x, PLUS_TIMES))
        d = kernels.reduce(E, "cols", PLUS_TIMES)
        s = _support(R)
        removed = x
        x = _below(s, k)
        yield TrussState(E, d, R, s, x, removed)


def ktruss(E: SparseMatrix, k: int) -> SparseMatrix:
    """Incidence matrix of the maximal k-truss (every edge in >= k-2 triangles).

    Surviving rows keep their labels; the vertex key space is unchanged.
    """
    state = None
    for state in truss_states(E, k):
        pass
    return state.E


def truss_decomposition(E: SparseMatrix) -> dict[int, SparseMatrix]:
    """Maximal k-truss for k = 3, 4, ... up to and including the first empty one.

    Each truss is computed from the previous one.  An edgeless input gives ``{}``.
    """
    validate_incidence(E)
    out: dict[int, SparseMatrix] = {}
    if E.nnz == 0:
        return out
    k, current = 3, E
    while True:
        current = ktruss(current, k)
        out[k] = current
        if current.nnz == 0:
            return out
        k += 1


def edge_endpoints(E: SparseMatrix) -> list[tuple[Hashable, Hashable, Hashable]]:
    """``(edge, u, v)`` for every nonempty incidence row, endpoints in key order."""
    out = []
    for i in E.nonempty_rows():
        cols = [E.cols[j] for j in E.row_items(i)]
        out.append((E.rows[i], *cols))
    return out

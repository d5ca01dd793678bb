"""Jaccard coefficients from the strict upper triangle of a symmetric adjacency matrix."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable

from . import kernels
from .errors import NonBinaryWeight, NotSquare, NotSymmetric, SelfLoopPresent
from .semiring import PLUS_OR, PLUS_TIMES
from .sparse import DenseVector, SparseMatrix, equal, transpose

__all__ = ["JaccardWork", "jaccard", "jaccard_work", "jaccard_pair", "validate_simple_graph"]


@dataclass(frozen=True)
class JaccardWork:
    """Intermediates of one Jaccard computation.

    ``numerator`` is ``U^2 + triu(U U') + triu(U' U)`` with its diagonal
    removed, i.e. the common-neighbour counts of the upper triangle;
    ``upper`` holds the coefficients before symmetrization.
    """

    U: SparseMatrix
    U2: SparseMatrix
    X: SparseMatrix
    Y: SparseMatrix
    d: DenseVector
    numerator: SparseMatrix
    upper: SparseMatrix
    J: SparseMatrix


def validate_simple_graph(A: SparseMatrix) -> None:
    if A.rows != A.cols:
        raise NotSquare(f"adjacency matrix must be square with matching labels, got {A.shape}")
    for i, j, v in A.items():
        if i == j:
            raise SelfLoopPresent(f"self loop at {A.rows[i]!r}")
        if v != 1:
            raise NonBinaryWeight(f"entry ({A.rows[i]!r}, {A.cols[j]!r}) = {v!r}; expected 0/1")
    if not equal(A, transpose(A)):
        raise NotSymmetric("adjacency matrix is not symmetric")


def jaccard_work(A: SparseMatrix) -> JaccardWork:
    validate_simple_graph(A)
    d = kernels.reduce(A, "rows", PLUS_TIMES)
    U = kernels.triu(A)
    Ut = transpose(U)
    X = kernels.spgemm(U, Ut, PLUS_TIMES)
    Y = kernels.spgemm(Ut, U, PLUS_TIMES)
    U2 = kernels.spgemm(U, U, PLUS_TIMES)
    num = kernels.add(kernels.add(U2, kernels.triu(X)), kernels.triu(Y))
    num = kernels.remove_diagonal(num)
    deg = d.values
    # only the numerator's support is visited; d broadcasts by row and column position
    upper = kernels.apply(num, lambda i, j, v: v / (deg[i] + deg[j] - v), index_aware=True)
    J = kernels.add(upper, transpose(upper))
    return JaccardWork(U, U2, X, Y, d, num, upper, J)


def jaccard(A: SparseMatrix) -> SparseMatrix:
    """Symmetric matrix of ``|N(i) & N(j)| / |N(i) | N(j)|`` for pairs sharing a neighbour.

    Pairs with no common neighbour are absent rather than stored as 0, and
    the diagonal is empty.
    """
    return jaccard_work(A).J


def jaccard_pair(A: SparseMatrix, i: Hashable, j: Hashable) -> float:
    """Single coefficient from two semiring dot products of rows ``i`` and ``j``.

    The numerator counts positions where both rows are set (plus/times on
    0/1 data is plus/AND); the denominator counts positions where either is
    set with the unchecked plus/OR pair.
    """
    validate_simple_graph(A)
    a_i = kernels.spref(A, [i])
    a_j = transpose(kernels.spref(A, [j]))
    both = kernels.spgemm(a_i, a_j, PLUS_TIMES).get(i, j)
    either = kernels.spgemm(a_i.with_semiring(PLUS_OR), a_j.with_semiring(PLUS_OR), PLUS_OR).get(i, j)
    if either == 0:
        return 0.0
    return both / either

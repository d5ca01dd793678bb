"""Nonnegative matrix factorization by alternating least squares.

The normal equations are solved with explicit inverses of the small ``k x k``
Gram matrices, and those inverses come from the Newton iteration
``X <- X (2I - A X)``.  Every step is a sparse kernel call, so the whole
factorization runs on :class:`~graphulo.sparse.SparseMatrix` values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterator

import numpy as np

from . import kernels
from .errors import NonConvergence, NotSquare, RankDeficiency
from .semiring import PLUS_TIMES
from .sparse import KeySpace, SparseMatrix, transpose

__all__ = [
    "InverseState",
    "newton_iterates",
    "newton_inverse",
    "NmfConfig",
    "NmfFactors",
    "nmf",
    "Topic",
    "topics_report",
]


@dataclass(frozen=True)
class InverseState:
    X: SparseMatrix
    row_norm: float
    col_norm: float
    iteration: int
    step: float      # |X_t - X_{t-1}|_F
    residual: float  # |I - A X_{t-1}|_F, free from the update


def _max_abs_sum(A: SparseMatrix, axis: str) -> float:
    sums = kernels.reduce(kernels.apply(A, abs), axis, PLUS_TIMES).values
    return max(sums, default=0)


def newton_iterates(A: SparseMatrix) -> Iterator[InverseState]:
    """Yield successive Newton iterates, starting from ``A' / (|A|_row |A|_col)``.

    That scaling puts every eigenvalue of ``I - A X_1`` in ``[0, 1)`` for a
    nonsingular ``A``, so the iteration converges quadratically.
    """
    if A.rows != A.cols:
        raise NotSquare(f"inverse needs a square matrix with matching labels, got {A.shape}")
    row_norm = _max_abs_sum(A, "rows")
    col_norm = _max_abs_sum(A, "cols")
    if row_norm == 0:
        raise NonConvergence("the zero matrix has no inverse")
    X = kernels.scale(transpose(A), 1.0 / (row_norm * col_norm), PLUS_TIMES)
    I = SparseMatrix.identity(A.rows)
    two_I = kernels.scale(I, 2.0, PLUS_TIMES)
    yield InverseState(X, row_norm, col_norm, 1, math.inf, math.inf)
    t = 1
    while True:
        AX = kernels.spgemm(A, X, PLUS_TIMES)
        residual = kernels.frobenius_norm(kernels.subtract(I, AX))
        X_next = kernels.spgemm(X, kernels.subtract(two_I, AX), PLUS_TIMES)
        step = kernels.frobenius_norm(kernels.subtract(X_next, X))
        X = X_next
        t += 1
        yield InverseState(X, row_norm, col_norm, t, step, residual)


# below this |I - AX|_F the error squares every step
_QUADRATIC = 0.5


def newton_inverse(A: SparseMatrix, tol: float = 1e-10, max_iter: int = 100,
                   residual_tol: float | None = None) -> SparseMatrix:
    """Inverse of a square matrix by Newton iteration.

    Stops once ``|X_{t+1} - X_t|_F <= tol * max(1, |X_{t+1}|_F)`` and then
    requires ``|A X - I|_F <= residual_tol`` (default ``100 * tol``).  The
    step test is relative for large inverses because an absolute step cannot
    drop below float resolution of ``X`` itself.  The step test is ignored
    until ``|I - A X|_F < 0.5``: on ill-conditioned input the first iterates
    move very little while the small singular directions are still doubling.  Raises
    :class:`NonConvergence` when ``max_iter`` runs out, when ``|I - A X|_F``
    grows five iterations in a row, or when the converged ``X`` fails the
    residual check, which is what a singular ``A`` looks like.
    """
    residual_tol = 100 * tol if residual_tol is None else residual_tol
    rising, last = 0, math.inf
    for state in newton_iterates(A):
        if not math.isfinite(state.step) and state.iteration > 1:
            raise NonConvergence("Newton iteration overflowed")
        if state.residual > last:
            rising += 1
            if rising >= 5:
                raise NonConvergence(f"residual grew 5 iterations in a row (now {state.residual:.3g})")
        else:
            rising = 0
        last = state.residual
        if state.residual < _QUADRATIC and state.step <= tol * max(1.0, kernels.frobenius_norm(state.X)):
            X = state.X
            final = kernels.frobenius_norm(
                kernels.subtract(kernels.spgemm(A, X, PLUS_TIMES), SparseMatrix.identity(A.rows)))
            if not final <= residual_tol:
                raise NonConvergence(
                    f"iteration settled but |AX - I|_F = {final:.3g} > {residual_tol:.3g}; "
                    "matrix is singular or badly conditioned")
            return X
        if state.iteration >= max_iter:
            raise NonConvergence(f"no convergence in {max_iter} iterations (last step {state.step:.3g})")
    raise AssertionError("unreachable")


# -- NMF ----------------------------------------------------------------------


@dataclass(frozen=True)
class NmfConfig:
    k: int
    epsilon: float = 1e-6
    max_outer_iterations: int = 200
    inverse_tolerance: float = 1e-10
    inverse_max_iterations: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if self.max_outer_iterations < 1:
            raise ValueError("max_outer_iterations must be >= 1")


@dataclass
class NmfFactors:
    W: SparseMatrix
    H: SparseMatrix
    residuals: list[float] = field(default_factory=list)
    converged: bool = False
    perturbations: int = 0

    @property
    def residual(self) -> float:
        return self.residuals[-1] if self.residuals else math.inf


_MAX_PERTURB = 3


def _clamp(M: SparseMatrix) -> SparseMatrix:
    return kernels.apply(M, lambda v: v if v > 0 else 0.0)


def _perturb(F: SparseMatrix, rng: np.random.Generator, attempt: int) -> SparseMatrix:
    # noise starts at 1e-6 of the factor's largest entry and grows 1000x per retry
    top = max((abs(v) for _, _, v in F.items()), default=1.0) or 1.0
    noise = (1.0 - rng.random(F.shape)) * top * 1e-6 * 1000.0 ** (attempt - 1)
    return kernels.add(F, SparseMatrix.from_dense(noise, F.rows, F.cols), strict=True)


def _solve(F: SparseMatrix, rhs_of, cfg: NmfConfig, rng, counter: list[int]):
    """Return ``(F, inv(F' F) F' rhs)``, perturbing ``F`` if its Gram matrix is singular."""
    for attempt in range(_MAX_PERTURB + 1):
        Ft = transpose(F)
        gram = kernels.spgemm(Ft, F, PLUS_TIMES)
        try:
            inv = newton_inverse(gram, cfg.inverse_tolerance, cfg.inverse_max_iterations)
        except NonConvergence as exc:
            if attempt == _MAX_PERTURB:
                raise RankDeficiency(f"Gram matrix stayed singular after {_MAX_PERTURB} perturbations: {exc}") from exc
            counter[0] += 1
            F = _perturb(F, rng, attempt + 1)
            continue
        return F, kernels.spgemm(inv, kernels.spgemm(Ft, rhs_of, PLUS_TIMES), PLUS_TIMES)
    raise AssertionError("unreachable")


def _residual(A: SparseMatrix, W: SparseMatrix, H: SparseMatrix) -> float:
    return kernels.frobenius_norm(kernels.subtract(A, kernels.spgemm(W, H, PLUS_TIMES)))


def nmf(A: SparseMatrix, cfg: NmfConfig,
        on_iteration: Callable[[int, SparseMatrix, SparseMatrix, float], None] | None = None) -> NmfFactors:
    """Factor a nonnegative ``A`` (m x n) as ``W H`` with ``W`` m x k and ``H`` k x n.

    ``W`` starts uniform in (0, 1] from ``cfg.seed``.  Each outer iteration sets
    ``H = inv(W'W) W'A`` and ``W' = inv(HH') H A'``, clamping negatives to zero
    after each solve, and records ``|A - WH|_F``.  Stops when that residual is
    at most ``cfg.epsilon`` or after ``cfg.max_outer_iterations``.
    ``on_iteration(t, W, H, residual)`` is called after every outer iteration.
    """
    m, n = A.shape
    if cfg.k > min(m, n):
        raise ValueError(f"k={cfg.k} exceeds min(m, n)={min(m, n)}")
    if any(v < 0 for _, _, v in A.items()):
        raise ValueError("NMF input must be nonnegative")
    rng = np.random.default_rng(cfg.seed)
    topics = KeySpace(range(1, cfg.k + 1))
    W = SparseMatrix.from_dense(1.0 - rng.random((m, cfg.k)), A.rows, topics)
    At = transpose(A)
    counter = [0]
    residuals: list[float] = []
    converged = False
    H = SparseMatrix.empty(topics, A.cols)
    for _ in range(cfg.max_outer_iterations):
        W, H = _solve(W, A, cfg, rng, counter)
        H = _clamp(H)
        Ht = transpose(H)
        Ht, Wt = _solve(Ht, At, cfg, rng, counter)
        H = transpose(Ht)
        W = transpose(_clamp(Wt))
        residuals.append(_residual(A, W, H))
        if on_iteration is not None:
            on_iteration(len(residuals), W, H, residuals[-1])
        if residuals[-1] <= cfg.epsilon:
            converged = True
            break
    return NmfFactors(W, H, residuals, converged, counter[0])


@dataclass(frozen=True)
class Topic:
    index: Hashable
    columns: list[tuple[Hashable, float]]
    rows: list[tuple[Hashable, float]]


def topics_report(f: NmfFactors, top_t: int = 10) -> list[Topic]:
    """Per topic, the ``top_t`` heaviest column labels (from ``H``) and row labels (from ``W``).

    Ties keep key order; zero weights are left out.
    """
    if f.H.nnz == 0 and f.W.nnz == 0:
        return []
    report = []
    Wt = transpose(f.W)
    for r, topic in enumerate(f.H.rows):
        cols = [(f.H.cols[j], v) for j, v in f.H.row_items(r).items()]
        rows = [(f.W.rows[i], v) for i, v in Wt.row_items(Wt.rows.index(topic)).items()]
        cols.sort(key=lambda p: -p[1])
        rows.sort(key=lambda p: -p[1])
        report.append(Topic(topic, cols[:top_t], rows[:top_t]))
    return report

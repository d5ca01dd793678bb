"""Degree, eigenvector, Katz and PageRank centrality by repeated SpMV."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import Divergence, NotSquare
from .semiring import PLUS_TIMES, Semiring
from .sparse import DenseVector, SparseMatrix, transpose

__all__ = [
    "IterationConfig",
    "CentralityResult",
    "degree_centrality",
    "eigenvector_centrality",
    "katz_centrality",
    "pagerank",
]

_OVERFLOW_GUARD = 1e300


@dataclass(frozen=True)
class IterationConfig:
    """Shared knobs for the iterative measures.

    ``alpha`` is the Katz attenuation factor or the PageRank jump probability.
    """

    alpha: float = 0.15
    tolerance: float = 1e-9
    max_iterations: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0 < self.tolerance < 1:
            raise ValueError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class CentralityResult:
    scores: DenseVector
    iterations: int
    converged: bool


def _require_square(A: SparseMatrix) -> None:
    if A.rows != A.cols:
        raise NotSquare(f"centrality needs a square vertex-by-vertex matrix, got {A.shape}")


def _norm(values) -> float:
    # hypot scales internally, so huge entries give inf instead of raising
    try:
        return math.hypot(*values)
    except OverflowError:
        return math.inf


def _cosine_gap(x, y) -> float:
    """``1 - cos(x, y)``, computed as half the squared distance of the unit vectors.

    Avoids the cancellation of ``1 - dot/(|x||y|)`` so tolerances near 1e-15
    stay meaningful.  Two zero vectors count as parallel.
    """
    nx, ny = _norm(x), _norm(y)
    if nx == 0 and ny == 0:
        return 0.0
    if nx == 0 or ny == 0:
        return 1.0
    return 0.5 * math.fsum((a / nx - b / ny) ** 2 for a, b in zip(x, y))


def degree_centrality(A: SparseMatrix, direction: str = "out", sr: Semiring | None = None) -> DenseVector:
    """Out-degree is a row reduction, in-degree a column reduction."""
    _require_square(A)
    if direction == "out":
        return kernels.reduce(A, "rows", sr)
    if direction == "in":
        return kernels.reduce(A, "cols", sr)
    raise ValueError(f"direction must be 'in' or 'out', not {direction!r}")


def eigenvector_centrality(A: SparseMatrix, cfg: IterationConfig = IterationConfig(),
                           shift: float = 1.0) -> CentralityResult:
    """Principal eigenvector of ``A`` by power iteration from a random positive start.

    Iterates ``x <- (A + shift*I) x`` with unit 2-norm renormalization and
    stops once the cosine of successive iterates is within ``cfg.tolerance``
    of 1.  The shift leaves eigenvectors unchanged but keeps bipartite graphs
    (eigenvalues ``+rho`` and ``-rho``) from oscillating; ``shift=0`` gives
    the plain ``x <- A x`` iteration.
    """
    _require_square(A)
    n = len(A.rows)
    if n == 0:
        return CentralityResult(DenseVector(A.rows, ()), 0, True)
    rng = np.random.default_rng(cfg.seed)
    x = rng.uniform(0.0, 1.0, n)
    x = np.where(x == 0.0, 0.5, x).tolist()
    nx = _norm(x)
    x = [v / nx for v in x]
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        y = kernels.spmv(A, DenseVector(A.rows, tuple(x)), PLUS_TIMES).values
        if shift:
            y = [a + shift * b for a, b in zip(y, x)]
        ny = _norm(y)
        if ny == 0 or not math.isfinite(ny):
            # A x vanished (nilpotent part) or overflowed: no principal direction
            x = [0.0] * n if ny == 0 else x
            break
        y = [v / ny for v in y]
        gap = _cosine_gap(y, x)
        x = y
        if gap <= cfg.tolerance:
            converged = True
            break
    # fix the sign so the dominant component is positive
    if x and sum(x) < 0:
        x = [-v for v in x]
    return CentralityResult(DenseVector(A.rows, tuple(x)), it, converged)


def katz_centrality(A: SparseMatrix, cfg: IterationConfig = IterationConfig()) -> CentralityResult:
    """Accumulate ``x = sum_{m>=1} alpha^(m-1) A^m 1`` term by term.

    Starts from ``x = 0`` and ``d = 1``.  Each step computes ``d <- A d`` and
    adds ``alpha^k d``.  Convergence needs both the cosine test on successive
    accumulators and an increment ``alpha^k |d|`` below ``cfg.tolerance``.
    Raises :class:`Divergence` if the accumulator blows up
    (``alpha >= 1/rho(A)``).
    """
    _require_square(A)
    n = len(A.rows)
    alpha = cfg.alpha
    d = DenseVector.ones(A.rows)
    x = [0.0] * n
    weight = 1.0
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        d = kernels.spmv(A, d, PLUS_TIMES)
        step = [weight * v for v in d.values]
        new_x = [a + b for a, b in zip(x, step)]
        nx = _norm(new_x)
        if not math.isfinite(nx) or nx > _OVERFLOW_GUARD:
            raise Divergence(f"Katz accumulator overflowed after {it} steps; alpha={alpha} "
                             "is too large for this graph's spectral radius")
        increment = _norm(step)
        gap = _cosine_gap(new_x, x)
        x = new_x
        if increment < cfg.tolerance and gap <= cfg.tolerance:
            converged = True
            break
        weight *= alpha
    return CentralityResult(DenseVector(A.rows, tuple(x)), it, converged)


def pagerank(A: SparseMatrix, cfg: IterationConfig = IterationConfig()) -> CentralityResult:
    """Stationary vector of ``(alpha/N) 1 + (1 - alpha) A' D^-1`` by power iteration.

    ``D`` holds weighted out-degrees.  Mass sitting on vertices with no
    out-edges is spread uniformly.  The all-ones matrix is never built: its
    product with ``x`` is ``sum(x)`` in every entry.  Stops when the L1
    change between iterates drops to ``cfg.tolerance``.
    """
    _require_square(A)
    if not 0 < cfg.alpha < 1:
        raise ValueError(f"PageRank alpha must be in (0, 1), got {cfg.alpha}")
    n = len(A.rows)
    if n == 0:
        return CentralityResult(DenseVector(A.rows, ()), 0, True)
    alpha = cfg.alpha
    out_deg = kernels.reduce(A, "rows", PLUS_TIMES).values
    dangling = [i for i, dv in enumerate(out_deg) if dv == 0]
    inv_deg = [0.0 if dv == 0 else 1.0 / dv for dv in out_deg]
    At = transpose(A)
    x = [1.0 / n] * n
    converged = False
    it = 0
    for it in range(1, cfg.max_iterations + 1):
        total = math.fsum(x)
        walk = kernels.spmv(At, DenseVector(A.rows, tuple(v * w for v, w in zip(x, inv_deg))),
                            PLUS_TIMES).values
        lost = math.fsum(x[i] for i in dangling)
        base = (alpha * total + (1 - alpha) * lost) / n
        y = [base + (1 - alpha) * w for w in walk]
        s = math.fsum(y)
        y = [v / s for v in y]
        change = math.fsum(abs(a - b) for a, b in zip(y, x))
        x = y
        if change <= cfg.tolerance:
            converged = True
            break
    return CentralityResult(DenseVector(A.rows, tuple(x)), it, converged)

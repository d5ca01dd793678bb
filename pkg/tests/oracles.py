"""Reference implementations that share no code with the package.

Everything here works on plain Python sets and dense numpy arrays.
"""

from __future__ import annotations

import itertools

import numpy as np


def neighbours(edges) -> dict:
    nb: dict = {}
    for u, v in edges:
        nb.setdefault(u, set()).add(v)
        nb.setdefault(v, set()).add(u)
    return nb


def triangle_support(edges) -> dict:
    """Triangles through each undirected edge, by explicit enumeration of third vertices."""
    edges = [tuple(e) for e in edges]
    nb = neighbours(edges)
    return {e: sum(1 for w in nb[e[0]] if w in nb[e[1]]) for e in edges}


def brute_force_truss(edges, k: int) -> set:
    """Repeatedly delete every edge in fewer than k-2 triangles."""
    current = {tuple(sorted(e)) for e in edges}
    while True:
        support = triangle_support(current)
        weak = {e for e, s in support.items() if s < k - 2}
        if not weak:
            return current
        current -= weak


def jaccard_sets(edges, vertices) -> dict:
    nb = neighbours(edges)
    out = {}
    for a, b in itertools.combinations(vertices, 2):
        na, nb_ = nb.get(a, set()), nb.get(b, set())
        inter = len(na & nb_)
        if inter:
            out[(a, b)] = inter / len(na | nb_)
    return out


def google_pagerank(A: np.ndarray, alpha: float, iters: int = 5000, tol: float = 1e-15) -> np.ndarray:
    """Power iteration on the explicit dense Google matrix.

    Dangling columns of the walk matrix are replaced by uniform columns.
    """
    n = A.shape[0]
    out = A.sum(axis=1)
    P = np.zeros((n, n))
    for i in range(n):
        P[:, i] = A[i] / out[i] if out[i] else 1.0 / n
    G = alpha / n * np.ones((n, n)) + (1 - alpha) * P
    x = np.full(n, 1.0 / n)
    for _ in range(iters):
        y = G @ x
        if np.abs(y - x).sum() < tol:
            return y
        x = y
    return x


def katz_series(A: np.ndarray, alpha: float, terms: int = 50) -> np.ndarray:
    """sum_{m=1..terms} alpha^(m-1) A^m 1, one explicit matrix power at a time."""
    n = A.shape[0]
    total = np.zeros(n)
    power = np.eye(n)
    for m in range(1, terms + 1):
        power = power @ A
        total += alpha ** (m - 1) * power @ np.ones(n)
    return total


def gauss_inverse(A: np.ndarray) -> np.ndarray:
    """Gauss-Jordan elimination with partial pivoting, written out longhand."""
    n = A.shape[0]
    M = [list(map(float, row)) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        p = max(range(c, n), key=lambda r: abs(M[r][c]))
        if M[p][c] == 0:
            raise ZeroDivisionError("singular")
        M[c], M[p] = M[p], M[c]
        piv = M[c][c]
        M[c] = [v / piv for v in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [a - f * b for a, b in zip(M[r], M[c])]
    return np.array([row[n:] for row in M])


def multiplicative_nmf(A: np.ndarray, k: int, seed: int, iters: int = 20000) -> float:
    """Lee-Seung multiplicative updates; returns the final Frobenius residual."""
    rng = np.random.default_rng(seed)
    m, n = A.shape
    W = rng.random((m, k)) + 0.1
    H = rng.random((k, n)) + 0.1
    eps = 1e-15
    for _ in range(iters):
        H *= (W.T @ A) / (W.T @ W @ H + eps)
        W *= (A @ H.T) / (W @ H @ H.T + eps)
    return float(np.linalg.norm(A - W @ H))


def bool_matmul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    m, p = A.shape
    n = B.shape[1]
    out = np.zeros((m, n), dtype=int)
    for i in range(m):
        for j in range(n):
            out[i, j] = int(any(A[i, t] and B[t, j] for t in range(p)))
    return out

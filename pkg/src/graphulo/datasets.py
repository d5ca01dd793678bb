"""Small graphs and synthetic inputs used by the demos, self-test and tests."""

from __future__ import annotations

import itertools

import numpy as np

from .schema import Edge, EdgeList

__all__ = [
    "example_graph",
    "complete_graph",
    "star_graph",
    "path_graph",
    "random_graph",
    "random_digraph",
    "synthetic_corpus",
    "planted_blocks",
]


def example_graph() -> EdgeList:
    """Five vertices, six edges: 1-2, 2-3, 1-4, 3-4, 1-3, 2-5, labelled v1..v5 and e1..e6."""
    pairs = [(1, 2), (2, 3), (1, 4), (3, 4), (1, 3), (2, 5)]
    return EdgeList([Edge(f"v{a}", f"v{b}", 1, f"e{n}") for n, (a, b) in enumerate(pairs, 1)])


def complete_graph(n: int) -> EdgeList:
    return EdgeList.from_pairs(itertools.combinations(range(n), 2))


def star_graph(leaves: int) -> EdgeList:
    """Vertex 0 joined to vertices 1..leaves."""
    return EdgeList.from_pairs((0, i) for i in range(1, leaves + 1))


def path_graph(n: int) -> EdgeList:
    return EdgeList.from_pairs((i, i + 1) for i in range(n - 1))


def random_graph(n: int, p: float, seed: int) -> EdgeList:
    """Erdos-Renyi G(n, p) on vertices ``0..n-1``."""
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p]
    return EdgeList.from_pairs(pairs)


def random_digraph(n: int, p: float, seed: int) -> EdgeList:
    rng = np.random.default_rng(seed)
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j and rng.random() < p]
    return EdgeList.from_pairs(pairs, directed=True)


def planted_blocks(sizes: list[tuple[int, int]], seed: int, low: float = 0.5, high: float = 1.5,
                   noise: float = 0.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Block-diagonal nonnegative matrix.

    Returns ``(A, row_block, col_block)`` where the block arrays give the
    planted community of every row and column.
    """
    rng = np.random.default_rng(seed)
    m = sum(r for r, _ in sizes)
    n = sum(c for _, c in sizes)
    A = noise * rng.random((m, n))
    row_block = np.repeat(np.arange(len(sizes)), [r for r, _ in sizes])
    col_block = np.repeat(np.arange(len(sizes)), [c for _, c in sizes])
    r0 = c0 = 0
    for r, c in sizes:
        A[r0:r0 + r, c0:c0 + c] = rng.uniform(low, high, (r, c))
        r0 += r
        c0 += c
    return A, row_block, col_block


def synthetic_corpus(docs_per_topic: int = 20, words_per_doc: int = 8, vocab_per_topic: int = 12,
                     shared_vocab: int = 4, topics: int = 3, seed: int = 0):
    """Documents drawn from disjoint per-topic vocabularies plus a few shared words.

    Returns ``(records, doc_topic)``: records in the ``(row, [(field, value), ...])``
    form taken by :func:`graphulo.schema.d4m_explode`, and the generating topic
    of each document.
    """
    rng = np.random.default_rng(seed)
    vocab = [[f"t{t + 1}w{w + 1:02d}" for w in range(vocab_per_topic)] for t in range(topics)]
    shared = [f"common{w + 1}" for w in range(shared_vocab)]
    records, doc_topic = [], {}
    n = 0
    for t in range(topics):
        for _ in range(docs_per_topic):
            n += 1
            doc = f"doc{n:04d}"
            words = set(rng.choice(vocab[t], size=words_per_doc, replace=False).tolist())
            if shared and rng.random() < 0.5:
                words.add(str(rng.choice(shared)))
            records.append((doc, [("word", w) for w in sorted(words)]))
            doc_topic[doc] = t
    return records, doc_topic

from fractions import Fraction

import numpy as np
import pytest

from graphulo.datasets import complete_graph, random_graph
from graphulo.errors import NonBinaryWeight, NotSquare, NotSymmetric, SelfLoopPresent
from graphulo.schema import EdgeList, adjacency_from_edges
from graphulo.sparse import KeySpace, SparseMatrix, equal, transpose
from graphulo.similarity import jaccard, jaccard_pair, jaccard_work

from oracles import jaccard_sets

FIG2_J = {("v1", "v2"): Fraction(1, 5), ("v1", "v3"): Fraction(1, 2), ("v1", "v4"): Fraction(1, 4),
          ("v1", "v5"): Fraction(1, 3), ("v2", "v3"): Fraction(1, 5), ("v2", "v4"): Fraction(2, 3),
          ("v3", "v4"): Fraction(1, 4), ("v3", "v5"): Fraction(1, 3)}

Z5 = [0] * 5


class TestFig2:
    def test_coefficients(self, fig2_A):
        J = jaccard(fig2_A)
        for (a, b), frac in FIG2_J.items():
            assert abs(J.get(a, b) - float(frac)) <= 1e-12
            assert J.get(b, a) == J.get(a, b)
        assert J.nnz == 16

    def test_intermediates(self, fig2_A):
        w = jaccard_work(fig2_A)
        assert w.U.to_dense(int).tolist() == [[0, 1, 1, 1, 0], [0, 0, 1, 0, 1], [0, 0, 0, 1, 0], Z5, Z5]
        assert w.U2.to_dense(int).tolist() == [[0, 0, 1, 1, 1], [0, 0, 0, 1, 0], Z5, Z5, Z5]
        assert w.X.to_dense(int).tolist() == [[3, 1, 1, 0, 0], [1, 2, 0, 0, 0], [1, 0, 1, 0, 0], Z5, Z5]
        assert w.Y.to_dense(int).tolist() == [Z5, [0, 1, 1, 1, 0], [0, 1, 2, 1, 1], [0, 1, 1, 2, 0],
                                              [0, 0, 1, 0, 1]]
        assert w.numerator.to_dense(int).tolist() == [[0, 1, 2, 1, 1], [0, 0, 1, 2, 0], [0, 0, 0, 1, 1],
                                                      Z5, Z5]
        assert w.d.tolist() == [3, 3, 3, 2, 1]

    def test_absent_pair(self, fig2_A):
        assert jaccard(fig2_A).get("v2", "v5") == 0


class TestSmallGraphs:
    def test_triangle(self):
        J = jaccard(adjacency_from_edges(complete_graph(3)))
        assert J.nnz == 6
        assert all(abs(v - 1 / 3) < 1e-15 for _, _, v in J.triples())

    def test_two_isolated_vertices(self):
        Z = SparseMatrix.empty(KeySpace("ab"), KeySpace("ab"))
        assert jaccard(Z).nnz == 0

    @pytest.mark.parametrize("seed", range(10))
    def test_random_against_sets(self, seed):
        edges = random_graph(12, 0.35, seed)
        A = adjacency_from_edges(edges)
        want = jaccard_sets([(e.src, e.dst) for e in edges], list(A.rows))
        J = jaccard(A)
        got = {(a, b): v for a, b, v in J.triples() if A.rows.index(a) < A.rows.index(b)}
        assert got.keys() == want.keys()
        assert all(abs(got[p] - want[p]) <= 1e-12 for p in want)
        assert equal(J, transpose(J))


class TestPair:
    def test_fig2(self, fig2_A):
        assert jaccard_pair(fig2_A, "v2", "v4") == pytest.approx(2 / 3, abs=1e-15)
        assert jaccard_pair(fig2_A, "v2", "v5") == 0

    @pytest.mark.parametrize("v", ["v1", "v2", "v3", "v4", "v5"])
    def test_self(self, fig2_A, v):
        assert jaccard_pair(fig2_A, v, v) == 1

    def test_isolated(self):
        A = adjacency_from_edges(EdgeList.from_pairs([("a", "b")]), vertices=KeySpace("abc"))
        assert jaccard_pair(A, "c", "c") == 0.0

    def test_matches_matrix_form(self):
        A = adjacency_from_edges(random_graph(9, 0.4, 2))
        J = jaccard(A)
        for a in A.rows:
            for b in A.rows:
                if a != b:
                    assert jaccard_pair(A, a, b) == pytest.approx(J.get(a, b), abs=1e-15)


class TestValidation:
    def test_not_square(self, fig2_E):
        with pytest.raises(NotSquare):
            jaccard(fig2_E)

    def test_self_loop(self):
        with pytest.raises(SelfLoopPresent):
            jaccard(adjacency_from_edges(EdgeList.from_pairs([("a", "a"), ("a", "b")])))

    def test_weighted(self):
        with pytest.raises(NonBinaryWeight):
            jaccard(adjacency_from_edges(EdgeList.from_pairs([("a", "b", 2)])))

    def test_directed(self):
        with pytest.raises(NotSymmetric):
            jaccard(adjacency_from_edges(EdgeList.from_pairs([("a", "b")], directed=True)))


def test_float_ones_accepted():
    A = SparseMatrix.from_dense(np.array([[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]]))
    assert jaccard(A).nnz == 6

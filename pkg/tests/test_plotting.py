import numpy as np
import pytest

from graphulo.centrality import degree_centrality
from graphulo.factorization import NmfConfig, nmf
from graphulo.plotting import plot_matrix, plot_nmf, plot_scores, plot_truss
from graphulo.sparse import SparseMatrix
from graphulo.truss import truss_decomposition


@pytest.fixture
def renders(tmp_path, fig2_A, fig2_E):
    f = nmf(SparseMatrix.from_dense(np.random.default_rng(0).random((5, 4))), NmfConfig(k=2, max_outer_iterations=5))
    return {
        "scores": lambda p: plot_scores(degree_centrality(fig2_A), p, "degree"),
        "matrix": lambda p: plot_matrix(fig2_A, p, "A"),
        "truss": lambda p: plot_truss(truss_decomposition(fig2_E), p),
        "nmf": lambda p: plot_nmf(f.W, f.H, f.residuals, p, "nmf"),
    }


@pytest.mark.parametrize("kind", ["scores", "matrix", "truss", "nmf"])
def test_png_written_and_deterministic(tmp_path, renders, kind):
    a = renders[kind](tmp_path / f"{kind}-a.png")
    b = renders[kind](tmp_path / f"{kind}-b.png")
    assert a.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert a.read_bytes() == b.read_bytes()


def test_svg_and_nested_directory(tmp_path, renders):
    p = renders["matrix"](tmp_path / "deep" / "dir" / "a.svg")
    assert p.read_text().lstrip().startswith("<?xml")


def test_many_labels_skip_ticks(tmp_path):
    A = SparseMatrix.from_dense(np.eye(60))
    assert plot_matrix(A, tmp_path / "big.png").stat().st_size > 0

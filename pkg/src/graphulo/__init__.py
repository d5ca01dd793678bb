"""Sparse linear algebra over pluggable semirings, with graph algorithms on top."""

from .centrality import (CentralityResult, IterationConfig, degree_centrality,
                         eigenvector_centrality, katz_centrality, pagerank)
from .errors import (DimensionMismatch, Divergence, DuplicateRow, GraphuloError, IoFailure,
                     MalformedIncidence, NameCollision, NonBinaryWeight, NonConvergence,
                     NotFound, NotSquare, NotSymmetric, ParseError, RankDeficiency,
                     SelfLoopPresent, SelfLoopUnsupported, UnknownLabel)
from .factorization import NmfConfig, NmfFactors, newton_inverse, nmf, topics_report
from .kernels import (add, apply, reduce, scale, spasgn, spewisex, spgemm, spmv, spref,
                      subtract, triu)
from .schema import (Edge, EdgeList, adjacency_from_edges, adjacency_from_incidence,
                     d4m_explode, incidence_from_edges, read_d4m_csv, read_edge_list)
from .semiring import MIN_PLUS, OR_AND, PLUS_OR, PLUS_TIMES, Semiring, get_semiring
from .similarity import jaccard, jaccard_pair
from .sparse import DenseVector, KeySpace, SparseMatrix, from_triples, transpose
from .store import ScanRange, Store, Table
from .truss import edge_support, ktruss, truss_decomposition

__version__ = "0.1.0"

__all__ = [
    "CentralityResult", "IterationConfig", "degree_centrality", "eigenvector_centrality",
    "katz_centrality", "pagerank", "DimensionMismatch", "Divergence", "DuplicateRow",
    "GraphuloError", "IoFailure", "MalformedIncidence", "NameCollision", "NonBinaryWeight",
    "NonConvergence", "NotFound", "NotSquare", "NotSymmetric", "ParseError", "RankDeficiency",
    "SelfLoopPresent", "SelfLoopUnsupported", "UnknownLabel", "NmfConfig", "NmfFactors",
    "newton_inverse", "nmf", "topics_report", "add", "apply", "reduce", "scale", "spasgn",
    "spewisex", "spgemm", "spmv", "spref", "subtract", "triu", "Edge", "EdgeList",
    "adjacency_from_edges", "adjacency_from_incidence", "d4m_explode", "incidence_from_edges",
    "read_d4m_csv", "read_edge_list", "MIN_PLUS", "OR_AND", "PLUS_OR", "PLUS_TIMES",
    "Semiring", "get_semiring", "jaccard", "jaccard_pair", "DenseVector", "KeySpace",
    "SparseMatrix", "from_triples", "transpose", "ScanRange", "Store", "Table", "edge_support",
    "ktruss", "truss_decomposition",
]

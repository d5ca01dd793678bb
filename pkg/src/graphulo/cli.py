"""Command-line front end: ingest data into a store and run the graph algorithms.

Every command writes tab-separated text to ``--output`` (stdout by default);
``--figure`` additionally renders a plot.  With ``--output``, a JSON run
manifest is written next to the output file and can be re-run with
``graphulo replay``.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence, TextIO

from . import kernels
from .centrality import (IterationConfig, degree_centrality, eigenvector_centrality,
                         katz_centrality, pagerank)
from .datasets import complete_graph, example_graph
from .errors import GraphuloError, NameCollision, NotFound, NotSquare, ParseError
from .factorization import NmfConfig, newton_inverse, nmf, topics_report
from .schema import (Edge, EdgeList, adjacency_from_edges, adjacency_from_incidence,
                     incidence_from_edges, read_d4m_csv, read_edge_list)
from .semiring import SEMIRINGS, get_semiring
from .similarity import jaccard, jaccard_pair, jaccard_work
from .sparse import SparseMatrix, equal, format_value, from_triples, write_tsv
from .store import Store
from .truss import edge_endpoints, edge_support, ktruss, truss_decomposition, truss_states

__all__ = ["main", "build_parser", "RunManifest", "run_selftest"]

DEFAULT_STORE = "graphulo_store"
MANIFEST_SUFFIX = ".manifest.json"


@dataclass
class RunManifest:
    command: str
    argv: list[str]
    inputs: list[str] = field(default_factory=list)
    parameters: dict[str, Any] = field(default_factory=dict)
    semiring: str = "plus_times"
    output: str | None = None
    elapsed_seconds: float = 0.0
    summary: dict[str, int] = field(default_factory=dict)

    def dump(self, path: str | os.PathLike) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | os.PathLike) -> "RunManifest":
        return cls(**json.loads(Path(path).read_text(encoding="utf-8")))


class _Run:
    """Per-invocation context: store, output sink, manifest bookkeeping."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.manifest = RunManifest(command=args.command, argv=list(argv), semiring=args.semiring,
                                    output=args.output)
        self._store: Store | None = None

    @property
    def store(self) -> Store:
        if self._store is None:
            root = self.args.store or os.environ.get("GRAPHULO_STORE") or DEFAULT_STORE
            self._store = Store(root)
        return self._store

    @property
    def semiring(self):
        return get_semiring(self.args.semiring)


# -- input helpers ----------------------------------------------------------------


def _edges_from_adjacency(A: SparseMatrix) -> EdgeList:
    if not equal(A, A.T):
        raise GraphuloError("adjacency table is not symmetric; cannot derive an undirected edge list")
    edges = [Edge(A.rows[i], A.cols[j], v) for i, j, v in A.items() if i < j]
    return EdgeList(edges)


def _graph(run: _Run, want: str) -> SparseMatrix:
    """Load the input graph as an adjacency (``want="A"``) or incidence (``"E"``) matrix."""
    args = run.args
    if args.input:
        run.manifest.inputs.append(args.input)
        edges = read_edge_list(args.input)
        if want == "E":
            return incidence_from_edges(edges)
        return adjacency_from_edges(edges)
    if not args.table:
        raise GraphuloError("give an edge-list file with --input or a stored table with --table")
    run.manifest.inputs.append(f"table:{args.table}")
    M = run.store.load_matrix(args.table)
    kind = run.store.matrix_kind(args.table)
    if kind == "incidence":
        return M if want == "E" else adjacency_from_incidence(M)
    if want == "E":
        if M.rows != M.cols:
            raise NotSquare(f"table {args.table!r} is neither an incidence nor a square adjacency matrix")
        return incidence_from_edges(_edges_from_adjacency(M), vertices=M.rows)
    return M


@contextlib.contextmanager
def _sink(path: str | None):
    if path is None:
        yield sys.stdout
        return
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        yield fh


def _persist(run: _Run, M: SparseMatrix, suffix: str = "", kind: str = "result") -> None:
    """Persist a result matrix when ``--save NAME`` was given."""
    name = getattr(run.args, "save", None)
    if not name:
        return
    name += suffix
    run.store.store_matrix(M, name, kind=kind, overwrite=True)
    run.manifest.summary[f"saved:{name}"] = M.nnz


def _fmt(v) -> str:
    return format_value(v) if not isinstance(v, str) else v


# -- commands --------------------------------------------------------------------


def cmd_ingest(run: _Run, out: TextIO) -> None:
    args = run.args
    store = run.store
    run.manifest.inputs.append(args.path)
    run.manifest.parameters.update(schema=args.schema, table=args.name)
    written: list[tuple[str, int]] = []
    if args.schema == "d4m":
        tables = read_d4m_csv(args.path)
        Tdeg = from_triples(tables.Tdeg.keys, ["deg"],
                            [(c, "deg", v) for c, v in tables.Tdeg.items()])
        for suffix, M in (("Tedge", tables.Tedge), ("TedgeT", tables.TedgeT), ("Tdeg", Tdeg)):
            name = f"{args.name}_{suffix}"
            store.store_matrix(M, name, kind=f"d4m-{suffix}", overwrite=args.overwrite)
            written.append((name, M.nnz))
        raw_name = f"{args.name}_Traw"
        if raw_name in store:
            if not args.overwrite:
                raise NameCollision(f"table {raw_name!r} already exists")
            store.drop(raw_name)
        n = store.write(raw_name, [(str(r), "raw", text) for r, text in sorted(tables.Traw.items())])
        written.append((raw_name, n))
    else:
        edges = read_edge_list(args.path)
        if args.schema == "adjacency":
            M = adjacency_from_edges(edges)
        else:
            M = incidence_from_edges(edges, oriented=args.oriented)
        kind = "incidence" if args.schema == "incidence" and not args.oriented else args.schema
        if args.schema == "incidence" and args.oriented:
            kind = "oriented-incidence"
        store.store_matrix(M, args.name, kind=kind, overwrite=args.overwrite)
        written.append((args.name, M.nnz))
    for name, n in written:
        out.write(f"{name}\t{n}\n")
        run.manifest.summary[name] = n


def cmd_centrality(run: _Run, out: TextIO) -> None:
    args = run.args
    A = _graph(run, "A")
    cfg = IterationConfig(alpha=args.alpha, tolerance=args.tol, max_iterations=args.max_iter, seed=args.seed)
    run.manifest.parameters.update(algo=args.algo, alpha=args.alpha, tol=args.tol,
                                   max_iter=args.max_iter, seed=args.seed)
    if args.algo == "degree":
        scores = degree_centrality(A, args.direction, run.semiring)
        run.manifest.parameters["direction"] = args.direction
    else:
        fn = {"eigen": eigenvector_centrality, "katz": katz_centrality, "pagerank": pagerank}[args.algo]
        result = fn(A, cfg)
        scores = result.scores
        run.manifest.summary.update(iterations=result.iterations, converged=int(result.converged))
        if not result.converged:
            print(f"warning: {args.algo} did not converge in {result.iterations} iterations",
                  file=sys.stderr)
    for label, v in scores.items():
        out.write(f"{label}\t{_fmt(v)}\n")
    run.manifest.summary["vertices"] = len(scores)
    _persist(run, from_triples(scores.keys, [args.algo], [(k, args.algo, v) for k, v in scores.items()]),
          kind="scores")
    if args.figure:
        from .plotting import plot_scores
        plot_scores(scores, args.figure, title=f"{args.algo} centrality")


def cmd_truss(run: _Run, out: TextIO) -> None:
    args = run.args
    E = _graph(run, "E")
    if args.decompose:
        run.manifest.parameters["decompose"] = True
        result = truss_decomposition(E)
        for k, Ek in result.items():
            for edge, u, v in edge_endpoints(Ek):
                out.write(f"{k}\t{u}\t{v}\t{edge}\n")
            run.manifest.summary[f"k{k}"] = len(Ek.nonempty_rows())
            _persist(run, Ek, f"_k{k}", kind="incidence")
        if args.figure:
            from .plotting import plot_truss
            plot_truss(result, args.figure)
    else:
        run.manifest.parameters["k"] = args.k
        Ek = ktruss(E, args.k)
        for edge, u, v in edge_endpoints(Ek):
            out.write(f"{u}\t{v}\t1\t{edge}\n")
        run.manifest.summary["edges"] = len(Ek.nonempty_rows())
        _persist(run, Ek, kind="incidence")
        if args.figure:
            from .plotting import plot_matrix
            plot_matrix(adjacency_from_incidence(Ek), args.figure, title=f"{args.k}-truss adjacency")


def cmd_jaccard(run: _Run, out: TextIO) -> None:
    args = run.args
    A = _graph(run, "A")
    work = jaccard_work(A)
    J = work.upper if args.upper else work.J
    run.manifest.parameters["upper"] = bool(args.upper)
    n = write_tsv(J, out)
    run.manifest.summary["coefficients"] = n
    _persist(run, J)
    if args.figure:
        from .plotting import plot_matrix
        plot_matrix(work.J, args.figure, title="Jaccard coefficients")


def cmd_nmf(run: _Run, out: TextIO) -> None:
    args = run.args
    if args.csv:
        run.manifest.inputs.append(args.csv)
        A = read_d4m_csv(args.csv).Tedge
    elif args.input:
        run.manifest.inputs.append(args.input)
        A = adjacency_from_edges(read_edge_list(args.input))
    elif args.table:
        run.manifest.inputs.append(f"table:{args.table}")
        A = run.store.load_matrix(args.table)
    else:
        raise GraphuloError("give --csv, --input or --table")
    cfg = NmfConfig(k=args.k, epsilon=args.epsilon, max_outer_iterations=args.max_iter, seed=args.seed)
    run.manifest.parameters.update(k=args.k, epsilon=args.epsilon, max_iter=args.max_iter,
                                   seed=args.seed, top=args.top)
    f = nmf(A, cfg)
    report = topics_report(f, args.top)
    for topic in report:
        for rank, (label, w) in enumerate(topic.columns, 1):
            out.write(f"{topic.index}\t{rank}\t{label}\t{_fmt(w)}\n")
    run.manifest.summary.update(topics=len(report), iterations=len(f.residuals),
                                converged=int(f.converged))
    _persist(run, f.W, "_W", kind="nmf-W")
    _persist(run, f.H, "_H", kind="nmf-H")
    if args.output:
        base = args.output
        with open(base + ".rows.tsv", "w", encoding="utf-8", newline="\n") as fh:
            for topic in report:
                for rank, (label, w) in enumerate(topic.rows, 1):
                    fh.write(f"{topic.index}\t{rank}\t{label}\t{_fmt(w)}\n")
        for name, M in (("W", f.W), ("H", f.H)):
            with open(f"{base}.{name}.tsv", "w", encoding="utf-8", newline="\n") as fh:
                write_tsv(M, fh)
        with open(base + ".residuals.tsv", "w", encoding="utf-8", newline="\n") as fh:
            for it, r in enumerate(f.residuals, 1):
                fh.write(f"{it}\t{_fmt(r)}\n")
    if args.figure:
        from .plotting import plot_nmf
        plot_nmf(f.W, f.H, f.residuals, args.figure, title=f"NMF, k={args.k}")


def cmd_export(run: _Run, out: TextIO) -> None:
    args = run.args
    run.manifest.inputs.append(f"table:{args.table}")
    store = run.store
    try:
        M = store.load_matrix(args.table)
    except NotFound:
        # plain tables (e.g. Traw) have no key bookkeeping
        n = 0
        for r, c, v in store.table(args.table).scan():
            out.write(f"{r}\t{c}\t{_fmt(v) if not isinstance(v, str) else json.dumps(v)}\n")
            n += 1
        run.manifest.summary["entries"] = n
        return
    if args.reduce:
        vec = kernels.reduce(M, args.reduce, run.semiring)
        for label, v in vec.items():
            out.write(f"{label}\t{_fmt(v)}\n")
        run.manifest.summary["entries"] = len(vec)
    else:
        run.manifest.summary["entries"] = write_tsv(M, out)
    if args.figure:
        from .plotting import plot_matrix
        plot_matrix(M, args.figure, title=args.table)


# -- self-test --------------------------------------------------------------------

_GOLDEN_E = [[1, 1, 0, 0, 0], [0, 1, 1, 0, 0], [1, 0, 0, 1, 0],
            [0, 0, 1, 1, 0], [1, 0, 1, 0, 0], [0, 1, 0, 0, 1]]
_GOLDEN_A = [[0, 1, 1, 1, 0], [1, 0, 1, 0, 1], [1, 1, 0, 1, 0], [1, 0, 1, 0, 0], [0, 1, 0, 0, 0]]
_GOLDEN_R = [[1, 1, 2, 1, 1], [2, 1, 1, 1, 1], [1, 1, 2, 1, 0],
            [2, 1, 1, 1, 0], [1, 2, 1, 2, 0], [1, 1, 1, 0, 1]]
_GOLDEN_R_AFTER = [[1, 1, 2, 1, 0], [2, 1, 1, 1, 0], [1, 1, 2, 1, 0], [2, 1, 1, 1, 0], [1, 2, 1, 2, 0]]
_GOLDEN_JACCARD = {(1, 2): Fraction(1, 5), (1, 3): Fraction(1, 2), (1, 4): Fraction(1, 4),
                  (1, 5): Fraction(1, 3), (2, 3): Fraction(1, 5), (2, 4): Fraction(2, 3),
                  (3, 4): Fraction(1, 4), (3, 5): Fraction(1, 3)}


def _dense_int(M: SparseMatrix) -> list[list[int]]:
    return M.to_dense(int).tolist()


def _golden_checks() -> list[tuple[str, Callable[[], str | None]]]:
    """Each check returns None on success or a failure description."""
    edges = example_graph()

    def incidence():
        E = incidence_from_edges(edges)
        return None if _dense_int(E) == _GOLDEN_E else f"E = {_dense_int(E)}"

    def adjacency():
        A = adjacency_from_incidence(incidence_from_edges(edges))
        if _dense_int(A) != _GOLDEN_A:
            return f"A = {_dense_int(A)}"
        if not equal(A, adjacency_from_edges(edges)):
            return "E'E - diag(E'E) differs from the edge-list adjacency"
        return None

    def support():
        R, s = edge_support(incidence_from_edges(edges))
        if _dense_int(R) != _GOLDEN_R:
            return f"R = {_dense_int(R)}"
        return None if list(s.values) == [1, 1, 1, 1, 2, 0] else f"s = {list(s.values)}"

    def truss3():
        E = incidence_from_edges(edges)
        states = list(truss_states(E, 3))
        if [st.x for st in states] != [("e6",), ()]:
            return f"removal sets {[st.x for st in states]}"
        if _dense_int(states[-1].R) != _GOLDEN_R_AFTER:
            return f"updated R = {_dense_int(states[-1].R)}"
        kept = list(ktruss(E, 3).rows)
        return None if kept == ["e1", "e2", "e3", "e4", "e5"] else f"3-truss edges {kept}"

    def decomposition():
        dec = truss_decomposition(incidence_from_edges(edges))
        sizes = {k: len(M.nonempty_rows()) for k, M in dec.items()}
        return None if sizes == {3: 5, 4: 0} else f"sizes {sizes}"

    def jaccard_example():
        A = adjacency_from_edges(edges)
        work = jaccard_work(A)
        num = _dense_int(work.numerator)
        want = [[0, 1, 2, 1, 1], [0, 0, 1, 2, 0], [0, 0, 0, 1, 1], [0] * 5, [0] * 5]
        if num != want:
            return f"numerator {num}"
        for (i, j), frac in _GOLDEN_JACCARD.items():
            got = work.J.get(f"v{i}", f"v{j}")
            if abs(got - float(frac)) > 1e-12 or work.J.get(f"v{j}", f"v{i}") != got:
                return f"J({i},{j}) = {got}, expected {frac}"
        if work.J.nnz != 16:
            return f"J has {work.J.nnz} entries, expected 16"
        if abs(jaccard_pair(A, "v2", "v4") - 2 / 3) > 1e-12:
            return "jaccard_pair(v2, v4) != 2/3"
        return None

    def inverse():
        D = from_triples(["a", "b"], ["a", "b"], [("a", "a", 2.0), ("b", "b", 4.0)])
        X = newton_inverse(D)
        want = from_triples(["a", "b"], ["a", "b"], [("a", "a", 0.5), ("b", "b", 0.25)])
        return None if equal(X, want, 1e-10) else f"inverse {X.to_dense().tolist()}"

    def pagerank_k3():
        r = pagerank(adjacency_from_edges(complete_graph(3)), IterationConfig(alpha=0.15, tolerance=1e-12))
        return None if all(abs(v - 1 / 3) < 1e-10 for v in r.scores.values) else f"{r.scores.values}"

    def store_roundtrip():
        with tempfile.TemporaryDirectory() as tmp:
            store = Store(tmp)
            E = incidence_from_edges(edges)
            A = adjacency_from_incidence(E)
            J = jaccard(A)
            for name, M in (("E", E), ("A", A), ("J", J)):
                store.store_matrix(M, name)
            fresh = Store(tmp)
            for name, M in (("E", E), ("A", A), ("J", J)):
                if not equal(fresh.load_matrix(name), M, 0.0):
                    return f"{name} changed on store/load"
            if len(list(fresh.table("A").scan())) != 12:
                return "adjacency table scan does not return 12 triples"
        return None

    return [
        ("incidence-matrix", incidence),
        ("adjacency-from-incidence", adjacency),
        ("edge-support", support),
        ("3-truss", truss3),
        ("truss-decomposition", decomposition),
        ("jaccard", jaccard_example),
        ("newton-inverse", inverse),
        ("pagerank-k3", pagerank_k3),
        ("store-roundtrip", store_roundtrip),
    ]


def _store_checks(store: Store) -> list[tuple[str, Callable[[], str | None]]]:
    checks = []
    for name in store.names():
        def check(name=name):
            try:
                table = store.table(name)
                if name + ".keys" in store:
                    store.load_matrix(name)
                else:
                    list(table.scan())
            except Exception as exc:  # report, never raise
                return f"{type(exc).__name__}: {exc}"
            return None
        checks.append((f"store:{name}", check))
    return checks


def run_selftest(store: Store | None = None) -> list[tuple[str, bool, str]]:
    checks = _golden_checks()
    if store is not None:
        checks += _store_checks(store)
    results = []
    for name, fn in checks:
        try:
            problem = fn()
        except Exception as exc:
            problem = f"{type(exc).__name__}: {exc}"
        results.append((name, problem is None, problem or ""))
    return results


def cmd_selftest(run: _Run, out: TextIO) -> int:
    root = run.args.store or os.environ.get("GRAPHULO_STORE")
    store = Store(root) if root and Path(root).is_dir() else None
    results = run_selftest(store)
    for name, ok, detail in results:
        out.write(f"{'PASS' if ok else 'FAIL'}\t{name}" + (f"\t{detail}" if detail else "") + "\n")
    failed = sum(not ok for _, ok, _ in results)
    run.manifest.summary.update(checks=len(results), failed=failed)
    return 1 if failed else 0


def cmd_replay(run: _Run, out: TextIO) -> int:
    manifest = RunManifest.load(run.args.manifest)
    argv = list(manifest.argv)
    if run.args.output:
        argv = _replace_output(argv, run.args.output)
    return main(argv)


def _replace_output(argv: list[str], output: str) -> list[str]:
    out, skip = [], False
    for i, a in enumerate(argv):
        if skip:
            skip = False
            continue
        if a == "--output":
            skip = True
            continue
        if a.startswith("--output="):
            continue
        out.append(a)
    return out + ["--output", output]


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--store", help="store directory (default: $GRAPHULO_STORE or ./graphulo_store)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    common.add_argument("--semiring", default="plus_times", choices=sorted(SEMIRINGS),
                        help="semiring for reductions and ingest collisions")
    common.add_argument("--output", "-o", help="output file (default stdout)")
    common.add_argument("--figure", help="also render a figure to this path (.png, .pdf, .svg)")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--save", metavar="NAME", help="also store the result as table NAME")
    group = source.add_mutually_exclusive_group()
    group.add_argument("--input", "-i", help="edge-list TSV (src, dst[, weight[, label]])")
    group.add_argument("--table", "-t", help="table name in the store")

    parser = argparse.ArgumentParser(prog="graphulo", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="load an edge list or D4M CSV into the store")
    p.add_argument("path")
    p.add_argument("--schema", choices=["adjacency", "incidence", "d4m"], default="adjacency")
    p.add_argument("--name", "--table", dest="name", required=True, help="table name (prefix for d4m)")
    p.add_argument("--oriented", action="store_true", help="signed incidence matrix")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("centrality", parents=[common, source], help="vertex centrality scores")
    p.add_argument("--algo", choices=["degree", "eigen", "katz", "pagerank"], default="pagerank")
    p.add_argument("--alpha", type=float, default=0.15)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--direction", choices=["in", "out"], default="out", help="for --algo degree")
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("truss", parents=[common, source], help="k-truss or full truss decomposition")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--k", type=int)
    mode.add_argument("--decompose", action="store_true")
    p.set_defaults(func=cmd_truss)

    p = sub.add_parser("jaccard", parents=[common, source], help="Jaccard coefficients")
    p.add_argument("--upper", action="store_true", help="only the upper triangle")
    p.set_defaults(func=cmd_jaccard)

    p = sub.add_parser("nmf", parents=[common, source], help="topic model by nonnegative factorization")
    p.add_argument("--csv", help="D4M CSV input (header row, first column = row label)")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-iter", type=int, default=200)
    p.add_argument("--top", type=int, default=10)
    p.set_defaults(func=cmd_nmf)

    p = sub.add_parser("export", parents=[common], help="dump a stored table as TSV triples")
    p.add_argument("--table", "-t", required=True)
    p.add_argument("--reduce", choices=["rows", "cols"], help="fold rows or columns with --semiring")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("selftest", parents=[common], help="check the built-in worked examples")
    p.set_defaults(func=cmd_selftest)

    p = sub.add_parser("replay", parents=[common], help="re-run a saved manifest")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    run = _Run(args, argv)
    start = time.perf_counter()
    try:
        with _sink(args.output) as out:
            status = args.func(run, out) or 0
    except ParseError as exc:
        print(f"graphulo {args.command}: parse error: {exc}", file=sys.stderr)
        return 1
    except (GraphuloError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"graphulo {args.command}: {type(exc).__name__}: {msg}", file=sys.stderr)
        return 1
    run.manifest.elapsed_seconds = round(time.perf_counter() - start, 6)
    if args.output and args.command != "replay":
        run.manifest.dump(args.output + MANIFEST_SUFFIX)
    return status


if __name__ == "__main__":
    sys.exit(main())

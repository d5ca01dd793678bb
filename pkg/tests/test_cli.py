import json
import subprocess
import sys

import pytest

from graphulo.cli import RunManifest, main, run_selftest
from graphulo.datasets import complete_graph, example_graph
from graphulo.schema import write_edge_list
from graphulo.store import Store


@pytest.fixture
def files(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.setenv("GRAPHULO_STORE", str(tmp_path / "store"))
    with open("fig2.tsv", "w") as fh:
        write_edge_list(example_graph(), fh, with_labels=True)
    with open("k3.tsv", "w") as fh:
        write_edge_list(complete_graph(3), fh)
    return tmp_path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestIngest:
    def test_incidence_table(self, files, capsys):
        code, out, _ = run(capsys, "ingest", "fig2.tsv", "--schema", "incidence", "--name", "E")
        assert code == 0 and out == "E\t12\n"
        assert len(Store(files / "store").table("E")) == 12

    def test_malformed_line(self, files, capsys):
        (files / "bad.tsv").write_text("a\tb\nlonely\n")
        code, _, err = run(capsys, "ingest", "bad.tsv", "--name", "bad")
        assert code != 0
        assert "bad.tsv:2" in err

    def test_d4m_two_by_two(self, files, capsys):
        (files / "d.csv").write_text("id,a,b\nx,1,2\ny,3,4\n")
        code, out, _ = run(capsys, "ingest", "d.csv", "--schema", "d4m", "--name", "doc")
        assert code == 0
        counts = dict(line.split("\t") for line in out.splitlines())
        assert counts["doc_Tedge"] == "4" and counts["doc_Traw"] == "2"
        code, out, _ = run(capsys, "export", "--table", "doc_Traw")
        assert out.splitlines()[0] == 'x\traw\t"x,1,2"'

    def test_collision_without_overwrite(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--name", "A")
        code, _, err = run(capsys, "ingest", "fig2.tsv", "--name", "A")
        assert code == 1 and "NameCollision" in err
        assert run(capsys, "ingest", "fig2.tsv", "--name", "A", "--overwrite")[0] == 0


class TestRun:
    def test_truss_on_table(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--schema", "incidence", "--name", "E")
        code, out, _ = run(capsys, "truss", "--table", "E", "--k", "3")
        assert code == 0
        lines = out.splitlines()
        assert len(lines) == 5
        assert {ln.split("\t")[3] for ln in lines} == {"e1", "e2", "e3", "e4", "e5"}

    def test_truss_on_adjacency_table(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--name", "A")
        code, out, _ = run(capsys, "truss", "--table", "A", "--k", "3")
        assert code == 0 and len(out.splitlines()) == 5

    def test_truss_decompose(self, files, capsys):
        code, out, _ = run(capsys, "truss", "--input", "fig2.tsv", "--decompose")
        assert code == 0
        assert {ln.split("\t")[0] for ln in out.splitlines()} == {"3"}

    def test_jaccard_upper_and_symmetric(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--name", "A")
        code, out, _ = run(capsys, "jaccard", "--table", "A", "--upper")
        assert code == 0 and len(out.splitlines()) == 8
        assert "v2\tv4\t0.6666666666666666" in out.splitlines()
        code, out, _ = run(capsys, "jaccard", "--table", "A")
        assert len(out.splitlines()) == 16

    def test_pagerank_k3(self, files, capsys):
        code, out, _ = run(capsys, "centrality", "--algo", "pagerank", "--alpha", "0.15", "--input", "k3.tsv")
        assert code == 0
        values = [float(ln.split("\t")[1]) for ln in out.splitlines()]
        assert len(values) == 3 and all(abs(v - 1 / 3) < 1e-6 for v in values)

    def test_missing_table(self, files, capsys):
        code, _, err = run(capsys, "jaccard", "--table", "nope")
        assert code == 1 and "NotFound" in err

    def test_algorithm_error_nonzero(self, files, capsys):
        (files / "loop.tsv").write_text("a\ta\nb\ta\n")
        code, _, err = run(capsys, "jaccard", "--input", "loop.tsv")
        assert code == 1 and "SelfLoopPresent" in err

    def test_no_input(self, files, capsys):
        assert run(capsys, "jaccard")[0] == 1

    def test_usage_error(self, files, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["truss", "--input", "fig2.tsv"])
        assert exc.value.code == 2

    def test_save_persists_result(self, files, capsys):
        run(capsys, "jaccard", "--input", "fig2.tsv", "--save", "J")
        assert Store(files / "store").load_matrix("J").nnz == 16

    def test_export_reduce(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--schema", "incidence", "--name", "E")
        code, out, _ = run(capsys, "export", "--table", "E", "--reduce", "cols")
        assert [ln.split("\t")[1] for ln in out.splitlines()] == ["3", "3", "3", "2", "1"]
        code, out, _ = run(capsys, "export", "--table", "E", "--reduce", "cols", "--semiring", "or_and")
        assert {ln.split("\t")[1] for ln in out.splitlines()} == {"1"}


class TestStoreSelection:
    def test_flag_beats_environment(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--name", "A", "--store", str(files / "flagged"))
        assert "A" in Store(files / "flagged")
        assert "A" not in Store(files / "store")

    def test_environment_used(self, files, capsys):
        run(capsys, "ingest", "fig2.tsv", "--name", "A")
        assert "A" in Store(files / "store")


class TestManifest:
    def test_written_and_replayed(self, files, capsys):
        code, _, _ = run(capsys, "nmf", "--input", "fig2.tsv", "--k", "2", "--seed", "3",
                         "--max-iter", "20", "-o", "out/topics.tsv")
        assert code == 0
        m = RunManifest.load(files / "out/topics.tsv.manifest.json")
        assert m.command == "nmf" and m.parameters["seed"] == 3 and m.inputs == ["fig2.tsv"]
        assert m.summary["topics"] == 2
        for suffix in (".W.tsv", ".H.tsv", ".rows.tsv", ".residuals.tsv"):
            assert (files / f"out/topics.tsv{suffix}").exists()
        assert run(capsys, "replay", "out/topics.tsv.manifest.json", "--output", "again.tsv")[0] == 0
        assert (files / "again.tsv").read_bytes() == (files / "out/topics.tsv").read_bytes()

    def test_manifest_is_json(self, files, capsys):
        run(capsys, "jaccard", "--input", "fig2.tsv", "-o", "j.tsv")
        data = json.loads((files / "j.tsv.manifest.json").read_text())
        assert set(data) == {"command", "argv", "inputs", "parameters", "semiring", "output",
                             "elapsed_seconds", "summary"}


class TestSelftest:
    def test_fresh_passes(self, files, capsys):
        code, out, _ = run(capsys, "selftest")
        assert code == 0
        assert out.count("PASS") == len(out.splitlines()) >= 9

    def test_repeatable(self, files, capsys):
        assert run(capsys, "selftest")[1] == run(capsys, "selftest")[1]

    def test_corrupted_store_enumerated(self, files, capsys):
        for name in ("A", "B"):
            run(capsys, "ingest", "fig2.tsv", "--name", name)
        (files / "store" / "A.tsv").write_text("garbage\n")
        (files / "store" / "B.tsv").write_text("#graphulo-table v1 B\nv1\tv9\t1\n")
        code, out, _ = run(capsys, "selftest")
        assert code == 1
        failed = [ln.split("\t")[1] for ln in out.splitlines() if ln.startswith("FAIL")]
        assert failed == ["store:A", "store:B"]

    def test_library_entry_point(self):
        assert all(ok for _, ok, _ in run_selftest())


def test_figure_flag(files, capsys):
    code, _, _ = run(capsys, "centrality", "--algo", "degree", "--input", "fig2.tsv", "--figure", "deg.png")
    assert code == 0 and (files / "deg.png").read_bytes()[:4] == b"\x89PNG"


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "graphulo", "selftest"], capture_output=True, text=True)
    assert proc.returncode == 0 and "FAIL" not in proc.stdout

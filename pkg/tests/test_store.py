import threading

import numpy as np
import pytest

from graphulo.errors import IoFailure, NameCollision, NotFound, ParseError
from graphulo.semiring import MIN_PLUS, OR_AND
from graphulo.sparse import KeySpace, SparseMatrix, equal, from_triples
from graphulo.store import HEADER_PREFIX, ScanRange, Store, Table


@pytest.fixture(params=["memory", "disk"])
def store(request, tmp_path):
    return Store(None if request.param == "memory" else tmp_path / "store")


class TestTable:
    def test_write_three_sorted(self):
        t = Table("t")
        assert t.batch_write([("b", "x", 2), ("a", "y", 1), ("a", "x", 3)]) == 3
        assert list(t.scan()) == [("a", "x", 3), ("a", "y", 1), ("b", "x", 2)]

    def test_duplicate_overwrites(self):
        t = Table("t")
        t.batch_write([("a", "x", 1)])
        assert t.batch_write([("a", "x", 5)]) == 1
        assert list(t.scan()) == [("a", "x", 5)]

    def test_zero_triples(self):
        t = Table("t")
        t.batch_write([("a", "x", 1)])
        assert t.batch_write([]) == 0
        assert len(t) == 1

    def test_scan_function_doubles(self):
        t = Table("t")
        t.batch_write([("a", "x", 1), ("b", "y", 2.5)])
        assert [v for _, _, v in t.scan(fn=lambda v: 2 * v)] == [2, 5.0]

    def test_index_aware_scan_function(self):
        t = Table("t")
        t.batch_write([("a", "x", 1)])
        assert list(t.scan(fn=lambda r, c, v: f"{r}{c}{v}", index_aware=True)) == [("a", "x", "ax1")]

    def test_ranges(self):
        t = Table("t")
        t.batch_write([(r, "c", i) for i, r in enumerate("abcde")])
        rows = lambda rng: [r for r, _, _ in t.scan(rng)]
        assert rows(ScanRange("b", "d")) == ["b", "c"]
        assert rows(ScanRange("b", "d", end_inclusive=True)) == ["b", "c", "d"]
        assert rows(ScanRange("b", "d", start_inclusive=False)) == ["c"]
        assert rows(ScanRange.exact("e")) == ["e"]
        assert rows(ScanRange("c", "c")) == []
        assert rows(ScanRange(None, "b")) == ["a"]

    def test_keys_must_be_clean_strings(self):
        t = Table("t")
        with pytest.raises(TypeError):
            t.batch_write([(1, "x", 1)])
        with pytest.raises(ValueError):
            t.batch_write([("a\tb", "x", 1)])

    def test_snapshot_round_trip(self, tmp_path):
        t = Table("vals")
        t.batch_write([("r", "float", 0.1 + 0.2), ("r", "int", -3), ("r", "str", 'tab "quoted" | pipe'),
                       ("r", "numeric-text", "42")])
        path = t.snapshot(tmp_path / "vals.tsv")
        text = path.read_text()
        assert text.startswith(HEADER_PREFIX + "vals\n")
        back = Table.load(path)
        assert list(back.scan()) == list(t.scan())
        assert type(back.get("r", "numeric-text")) is str

    def test_load_rejects_bad_header(self, tmp_path):
        p = tmp_path / "bad.tsv"
        p.write_text("nonsense\n")
        with pytest.raises(ParseError, match="header"):
            Table.load(p)

    def test_load_missing(self, tmp_path):
        with pytest.raises(NotFound):
            Table.load(tmp_path / "missing.tsv")

    def test_scan_is_a_snapshot(self):
        t = Table("t")
        t.batch_write([("a", "x", 1), ("b", "x", 2)])
        it = t.scan()
        first = next(it)
        t.batch_write([("c", "x", 3)])
        assert [first] + list(it) == [("a", "x", 1), ("b", "x", 2)]

    def test_concurrent_writers_do_not_lose_updates(self):
        t = Table("t")

        def work(k):
            for i in range(200):
                t.batch_write([(f"r{k}", f"c{i:03d}", i)])

        threads = [threading.Thread(target=work, args=(k,)) for k in range(4)]
        for th in threads:
            th.start()
        for th in threads:
            th.join()
        assert len(list(t.scan())) == 800


class TestStoreMatrices:
    def test_fig2_adjacency_scan(self, store, fig2_A):
        store.store_matrix(fig2_A, "A")
        assert len(list(store.table("A").scan())) == 12

    def test_round_trip_incidence(self, store, fig2_E):
        store.store_matrix(fig2_E, "E")
        assert equal(store.load_matrix("E"), fig2_E, 0)

    def test_load_unknown(self, store):
        with pytest.raises(NotFound):
            store.load_matrix("nope")

    def test_empty_matrix(self, store):
        Z = SparseMatrix.empty(KeySpace(["a", "b"]), KeySpace([1, 2, 3]))
        store.store_matrix(Z, "Z")
        assert len(store.table("Z")) == 0
        back = store.load_matrix("Z")
        assert back.shape == (2, 3) and back.nnz == 0 and list(back.cols) == [1, 2, 3]

    def test_name_collision(self, store, fig2_A):
        store.store_matrix(fig2_A, "A")
        with pytest.raises(NameCollision):
            store.store_matrix(fig2_A, "A")
        store.store_matrix(fig2_A, "A", overwrite=True)

    def test_label_types_and_floats_exact(self, store):
        rng = np.random.default_rng(0)
        A = SparseMatrix.from_dense(rng.standard_normal((4, 3)) * 1e5, [3, 1, 2, 10], ["x", "y", "z"])
        store.store_matrix(A, "F")
        back = store.load_matrix("F")
        assert list(back.rows) == [1, 2, 3, 10]
        assert equal(back, A, 0)

    def test_semiring_persisted(self, store):
        A = from_triples(["a"], ["b"], [("a", "b", 2.0)], MIN_PLUS)
        store.store_matrix(A, "M")
        assert store.load_matrix("M").semiring is MIN_PLUS
        B = from_triples(["a"], ["b"], [("a", "b", 1)], OR_AND)
        store.store_matrix(B, "B")
        assert store.load_matrix("B").semiring is OR_AND

    def test_kind_and_names(self, store, fig2_E):
        store.store_matrix(fig2_E, "E", kind="incidence")
        assert store.matrix_kind("E") == "incidence"
        assert store.names() == ["E"]
        store.drop("E")
        assert "E" not in store

    def test_invalid_name(self, store, fig2_A):
        with pytest.raises(ValueError):
            store.store_matrix(fig2_A, "../escape")


def test_disk_store_survives_reopen(tmp_path, fig2_E):
    Store(tmp_path).store_matrix(fig2_E, "E")
    assert equal(Store(tmp_path).load_matrix("E"), fig2_E, 0)


def test_plain_table_write_and_reopen(tmp_path):
    s = Store(tmp_path)
    assert s.write("raw", [("r1", "raw", "a,b")]) == 1
    assert Store(tmp_path).table("raw").get("r1", "raw") == "a,b"
    with pytest.raises(NotFound):
        Store(tmp_path).table("other")


def test_store_root_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(IoFailure):
        Store(blocker / "sub")

from __future__ import annotations

import hashlib
import math
import plistlib
import random
import sqlite3
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from imtriage.forge import AppCounts, FixtureSpec, forge_device
from imtriage.ingest import walk_files
from imtriage.model import AppId, ValueState
from imtriage.store import (
    CorruptStore,
    NotAPlist,
    NotASQLiteFile,
    TableMissing,
    open_plist,
    open_table_store,
    opacity_probe,
    read_rows,
    shannon_entropy,
)


def _main_db(fixture) -> Path:
    return next(p for p in walk_files(fixture.image) if p.name == "main.db")


def _entropy_oracle(blob: bytes) -> float:
    # H = log2(n) - sum(c*log2(c))/n, an algebraically distinct form
    n = len(blob)
    if n == 0:
        return 0.0
    return math.log2(n) - sum(c * math.log2(c) for c in Counter(blob).values()) / n


# SQLite reader -------------------------------------------------------------


def test_forged_main_db_tables(ios_fixture):
    store = open_table_store(_main_db(ios_fixture))
    assert {"Messages", "Calls", "Contacts"} <= set(store.tables)


def test_read_rows_count_matches_forge(ios_fixture):
    store = open_table_store(_main_db(ios_fixture))
    rows = read_rows(store, "Messages", ["body_xml", "timestamp"])
    smses = read_rows(store, "SMSes", ["body"])
    assert len(rows) + len(smses) == ios_fixture.manifest.spec.apps[AppId.SKYPE].messages


def test_missing_table_raises(ios_fixture):
    store = open_table_store(_main_db(ios_fixture))
    with pytest.raises(TableMissing):
        read_rows(store, "NoSuchTable", ["x"])


def test_missing_column_reads_null_with_one_warning(ios_fixture):
    store = open_table_store(_main_db(ios_fixture))
    rows = read_rows(store, "Messages", ["body_xml", "no_such_column"])
    assert rows and all(r["no_such_column"] is None for r in rows)
    assert len(store.warnings) == 1


def test_zero_byte_file(tmp_path):
    empty = tmp_path / "empty.db"
    empty.write_bytes(b"")
    with pytest.raises(NotASQLiteFile):
        open_table_store(empty)


def test_truncated_store(ios_fixture, tmp_path):
    cut = tmp_path / "main.db"
    cut.write_bytes(_main_db(ios_fixture).read_bytes()[:100])
    with pytest.raises(CorruptStore):
        store = open_table_store(cut)
        read_rows(store, "Messages", ["body_xml"])


def test_reader_does_not_modify_file(ios_fixture):
    path = _main_db(ios_fixture)
    before = hashlib.sha256(path.read_bytes()).hexdigest()
    store = open_table_store(path)
    for table in store.tables:
        list(store.iter_rows(table))
    assert hashlib.sha256(path.read_bytes()).hexdigest() == before
    assert sorted(p.name for p in path.parent.iterdir()) == sorted(
        p.name for p in path.parent.iterdir() if not p.name.endswith(("-wal", "-journal", "-shm"))
    )


def test_read_rows_is_order_stable(ios_fixture):
    path = _main_db(ios_fixture)
    first = read_rows(open_table_store(path), "Messages", ["id", "body_xml", "timestamp"])
    second = read_rows(open_table_store(path), "Messages", ["id", "body_xml", "timestamp"])
    assert first == second
    assert [r["id"] for r in first] == sorted(r["id"] for r in first)


def test_without_rowid_table_is_reported_corrupt(tmp_path):
    path = tmp_path / "w.db"
    con = sqlite3.connect(path)
    con.execute("CREATE TABLE t (k TEXT PRIMARY KEY, v) WITHOUT ROWID")
    con.execute("INSERT INTO t VALUES ('a', 1)")
    con.commit()
    con.close()
    with pytest.raises(CorruptStore, match="WITHOUT ROWID"):
        read_rows(open_table_store(path), "t", ["k"])


_values = st.one_of(
    st.none(),
    st.integers(min_value=-(2**63), max_value=2**63 - 1),
    st.floats(allow_nan=False),
    st.text(max_size=40),
    st.binary(max_size=40),
)
# large values force overflow pages
_big = st.one_of(st.text(min_size=2000, max_size=9000), st.binary(min_size=2000, max_size=20000))


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    rows=st.lists(st.tuples(_values, _values, st.one_of(_values, _big)), max_size=120),
    page_size=st.sampled_from([512, 1024, 4096]),
    encoding=st.sampled_from(["UTF-8", "UTF-16le", "UTF-16be"]),
)
def test_reader_agrees_with_sqlite3(tmp_path_factory, rows, page_size, encoding):
    path = tmp_path_factory.mktemp("oracle") / "t.db"
    con = sqlite3.connect(path)
    con.execute(f"PRAGMA page_size = {page_size}")
    con.execute(f"PRAGMA encoding = '{encoding}'")
    con.execute('CREATE TABLE "odd name" (id INTEGER PRIMARY KEY, a, "b c" TEXT, d BLOB)')
    con.executemany('INSERT INTO "odd name" (a, "b c", d) VALUES (?, ?, ?)', rows)
    con.commit()
    expected = [
        {"id": r[0], "a": r[1], "b c": r[2], "d": r[3]}
        for r in con.execute('SELECT id, a, "b c", d FROM "odd name" ORDER BY id')
    ]
    con.close()
    got = read_rows(open_table_store(path), "odd name", ["id", "a", "b c", "d"])
    assert got == expected


def test_reader_handles_deep_trees(tmp_path):
    path = tmp_path / "deep.db"
    con = sqlite3.connect(path)
    con.execute("PRAGMA page_size = 512")
    con.execute("CREATE TABLE t (x INTEGER, y TEXT)")
    con.executemany("INSERT INTO t VALUES (?, ?)", ((i, f"row {i} " * 3) for i in range(20000)))
    con.execute("DELETE FROM t WHERE x % 3 = 0")
    con.commit()
    expected = [{"rowid": r[0], "x": r[1], "y": r[2]} for r in con.execute("SELECT rowid, x, y FROM t ORDER BY rowid")]
    con.close()
    assert read_rows(open_table_store(path), "t", ["rowid", "x", "y"]) == expected


# property lists ------------------------------------------------------------


def test_plist_keypath_lookup(tmp_path):
    for fmt, name in ((plistlib.FMT_BINARY, "b.plist"), (plistlib.FMT_XML, "x.plist")):
        path = tmp_path / name
        path.write_bytes(plistlib.dumps({"CFBundleIdentifier": "net.whatsapp.WhatsApp", "a": [{"b": 3}]}, fmt=fmt))
        tree = open_plist(path)
        assert tree.lookup("CFBundleIdentifier") == "net.whatsapp.WhatsApp"
        assert tree.lookup("a.0.b") == 3
        assert tree.lookup("a.1.b") is None


def test_forged_info_plist(ios_fixture):
    info = next(
        p for p in walk_files(ios_fixture.image) if p.name == "Info.plist" and p.parent.name == "WhatsApp.app"
    )
    assert open_plist(info).lookup("CFBundleIdentifier") == "net.whatsapp.WhatsApp"


def test_empty_dict_plist(tmp_path):
    path = tmp_path / "e.plist"
    path.write_bytes(plistlib.dumps({}, fmt=plistlib.FMT_BINARY))
    assert open_plist(path).root == {}


def test_sqlite_is_not_a_plist(ios_fixture):
    with pytest.raises(NotAPlist):
        open_plist(_main_db(ios_fixture))


def test_damaged_binary_plist(tmp_path):
    path = tmp_path / "bad.plist"
    path.write_bytes(b"bplist00" + b"\x00" * 20)
    with pytest.raises(NotAPlist):
        open_plist(path)


# opacity -------------------------------------------------------------------


def test_cleartext_sentence():
    verdict = opacity_probe(b"hello world, this is a cleartext chat message body ok")
    assert verdict.state is ValueState.CLEARTEXT and verdict.utf8_valid


def test_seeded_random_bytes_are_opaque():
    blob = random.Random(2013).randbytes(256)
    assert _entropy_oracle(blob) >= 7.0
    assert opacity_probe(blob).state is ValueState.OPAQUE


def test_empty_blob():
    verdict = opacity_probe(b"")
    assert verdict.state is ValueState.CLEARTEXT
    assert verdict.utf8_valid and verdict.entropy_bits_per_byte == 0.0


def test_high_entropy_valid_utf8_over_threshold_is_opaque():
    blob = "".join(chr(c) for c in range(0x4E00, 0x4E00 + 400)).encode()
    assert opacity_probe(blob).utf8_valid
    expected = ValueState.OPAQUE if _entropy_oracle(blob) >= 7.0 else ValueState.CLEARTEXT
    assert opacity_probe(blob).state is expected


@given(st.binary(max_size=600))
def test_opacity_rule(blob):
    verdict = opacity_probe(blob)
    assert math.isclose(verdict.entropy_bits_per_byte, _entropy_oracle(blob), abs_tol=1e-9)
    assert math.isclose(shannon_entropy(blob), _entropy_oracle(blob), abs_tol=1e-9)
    try:
        blob.decode("utf-8")
        valid = True
    except UnicodeDecodeError:
        valid = False
    opaque = (not valid) or (_entropy_oracle(blob) >= 7.0 and len(blob) >= 64)
    assert verdict.utf8_valid is valid
    assert (verdict.state is ValueState.OPAQUE) is opaque
    assert opacity_probe(bytes(blob)) == verdict


def test_store_reads_leave_forged_tree_untouched(tmp_path):
    spec = FixtureSpec(os="ios", seed=9, apps={app: AppCounts(5, 2, 3, 2, 1) for app in AppId})
    forge_device(spec, tmp_path / "f")
    image = tmp_path / "f" / "image"
    before = {p: hashlib.sha256(p.read_bytes()).digest() for p in walk_files(image)}
    for p in before:
        head = p.read_bytes()[:16]
        if head.startswith(b"SQLite format 3"):
            store = open_table_store(p)
            for t in store.tables:
                list(store.iter_rows(t))
        elif head.startswith(b"bplist00") or p.suffix == ".plist":
            open_plist(p)
    assert {p: hashlib.sha256(p.read_bytes()).digest() for p in walk_files(image)} == before

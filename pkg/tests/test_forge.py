from __future__ import annotations

import json
import sqlite3

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import canonical_json
from imtriage.forge import (
    AppCounts,
    FixtureManifest,
    FixtureSpec,
    OutputNotEmpty,
    canonical_spec,
    fixture_paths,
    forge_device,
    verify_fixture,
)
from imtriage.ingest import walk_files
from imtriage.model import AppId, OsKind
from imtriage.pipeline import scan_image


def _tree_bytes(image):
    return {p.relative_to(image).as_posix(): p.read_bytes() for p in walk_files(image)}


def test_same_spec_twice_is_byte_identical(tmp_path):
    spec = canonical_spec("android")
    a = forge_device(spec, tmp_path / "a")
    b = forge_device(spec, tmp_path / "b")
    assert a.dumps() == b.dumps()
    assert _tree_bytes(tmp_path / "a" / "image") == _tree_bytes(tmp_path / "b" / "image")
    assert (tmp_path / "a" / "manifest.json").read_bytes() == (tmp_path / "b" / "manifest.json").read_bytes()


def test_android_logical_has_no_viber_or_tango(android_logical_fixture):
    paths = [p.relative_to(android_logical_fixture.image).as_posix().lower() for p in walk_files(android_logical_fixture.image)]
    assert paths
    assert not [p for p in paths if "viber" in p or "sgiggle" in p or "tango" in p]
    _image, report = scan_image(android_logical_fixture.image)
    assert not [r for r in report.records if r.app in (AppId.VIBER, AppId.TANGO)]


def test_ios_logical_has_no_app_data(ios_logical_fixture):
    _image, report = scan_image(ios_logical_fixture.image)
    assert report.records == ()


@pytest.mark.parametrize("which", ["ios_fixture", "android_fixture"])
def test_located_rows(which, request):
    fixture = request.getfixturevalue(which)
    rel = next(
        r for r in fixture.manifest.files
        if r.endswith(("Contacts.data", "viber_messages"))
    )
    con = sqlite3.connect(f"file:{fixture.image / rel}?mode=ro&immutable=1", uri=True)
    if rel.endswith("Contacts.data"):
        n = con.execute("SELECT COUNT(*) FROM ZVIBERLOCATION WHERE ZLATITUDE IS NOT NULL AND ZLONGITUDE IS NOT NULL")
    else:
        n = con.execute("SELECT COUNT(*) FROM messages WHERE location_lat IS NOT NULL AND location_lng IS NOT NULL")
    assert n.fetchone()[0] == 2
    con.close()


def test_verify_untouched(ios_fixture):
    assert verify_fixture(ios_fixture.image, ios_fixture.manifest_path) == []


def test_verify_byte_flip(tmp_path):
    forge_device(canonical_spec("ios"), tmp_path / "f")
    image, manifest = fixture_paths(tmp_path / "f")
    main_db = next(p for p in walk_files(image) if p.name == "main.db")
    data = bytearray(main_db.read_bytes())
    data[200] ^= 0xFF
    main_db.write_bytes(bytes(data))
    problems = verify_fixture(image, manifest)
    assert len(problems) == 1 and problems[0].startswith("digest mismatch:")


def test_verify_stray_and_missing(tmp_path):
    forge_device(canonical_spec("android"), tmp_path / "f")
    image, manifest = fixture_paths(tmp_path / "f")
    (image / "stray.txt").write_text("x")
    problems = verify_fixture(image, manifest)
    assert problems == ["unexpected file: stray.txt"]
    next(p for p in walk_files(image) if p.name == "wa.db").unlink()
    assert sum(p.startswith("missing file:") for p in verify_fixture(image, manifest)) == 1


def test_forge_refuses_non_empty(tmp_path):
    (tmp_path / "f").mkdir()
    (tmp_path / "f" / "x").write_text("x")
    with pytest.raises(OutputNotEmpty):
        forge_device(canonical_spec("ios"), tmp_path / "f")


def test_manifest_round_trip(ios_fixture):
    loaded = FixtureManifest.load(ios_fixture.manifest_path)
    assert loaded.dumps() == ios_fixture.manifest.dumps()
    assert loaded.spec == ios_fixture.manifest.spec
    document = json.loads(ios_fixture.manifest_path.read_text())
    assert document["format"] == "imtriage-fixture/1"


def test_spec_round_trip():
    spec = canonical_spec("ios", seed=7)
    assert FixtureSpec.from_dict(json.loads(json.dumps(spec.to_dict()))) == spec


def test_spec_rejects_bad_counts():
    with pytest.raises(ValueError):
        AppCounts(messages=1, located_messages=2)
    with pytest.raises(ValueError):
        AppCounts(messages=-1)


def test_phone_numbers_are_fictional(ios_fixture):
    for records in ios_fixture.manifest.records.values():
        for r in records:
            for phone in getattr(r, "phone_numbers", ()):
                assert phone.startswith("+155501")


def test_seed_sensitivity(tmp_path):
    a = forge_device(canonical_spec("ios", seed=1), tmp_path / "a")
    b = forge_device(canonical_spec("ios", seed=2), tmp_path / "b")
    assert a.counts() == b.counts()
    assert canonical_json(a.records[AppId.WHATSAPP]) != canonical_json(b.records[AppId.WHATSAPP])
    assert a.files != b.files


def test_guids_differ_per_app(ios_fixture):
    containers = {rel.split("/")[3] for rel in ios_fixture.manifest.files if rel.startswith("var/mobile/Applications/")}
    assert len(containers) == 4


@settings(max_examples=15, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(
    seed=st.integers(0, 2**63),
    os_kind=st.sampled_from([OsKind.IOS, OsKind.ANDROID]),
    counts=st.dictionaries(
        st.sampled_from(list(AppId)),
        st.tuples(st.integers(0, 30), st.integers(0, 10), st.integers(0, 10), st.integers(0, 10)),
        min_size=1,
    ),
)
def test_extraction_matches_ground_truth(tmp_path_factory, seed, os_kind, counts):
    apps = {app: AppCounts(m, c, k, a, min(m, 2)) for app, (m, c, k, a) in counts.items()}
    out = tmp_path_factory.mktemp("law") / "f"
    manifest = forge_device(FixtureSpec(os=os_kind, seed=seed, apps=apps), out)
    _image, report = scan_image(out / "image")
    assert report.errors == ()
    for app in AppId:
        assert canonical_json(report.records_for(app)) == canonical_json(manifest.records.get(app, ()))

from __future__ import annotations

import dataclasses
import json
import shutil
import sqlite3
from pathlib import Path, PurePosixPath

import pytest

from imtriage.extractors import (
    AliasTable,
    apple_seconds_to_ms,
    extract,
    extract_skype,
    extract_tango,
    extract_viber,
    extract_whatsapp,
    unix_ms_to_ms,
    unix_seconds_to_ms,
)
from imtriage.forge import AppCounts, FixtureSpec, forge_device
from imtriage.ingest import AppHome, classify_image, discover_apps
from imtriage.model import (
    AppId,
    AttachmentRecord,
    BodyState,
    CallRecord,
    ContactRecord,
    LocationFix,
    MessageRecord,
    OsKind,
    UserProfileRecord,
    record_to_dict,
    validate,
)
from imtriage.pipeline import scan_image


def _homes(image: Path) -> dict[AppId, AppHome]:
    return {h.app: h for h in discover_apps(classify_image(image))}


def _of(records, cls):
    return [r for r in records if isinstance(r, cls)]


def _dump(result) -> str:
    return json.dumps(
        {
            "records": [record_to_dict(r) for r in result.records],
            "warnings": result.warnings,
            "errors": result.errors,
            "stores": result.stores_examined,
        },
        sort_keys=True,
    )


# skype ---------------------------------------------------------------------


def test_skype_ios_counts(ios_fixture):
    result = extract_skype(_homes(ios_fixture.image)[AppId.SKYPE], ios_fixture.image)
    assert len(_of(result.records, MessageRecord)) == 25
    assert len(_of(result.records, CallRecord)) == 4
    assert len(_of(result.records, ContactRecord)) == 10
    assert len(_of(result.records, UserProfileRecord)) == 1
    assert result.errors == []


def test_skype_android_cache_media(android_fixture):
    result = extract_skype(_homes(android_fixture.image)[AppId.SKYPE], android_fixture.image)
    cached = [
        a for a in _of(result.records, AttachmentRecord)
        if a.media_path and a.media_path.startswith("mnt/sdcard/Android/data/com.skype.raider/cache/")
    ]
    assert cached
    assert all((android_fixture.image / a.media_path).is_file() for a in cached)


def test_skype_missing_main_db(ios_fixture):
    home = _homes(ios_fixture.image)[AppId.SKYPE]
    home = dataclasses.replace(home, stores=tuple(s for s in home.stores if s[0] != "main_db"))
    result = extract_skype(home, ios_fixture.image)
    assert result.records == []
    assert len(result.errors) == 1 and result.errors[0][1] == "main_db absent"


def test_skype_call_kinds_and_sms(ios_fixture):
    result = extract_skype(_homes(ios_fixture.image)[AppId.SKYPE], ios_fixture.image)
    kinds = [c.kind.value for c in _of(result.records, CallRecord)]
    assert kinds.count("voicemail") == 4 // 4
    smses = [m for m in _of(result.records, MessageRecord) if m.anchor.locator.startswith("table=SMSes;")]
    assert len(smses) == 25 // 7


def test_wrong_app_home_rejected(ios_fixture):
    with pytest.raises(ValueError):
        extract_viber(_homes(ios_fixture.image)[AppId.SKYPE], ios_fixture.image)


# viber ---------------------------------------------------------------------


def test_viber_ios_location(ios_fixture):
    result = extract_viber(_homes(ios_fixture.image)[AppId.VIBER], ios_fixture.image)
    fixes = _of(result.records, LocationFix)
    paris = [f for f in fixes if (f.latitude_deg, f.longitude_deg) == (48.8566, 2.3522)]
    assert len(paris) == 1
    message_ids = {m.message_id for m in _of(result.records, MessageRecord)}
    assert paris[0].linked_message in message_ids
    linked = next(m for m in _of(result.records, MessageRecord) if m.message_id == paris[0].linked_message)
    assert linked.location_ref == paris[0].location_id


def test_viber_android_avatars(android_fixture):
    result = extract_viber(_homes(android_fixture.image)[AppId.VIBER], android_fixture.image)
    with_avatar = [c for c in _of(result.records, ContactRecord) if c.avatar_ref]
    attachments = {a.attachment_id: a for a in _of(result.records, AttachmentRecord)}
    assert with_avatar
    for contact in with_avatar:
        path = attachments[contact.avatar_ref].media_path
        assert path.startswith("mnt/sdcard/viber/User photos/")
        assert (android_fixture.image / path).is_file()


def test_viber_ios_timestamps_use_apple_epoch(ios_fixture):
    home = _homes(ios_fixture.image)[AppId.VIBER]
    store = ios_fixture.image / home.store("contacts_data")
    con = sqlite3.connect(f"file:{store}?mode=ro&immutable=1", uri=True)
    raw = dict(con.execute("SELECT Z_PK, ZDATE FROM ZVIBERMESSAGE"))
    con.close()
    result = extract_viber(home, ios_fixture.image)
    for m in _of(result.records, MessageRecord):
        rowid = int(m.anchor.locator.rsplit("=", 1)[1])
        assert m.timestamp_utc_ms == round(raw[rowid] * 1000) + 978_307_200_000


# tango ---------------------------------------------------------------------


def test_tango_payloads_opaque(ios_fixture):
    result = extract_tango(_homes(ios_fixture.image)[AppId.TANGO], ios_fixture.image)
    messages = _of(result.records, MessageRecord)
    assert len(messages) == 12
    assert all(m.body_state is BodyState.OPAQUE and m.body is None for m in messages)


def test_tango_android_cache_media(android_fixture):
    result = extract_tango(_homes(android_fixture.image)[AppId.TANGO], android_fixture.image)
    attachments = [a for a in _of(result.records, AttachmentRecord) if a.media_path]
    assert len(attachments) == 3
    for a in attachments:
        assert "TCStorageManagerMediaCache" in PurePosixPath(a.media_path).parts
        assert (android_fixture.image / a.media_path).is_file()


def test_no_tango_home_means_no_tango_records(tmp_path):
    spec = FixtureSpec(os="ios", seed=1, apps={AppId.SKYPE: AppCounts(2, 1, 1, 0)})
    forge_device(spec, tmp_path / "f")
    _image, report = scan_image(tmp_path / "f" / "image")
    assert report.records_for(AppId.TANGO) == []
    assert AppId.TANGO not in _homes(tmp_path / "f" / "image")


def test_tango_short_cleartext_is_flagged(ios_fixture, tmp_path):
    tree = tmp_path / "tree"
    shutil.copytree(ios_fixture.image, tree)
    home = _homes(tree)[AppId.TANGO]
    con = sqlite3.connect(tree / home.store("tc_db"))
    con.execute("UPDATE messages SET payload = ? WHERE rowid = 1", (b"hi there",))
    con.commit()
    con.close()
    result = extract_tango(home, tree)
    messages = {m.message_id: m for m in _of(result.records, MessageRecord)}
    flagged = messages["tc:1"]
    assert flagged.body_state is BodyState.CLEARTEXT and flagged.body == "hi there"
    assert sum("low-confidence" in w for w in result.warnings) == 1
    assert all(m.body is None for k, m in messages.items() if k != "tc:1")


def test_tango_hidden_folder_warning(ios_fixture):
    result = extract_tango(_homes(ios_fixture.image)[AppId.TANGO], ios_fixture.image)
    assert any("hidden" in w for w in result.warnings)


# whatsapp ------------------------------------------------------------------


def test_whatsapp_ios_conversations(ios_fixture):
    result = extract_whatsapp(_homes(ios_fixture.image)[AppId.WHATSAPP], ios_fixture.image)
    messages = _of(result.records, MessageRecord)
    assert len(messages) == 30
    assert len({m.conversation_id for m in messages}) == 3


def test_whatsapp_media_linked_to_conversation(ios_fixture):
    result = extract_whatsapp(_homes(ios_fixture.image)[AppId.WHATSAPP], ios_fixture.image)
    by_id = {m.message_id: m for m in _of(result.records, MessageRecord)}
    checked = 0
    for a in _of(result.records, AttachmentRecord):
        if a.media_path and "@s.whatsapp.net/" in a.media_path:
            jid = next(p for p in PurePosixPath(a.media_path).parts if p.endswith("@s.whatsapp.net"))
            assert by_id[a.linked_message].conversation_id == jid
            checked += 1
    assert checked == 4


def test_whatsapp_msgstore_absent(android_fixture, tmp_path):
    tree = tmp_path / "tree"
    shutil.copytree(android_fixture.image, tree)
    home = _homes(tree)[AppId.WHATSAPP]
    (tree / home.store("msgstore_db")).unlink()
    home = _homes(tree)[AppId.WHATSAPP]
    result = extract_whatsapp(home, tree)
    kinds = {type(r) for r in result.records}
    assert ContactRecord in kinds
    assert not kinds & {MessageRecord, CallRecord, LocationFix}
    assert len(result.errors) == 1


# cross-cutting -------------------------------------------------------------


def test_epoch_rules():
    assert apple_seconds_to_ms(0) == 978_307_200_000
    assert unix_seconds_to_ms(1_000_000_000) == 1_000_000_000_000
    assert unix_ms_to_ms(1_370_044_800_123) == 1_370_044_800_123
    assert apple_seconds_to_ms(-0.001) == 978_307_199_999


@pytest.mark.parametrize("which", ["ios_fixture", "android_fixture", "android_logical_fixture"])
def test_every_record_validates(which, request):
    fixture = request.getfixturevalue(which)
    for home in discover_apps(classify_image(fixture.image)):
        result = extract(home, fixture.image)
        roots = home.roots
        examined = {p for p, _ in result.stores_examined}
        for record in result.records:
            assert validate(record, fixture.image) == [], record
            path = record.anchor.image_relative_path
            assert path in examined or any(path.startswith(r + "/") for r in roots), path


@pytest.mark.parametrize("which", ["ios_fixture", "android_fixture"])
def test_extractors_are_pure(which, request):
    fixture = request.getfixturevalue(which)
    for home in discover_apps(classify_image(fixture.image)):
        assert _dump(extract(home, fixture.image)) == _dump(extract(home, fixture.image))


def test_corrupt_store_isolated_from_other_apps(ios_fixture, tmp_path):
    faulty = tmp_path / "faulty"
    shutil.copytree(ios_fixture.image, faulty)
    skype = _homes(faulty)[AppId.SKYPE]
    (faulty / skype.store("main_db")).write_bytes(b"SQLite format 3\x00" + b"\xff" * 84)

    without = tmp_path / "without"
    shutil.copytree(ios_fixture.image, without)
    shutil.rmtree(without / skype.install_root)

    faulty_homes = _homes(faulty)
    without_homes = _homes(without)
    assert AppId.SKYPE not in without_homes
    skype_result = extract(faulty_homes[AppId.SKYPE], faulty)
    assert skype_result.errors
    for app in (AppId.VIBER, AppId.TANGO, AppId.WHATSAPP):
        assert _dump(extract(faulty_homes[app], faulty)) == _dump(extract(without_homes[app], without))


def test_alias_table_maps_renamed_column(ios_fixture, tmp_path):
    tree = tmp_path / "tree"
    shutil.copytree(ios_fixture.image, tree)
    home = _homes(tree)[AppId.SKYPE]
    con = sqlite3.connect(tree / home.store("main_db"))
    con.execute("ALTER TABLE Messages RENAME COLUMN body_xml TO chat_text")
    con.commit()
    con.close()
    home = _homes(tree)[AppId.SKYPE]

    control = extract_skype(_homes(ios_fixture.image)[AppId.SKYPE], ios_fixture.image)
    bodies = sorted(m.body or "" for m in _of(control.records, MessageRecord))

    plain = extract_skype(home, tree)
    assert any("chat_text" not in w and "missing" in w for w in plain.warnings)
    assert sorted(m.body or "" for m in _of(plain.records, MessageRecord)) != bodies

    ini = tmp_path / "aliases.ini"
    ini.write_text("[skype]\nmessages.body = chat_text\n", encoding="utf-8")
    aliased = extract_skype(home, tree, AliasTable.from_file(ini))
    assert sorted(m.body or "" for m in _of(aliased.records, MessageRecord)) == bodies
    assert not any("missing" in w for w in aliased.warnings)


def test_internal_failure_is_contained(ios_fixture, monkeypatch):
    from imtriage.extractors import skype

    def boom(ctx):
        raise RuntimeError("unexpected")

    monkeypatch.setattr(skype, "run", boom)
    monkeypatch.setitem(__import__("imtriage.extractors", fromlist=["_RUNNERS"])._RUNNERS, AppId.SKYPE, boom)
    result = extract(_homes(ios_fixture.image)[AppId.SKYPE], ios_fixture.image)
    assert result.records == []
    assert len(result.errors) == 1 and "internal error" in result.errors[0][1]
    assert result.os is OsKind.IOS

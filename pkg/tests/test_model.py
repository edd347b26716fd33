from __future__ import annotations

import hashlib
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from imtriage.model import (
    AppId,
    AttachmentRecord,
    AuthTokenRecord,
    BodyState,
    CallKind,
    CallRecord,
    ContactRecord,
    Direction,
    InstallationRecord,
    LocationFix,
    MediaKind,
    MessageRecord,
    OsKind,
    SourceAnchor,
    TaxonomyCategory,
    TokenKind,
    UserProfileRecord,
    ValueState,
    category_of,
    normalize_phone,
    record_from_dict,
    record_to_dict,
    split_phones,
    validate,
)

DIGEST = hashlib.sha256(b"store").digest()
ANCHOR = SourceAnchor.row("data/data/com.skype.raider/files/alice/main.db", DIGEST, "Messages", 1)


def test_category_examples():
    call = CallRecord(
        app=AppId.SKYPE, direction=Direction.INCOMING, peer_id="bob", start_utc_ms=1,
        duration_s=0, kind=CallKind.AUDIO, anchor=ANCHOR,
    )
    msg = MessageRecord(
        app=AppId.SKYPE, message_id="m:1", direction=Direction.OUTGOING, conversation_id="c",
        peer_id="bob", timestamp_utc_ms=1, anchor=ANCHOR,
    )
    fix = LocationFix(app=AppId.VIBER, location_id="l:1", latitude_deg=0, longitude_deg=0, linked_message="m:1")
    assert category_of(call) is TaxonomyCategory.TRAFFIC
    assert category_of(msg) is TaxonomyCategory.CONTENT
    assert category_of(fix) is TaxonomyCategory.LOCATION


def test_validate_latitude_out_of_range():
    fix = LocationFix(
        app=AppId.VIBER, location_id="l:1", latitude_deg=91.0, longitude_deg=0.0, linked_message="m:1", anchor=ANCHOR
    )
    assert validate(fix) == ["latitude out of range"]


def test_validate_opaque_body():
    msg = MessageRecord(
        app=AppId.TANGO, message_id="m:1", direction=Direction.UNKNOWN, conversation_id="c", peer_id="",
        timestamp_utc_ms=None, body="x", body_state=BodyState.OPAQUE, anchor=ANCHOR,
    )
    assert validate(msg) == ["opaque body must be absent"]


def test_validate_well_formed_contact():
    contact = ContactRecord(
        app=AppId.SKYPE, contact_key="bob", display_name="Bob", phone_numbers=("+15550100001",), anchor=ANCHOR
    )
    assert validate(contact) == []


@pytest.mark.parametrize(
    "record, problem",
    [
        (
            CallRecord(app=AppId.VIBER, direction=Direction.INCOMING, peer_id="p", start_utc_ms=0,
                       duration_s=-1, kind=CallKind.AUDIO, anchor=ANCHOR),
            "negative call duration",
        ),
        (ContactRecord(app=AppId.SKYPE, contact_key="", anchor=ANCHOR), "contact has no identifying field"),
        (UserProfileRecord(app=AppId.SKYPE, account_id="", anchor=ANCHOR), "account_id empty"),
        (
            AuthTokenRecord(app=AppId.SKYPE, token_kind=TokenKind.PASSWORD, value_state=ValueState.OPAQUE,
                            value="secret", anchor=ANCHOR),
            "opaque token must not carry a value",
        ),
        (
            InstallationRecord(app=AppId.SKYPE, os=OsKind.IOS, install_root="../etc", anchor=ANCHOR),
            "install root must be image-relative without '..'",
        ),
        (
            ContactRecord(app=AppId.SKYPE, contact_key="k", phone_numbers=("555-0101",), anchor=ANCHOR),
            "phone number not E.164: 555-0101",
        ),
    ],
)
def test_validate_reports_each_violation(record, problem):
    assert validate(record) == [problem]


def test_validate_checks_paths_against_image(tmp_path):
    (tmp_path / "media").mkdir()
    (tmp_path / "media" / "a.jpg").write_bytes(b"\xff\xd8\xff")
    present = AttachmentRecord(
        app=AppId.WHATSAPP, attachment_id="a", media_kind=MediaKind.IMAGE, media_path="media/a.jpg", anchor=ANCHOR
    )
    missing = AttachmentRecord(
        app=AppId.WHATSAPP, attachment_id="b", media_kind=MediaKind.IMAGE, media_path="media/b.jpg", anchor=ANCHOR
    )
    assert validate(present, tmp_path) == []
    assert validate(missing, tmp_path) == ["media path does not resolve in image"]


def test_validate_requires_anchor():
    contact = ContactRecord(app=AppId.SKYPE, contact_key="bob")
    assert validate(contact) == ["anchor missing"]


@pytest.mark.parametrize(
    "raw, kwargs, expected",
    [
        ("+1 555 010 0001", {}, ("+15550100001", None)),
        ("0044 20 7946 0000", {}, ("+442079460000", None)),
        ("555-0101", {}, (None, "555-0101")),
        ("15551234567", {"international": True}, ("+15551234567", None)),
        ("+0123", {}, (None, "+0123")),
    ],
)
def test_normalize_phone(raw, kwargs, expected):
    assert normalize_phone(raw, **kwargs) == expected


def test_split_phones_keeps_order():
    assert split_phones(["+15550100001", "555-0102", "+15550100003"]) == (
        ("+15550100001", "+15550100003"),
        ("555-0102",),
    )


# property tests ------------------------------------------------------------

_text = st.text(max_size=20)
_ids = st.text(min_size=1, max_size=12)
_ms = st.integers(min_value=0, max_value=2**53)
_anchors = st.one_of(
    st.none(),
    st.builds(
        SourceAnchor.row,
        st.just("a/b.db"),
        st.binary(min_size=32, max_size=32),
        st.sampled_from(["Messages", "ZWAMESSAGE"]),
        st.integers(min_value=1, max_value=10**9),
    ),
    st.builds(SourceAnchor.keypath, st.just("p.plist"), st.binary(min_size=32, max_size=32), _ids),
    st.builds(SourceAnchor.media, st.just("m/x.jpg"), st.binary(min_size=32, max_size=32)),
)
_phones = st.lists(st.from_regex(r"\+[1-9][0-9]{6,12}", fullmatch=True), max_size=3).map(tuple)
_coord = st.floats(allow_nan=False, allow_infinity=False, min_value=-180, max_value=180)

records = st.one_of(
    st.builds(
        MessageRecord, app=st.sampled_from(AppId), message_id=_ids, direction=st.sampled_from(Direction),
        conversation_id=_text, peer_id=_text, timestamp_utc_ms=st.one_of(st.none(), _ms),
        body=st.one_of(st.none(), _text), body_state=st.sampled_from(BodyState),
        attachment_refs=st.lists(_ids, max_size=3).map(tuple), location_ref=st.one_of(st.none(), _ids),
        anchor=_anchors,
    ),
    st.builds(
        CallRecord, app=st.sampled_from(AppId), direction=st.sampled_from(Direction), peer_id=_text,
        start_utc_ms=_ms, duration_s=st.integers(0, 10**6), kind=st.sampled_from(CallKind), anchor=_anchors,
    ),
    st.builds(
        ContactRecord, app=st.sampled_from(AppId), contact_key=_ids, display_name=st.one_of(st.none(), _text),
        phone_numbers=_phones, raw_phone_numbers=st.lists(_text, max_size=2).map(tuple),
        avatar_ref=st.one_of(st.none(), _text), anchor=_anchors,
    ),
    st.builds(
        UserProfileRecord, app=st.sampled_from(AppId), account_id=_ids, display_name=st.one_of(st.none(), _text),
        phone=st.one_of(st.none(), st.just("+15550100001")), raw_phone=st.one_of(st.none(), _text),
        anchor=_anchors,
    ),
    st.builds(
        AttachmentRecord, app=st.sampled_from(AppId), attachment_id=_ids, media_kind=st.sampled_from(MediaKind),
        media_path=st.one_of(st.none(), _text), size_bytes=st.one_of(st.none(), st.integers(0, 10**9)),
        linked_message=st.one_of(st.none(), _ids), anchor=_anchors,
    ),
    st.builds(
        LocationFix, app=st.sampled_from(AppId), location_id=_ids, latitude_deg=_coord, longitude_deg=_coord,
        linked_message=_ids, anchor=_anchors,
    ),
    st.builds(
        InstallationRecord, app=st.sampled_from(AppId), os=st.sampled_from(OsKind), install_root=_text,
        version_hint=st.one_of(st.none(), _text), anchor=_anchors,
    ),
    st.builds(
        AuthTokenRecord, app=st.sampled_from(AppId), token_kind=st.sampled_from(TokenKind),
        value_state=st.sampled_from(ValueState), value=st.one_of(st.none(), _text), anchor=_anchors,
    ),
)


@given(records)
def test_record_dict_round_trip(record):
    assert record_from_dict(record_to_dict(record)) == record


@given(records)
def test_record_json_round_trip(record):
    data = json.loads(json.dumps(record_to_dict(record)))
    assert record_from_dict(data) == record


@given(records)
def test_category_is_total_and_deterministic(record):
    assert category_of(record) is category_of(record)
    assert isinstance(category_of(record), TaxonomyCategory)

"""Viber: ``Contacts.data`` (Core Data SQLite) on iOS; ``viber_messages`` and
``viber_data`` plus the ``/sdcard/viber`` media folders on Android."""

from __future__ import annotations

from pathlib import PurePosixPath

from ..model import (
    AppId,
    AttachmentRecord,
    BodyState,
    CallKind,
    CallRecord,
    ContactRecord,
    Direction,
    LocationFix,
    MessageRecord,
    OsKind,
    SourceAnchor,
    split_phones,
)
from .base import (
    AppResult,
    Context,
    apple_seconds_to_ms,
    installation_record,
    media_kind,
    orphan_attachments,
    text_or_none,
    unix_ms_to_ms,
)

SDCARD_FOLDERS = ("User photos", "Viber Images", "Viber Video")

_IOS_STATE = {
    "received": Direction.INCOMING,
    "incoming": Direction.INCOMING,
    "delivered": Direction.OUTGOING,
    "sent": Direction.OUTGOING,
    "outgoing": Direction.OUTGOING,
}
_IOS_CALL = {"incoming": Direction.INCOMING, "outgoing": Direction.OUTGOING, "missed": Direction.MISSED}
# android.provider.CallLog convention
_ANDROID_CALL = {1: Direction.INCOMING, 2: Direction.OUTGOING, 3: Direction.MISSED}


def run(ctx: Context) -> AppResult:
    assert ctx.home.app is AppId.VIBER
    if ctx.home.os is OsKind.IOS:
        _extract_ios(ctx)
    else:
        _extract_android(ctx)
    return ctx.finish()


def _coordinate(value) -> float | None:
    if value is None or isinstance(value, (bytes, str)):
        return None
    return float(value)


def _extract_ios(ctx: Context) -> None:
    out = ctx.result.records
    path = ctx.home.store("contacts_data")
    install = installation_record(ctx, path)
    if install is not None:
        out.append(install)
    store = ctx.open_sqlite("contacts_data", path)
    if store is None:
        return
    digest = ctx.digest(store.path)

    def anchor(row):
        return SourceAnchor.row(store.path, digest, row["_table"], row["rowid"])

    numbers: dict[int, list[str]] = {}
    for row in ctx.rows(store, "ZPHONENUMBER", ["ZCONTACT", "ZPHONE"]):
        if row["ZPHONE"]:
            numbers.setdefault(row["ZCONTACT"], []).append(str(row["ZPHONE"]))
    for row in ctx.rows(store, "ZABCONTACT", ["ZMAINNAME"]):
        phones, raw = split_phones(numbers.get(row["rowid"], []))
        out.append(
            ContactRecord(
                app=AppId.VIBER,
                contact_key=f"contact:{row['rowid']}",
                display_name=text_or_none(row["ZMAINNAME"]),
                phone_numbers=phones,
                raw_phone_numbers=raw,
                anchor=anchor(row),
            )
        )

    conversations = {
        row["rowid"]: text_or_none(row["ZIDENTIFIER"])
        for row in ctx.rows(store, "ZCONVERSATION", ["ZIDENTIFIER"])
    }
    locations = {
        row["rowid"]: row for row in ctx.rows(store, "ZVIBERLOCATION", ["ZLATITUDE", "ZLONGITUDE"], optional=True)
    }
    attachments = {
        row["rowid"]: row for row in ctx.rows(store, "ZATTACHMENT", ["ZNAME", "ZTYPE", "ZSIZE"], optional=True)
    }
    linked: dict[int, str] = {}
    for row in ctx.rows(
        store,
        "ZVIBERMESSAGE",
        ["ZCONVERSATION", "ZPHONENUM", "ZTEXT", "ZDATE", "ZSTATE", "ZLOCATION", "ZATTACHMENT"],
    ):
        message_id = f"msg:{row['rowid']}"
        body = text_or_none(row["ZTEXT"])
        state = (text_or_none(row["ZSTATE"]) or "").lower()
        location_ref = None
        loc = locations.get(row["ZLOCATION"]) if row["ZLOCATION"] is not None else None
        if loc is not None:
            lat, lon = _coordinate(loc["ZLATITUDE"]), _coordinate(loc["ZLONGITUDE"])
            if lat is not None and lon is not None:
                location_ref = f"loc:{loc['rowid']}"
                out.append(
                    LocationFix(
                        app=AppId.VIBER,
                        location_id=location_ref,
                        latitude_deg=lat,
                        longitude_deg=lon,
                        linked_message=message_id,
                        anchor=anchor(loc),
                    )
                )
        refs: tuple[str, ...] = ()
        if row["ZATTACHMENT"] is not None and row["ZATTACHMENT"] in attachments:
            refs = (f"att:{row['ZATTACHMENT']}",)
            linked[row["ZATTACHMENT"]] = message_id
        convo = row["ZCONVERSATION"]
        out.append(
            MessageRecord(
                app=AppId.VIBER,
                message_id=message_id,
                direction=_IOS_STATE.get(state, Direction.UNKNOWN),
                conversation_id=conversations.get(convo) or str(convo),
                peer_id=text_or_none(row["ZPHONENUM"]) or "",
                timestamp_utc_ms=None if row["ZDATE"] is None else apple_seconds_to_ms(row["ZDATE"]),
                body=body,
                body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                attachment_refs=refs,
                location_ref=location_ref,
                anchor=anchor(row),
            )
        )

    container = ctx.home.install_root
    used: set[str] = set()
    for pk, row in attachments.items():
        name = text_or_none(row["ZNAME"])
        path = ctx.resolve_media(name, prefer_under=f"{container}/Documents/Attachments")
        if path is not None:
            used.add(path)
        size = row["ZSIZE"] if row["ZSIZE"] is not None else (ctx.size(path) if path else None)
        out.append(
            AttachmentRecord(
                app=AppId.VIBER,
                attachment_id=f"att:{pk}",
                media_kind=media_kind(
                    declared=text_or_none(row["ZTYPE"]), head=ctx.head(path) if path else None, name=name
                ),
                media_path=path,
                size_bytes=None if size is None else int(size),
                linked_message=linked.get(pk),
                anchor=anchor(row),
            )
        )

    for row in ctx.rows(store, "ZRECENT", ["ZPHONENUM", "ZDATE", "ZDURATION", "ZCALLTYPE"], optional=True):
        call_type = (text_or_none(row["ZCALLTYPE"]) or "").lower()
        out.append(
            CallRecord(
                app=AppId.VIBER,
                direction=_IOS_CALL.get(call_type, Direction.UNKNOWN),
                peer_id=text_or_none(row["ZPHONENUM"]) or "",
                start_utc_ms=apple_seconds_to_ms(row["ZDATE"] or 0),
                duration_s=int(row["ZDURATION"] or 0),
                kind=CallKind.AUDIO,
                anchor=anchor(row),
            )
        )
    out.extend(orphan_attachments(ctx, [f"{container}/Documents/Attachments"], used))


def _sdcard_media(ctx: Context) -> dict[str, list[str]]:
    """folder name (lower) -> image-relative files, for the three media folders."""
    found: dict[str, list[str]] = {}
    for root in ctx.home.roots:
        if PurePosixPath(root).name.lower() != "viber":
            continue
        for folder in SDCARD_FOLDERS:
            for candidate in (ctx.root / root).iterdir() if (ctx.root / root).is_dir() else ():
                if candidate.is_dir() and candidate.name.lower() == folder.lower():
                    rel = candidate.relative_to(ctx.root).as_posix()
                    found.setdefault(folder.lower(), []).extend(ctx.files_under(rel))
    return found


def _extract_android(ctx: Context) -> None:
    out = ctx.result.records
    messages_path = ctx.home.store("viber_messages")
    install = installation_record(ctx, messages_path)
    if install is not None:
        out.append(install)

    media = _sdcard_media(ctx)
    file_ids = {}
    for rel in sorted(p for files in media.values() for p in files):
        file_ids[PurePosixPath(rel).name.lower()] = f"file:{rel}"
    avatars = {
        PurePosixPath(rel).stem: f"file:{rel}" for rel in media.get("user photos", [])
    }

    linked: dict[str, str] = {}
    store = ctx.open_sqlite("viber_messages", messages_path)
    if store is not None:
        digest = ctx.digest(store.path)
        for row in ctx.rows(
            store,
            "messages",
            ["conversation_id", "address", "body", "date", "type", "location_lat", "location_lng", "extra_uri"],
        ):
            anchor = SourceAnchor.row(store.path, digest, row["_table"], row["rowid"])
            message_id = f"msg:{row['rowid']}"
            body = text_or_none(row["body"])
            lat, lon = _coordinate(row["location_lat"]), _coordinate(row["location_lng"])
            location_ref = None
            if lat is not None and lon is not None:
                location_ref = f"loc:{row['rowid']}"
                out.append(
                    LocationFix(
                        app=AppId.VIBER,
                        location_id=location_ref,
                        latitude_deg=lat,
                        longitude_deg=lon,
                        linked_message=message_id,
                        anchor=anchor,
                    )
                )
            refs: tuple[str, ...] = ()
            extra = text_or_none(row["extra_uri"])
            if extra:
                attachment = file_ids.get(PurePosixPath(extra.replace("\\", "/")).name.lower())
                if attachment is not None:
                    refs = (attachment,)
                    linked[attachment] = message_id
            direction = {0: Direction.INCOMING, 1: Direction.OUTGOING}.get(row["type"], Direction.UNKNOWN)
            convo = row["conversation_id"]
            out.append(
                MessageRecord(
                    app=AppId.VIBER,
                    message_id=message_id,
                    direction=direction,
                    conversation_id="" if convo is None else str(convo),
                    peer_id=text_or_none(row["address"]) or "",
                    timestamp_utc_ms=None if row["date"] is None else unix_ms_to_ms(row["date"]),
                    body=body,
                    body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                    attachment_refs=refs,
                    location_ref=location_ref,
                    anchor=anchor,
                )
            )

    data = ctx.open_sqlite("viber_data")
    if data is not None:
        digest = ctx.digest(data.path)
        for row in ctx.rows(data, "calls", ["number", "date", "duration", "type"]):
            out.append(
                CallRecord(
                    app=AppId.VIBER,
                    direction=_ANDROID_CALL.get(row["type"], Direction.UNKNOWN),
                    peer_id=text_or_none(row["number"]) or "",
                    start_utc_ms=unix_ms_to_ms(row["date"] or 0),
                    duration_s=int(row["duration"] or 0),
                    kind=CallKind.AUDIO,
                    anchor=SourceAnchor.row(data.path, digest, row["_table"], row["rowid"]),
                )
            )
        numbers: dict[int, list[str]] = {}
        for row in ctx.rows(data, "phonebookdata", ["contact_id", "data1"]):
            if row["data1"]:
                numbers.setdefault(row["contact_id"], []).append(str(row["data1"]))
        for row in ctx.rows(data, "phonebookcontact", ["display_name"]):
            phones, raw = split_phones(numbers.get(row["rowid"], []))
            avatar = next((avatars[p.lstrip("+")] for p in phones if p.lstrip("+") in avatars), None)
            out.append(
                ContactRecord(
                    app=AppId.VIBER,
                    contact_key=f"contact:{row['rowid']}",
                    display_name=text_or_none(row["display_name"]),
                    phone_numbers=phones,
                    raw_phone_numbers=raw,
                    avatar_ref=avatar,
                    anchor=SourceAnchor.row(data.path, digest, row["_table"], row["rowid"]),
                )
            )

    for folder in SDCARD_FOLDERS:
        for rel in media.get(folder.lower(), []):
            out.append(
                AttachmentRecord(
                    app=AppId.VIBER,
                    attachment_id=f"file:{rel}",
                    media_kind=media_kind(head=ctx.head(rel), name=rel),
                    media_path=rel,
                    size_bytes=ctx.size(rel),
                    linked_message=linked.get(f"file:{rel}"),
                    anchor=SourceAnchor.media(rel, ctx.digest(rel)),
                )
            )

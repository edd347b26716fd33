"""WhatsApp: ``ChatStorage.sqlite``/``Contacts.sqlite`` plus ``Library/Media`` on
iOS; ``msgstore.db``/``wa.db`` plus the SD-card media tree on Android."""

from __future__ import annotations

from pathlib import PurePosixPath

from ..model import (
    AppId,
    AttachmentRecord,
    BodyState,
    ContactRecord,
    Direction,
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

JID_SUFFIX = "@s.whatsapp.net"


def jid_number(jid: str | None) -> str | None:
    if not jid or "@" not in jid:
        return None
    return jid.split("@", 1)[0]


def run(ctx: Context) -> AppResult:
    assert ctx.home.app is AppId.WHATSAPP
    if ctx.home.os is OsKind.IOS:
        _extract_ios(ctx)
    else:
        _extract_android(ctx)
    return ctx.finish()


def _media_root(ctx: Context) -> str | None:
    for root in ctx.home.roots:
        parts = [p.lower() for p in PurePosixPath(root).parts]
        if ctx.home.os is OsKind.IOS and parts[-2:] == ["library", "media"]:
            return root
        if ctx.home.os is OsKind.ANDROID and parts[-1:] == ["whatsapp"]:
            return root
    return None


def _profile_thumbs(ctx: Context, media_root: str | None) -> dict[str, str]:
    """number -> attachment id for ``Media/profile`` thumbnails."""
    if media_root is None:
        return {}
    thumbs = {}
    for rel in ctx.files_under(f"{media_root}/profile"):
        thumbs[PurePosixPath(rel).stem.split("-", 1)[0]] = f"file:{rel}"
    return thumbs


def _contact(ctx, store, digest, row, *, jid, name, phone, thumbs) -> ContactRecord:
    number = jid_number(jid)
    values = [phone] if phone else ([number] if number else [])
    phones, raw = split_phones(values, international=not phone)
    return ContactRecord(
        app=AppId.WHATSAPP,
        contact_key=jid or phone or "",
        display_name=name,
        phone_numbers=phones,
        raw_phone_numbers=raw,
        avatar_ref=thumbs.get(number) if number else None,
        anchor=SourceAnchor.row(store.path, digest, row["_table"], row["rowid"]),
    )


def _extract_ios(ctx: Context) -> None:
    out = ctx.result.records
    chat_path = ctx.home.store("chat_storage")
    install = installation_record(ctx, chat_path)
    if install is not None:
        out.append(install)
    media_root = _media_root(ctx)
    thumbs = _profile_thumbs(ctx, media_root)

    contacts = ctx.open_sqlite("contacts_sqlite")
    if contacts is not None:
        digest = ctx.digest(contacts.path)
        for row in ctx.rows(contacts, "ZWAADDRESSBOOKCONTACT", ["ZFULLNAME", "ZPHONENUMBER", "ZWHATSAPPID"]):
            out.append(
                _contact(
                    ctx, contacts, digest, row,
                    jid=text_or_none(row["ZWHATSAPPID"]),
                    name=text_or_none(row["ZFULLNAME"]),
                    phone=text_or_none(row["ZPHONENUMBER"]),
                    thumbs=thumbs,
                )
            )

    used: set[str] = set()
    store = ctx.open_sqlite("chat_storage", chat_path)
    if store is not None:
        digest = ctx.digest(store.path)
        sessions = {
            row["rowid"]: text_or_none(row["ZCONTACTJID"])
            for row in ctx.rows(store, "ZWACHATSESSION", ["ZCONTACTJID"])
        }
        items = ctx.rows(store, "ZWAMEDIAITEM", ["ZMESSAGE", "ZMEDIALOCALPATH", "ZFILESIZE"], optional=True)
        by_message: dict[int, list[str]] = {}
        for item in items:
            if item["ZMESSAGE"] is not None:
                by_message.setdefault(item["ZMESSAGE"], []).append(f"media:{item['rowid']}")
        for row in ctx.rows(
            store, "ZWAMESSAGE", ["ZCHATSESSION", "ZISFROMME", "ZFROMJID", "ZTOJID", "ZTEXT", "ZMESSAGEDATE"]
        ):
            jid = sessions.get(row["ZCHATSESSION"]) or text_or_none(
                row["ZTOJID"] if row["ZISFROMME"] else row["ZFROMJID"]
            )
            body = text_or_none(row["ZTEXT"])
            if row["ZISFROMME"] is None:
                direction = Direction.UNKNOWN
            else:
                direction = Direction.OUTGOING if row["ZISFROMME"] else Direction.INCOMING
            out.append(
                MessageRecord(
                    app=AppId.WHATSAPP,
                    message_id=f"msg:{row['rowid']}",
                    direction=direction,
                    conversation_id=jid or "",
                    peer_id=jid or "",
                    timestamp_utc_ms=None
                    if row["ZMESSAGEDATE"] is None
                    else apple_seconds_to_ms(row["ZMESSAGEDATE"]),
                    body=body,
                    body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                    attachment_refs=tuple(by_message.get(row["rowid"], ())),
                    anchor=SourceAnchor.row(store.path, digest, row["_table"], row["rowid"]),
                )
            )
        library = f"{ctx.home.install_root}/Library"
        for item in items:
            reference = text_or_none(item["ZMEDIALOCALPATH"])
            path = ctx.resolve_media(reference, prefer_under=library)
            if path is not None:
                used.add(path)
            size = item["ZFILESIZE"] if item["ZFILESIZE"] is not None else (ctx.size(path) if path else None)
            out.append(
                AttachmentRecord(
                    app=AppId.WHATSAPP,
                    attachment_id=f"media:{item['rowid']}",
                    media_kind=media_kind(head=ctx.head(path) if path else None, name=reference),
                    media_path=path,
                    size_bytes=None if size is None else int(size),
                    linked_message=None if item["ZMESSAGE"] is None else f"msg:{item['ZMESSAGE']}",
                    anchor=SourceAnchor.row(store.path, digest, item["_table"], item["rowid"]),
                )
            )
    out.extend(orphan_attachments(ctx, [media_root] if media_root else [], used))


def _extract_android(ctx: Context) -> None:
    out = ctx.result.records
    msgstore_path = ctx.home.store("msgstore_db")
    install = installation_record(ctx, msgstore_path)
    if install is not None:
        out.append(install)
    media_root = _media_root(ctx)
    thumbs = _profile_thumbs(ctx, media_root)

    wa = ctx.open_sqlite("wa_db")
    if wa is not None:
        digest = ctx.digest(wa.path)
        for row in ctx.rows(wa, "wa_contacts", ["jid", "display_name", "number"]):
            out.append(
                _contact(
                    ctx, wa, digest, row,
                    jid=text_or_none(row["jid"]),
                    name=text_or_none(row["display_name"]),
                    phone=text_or_none(row["number"]),
                    thumbs=thumbs,
                )
            )

    used: set[str] = set()
    store = ctx.open_sqlite("msgstore_db", msgstore_path)
    if store is not None:
        digest = ctx.digest(store.path)
        rows = ctx.rows(
            store, "messages", ["key_remote_jid", "key_from_me", "data", "timestamp", "media_name", "media_size"]
        )
        for row in rows:
            jid = text_or_none(row["key_remote_jid"]) or ""
            body = text_or_none(row["data"])
            message_id = f"msg:{row['rowid']}"
            anchor = SourceAnchor.row(store.path, digest, row["_table"], row["rowid"])
            media_name = text_or_none(row["media_name"])
            refs: tuple[str, ...] = ()
            if media_name:
                refs = (f"media:{row['rowid']}",)
                path = ctx.resolve_media(media_name)
                if path is not None and media_root is not None and not path.startswith(media_root + "/"):
                    path = None
                if path is not None:
                    used.add(path)
                size = row["media_size"] if row["media_size"] is not None else (ctx.size(path) if path else None)
                out.append(
                    AttachmentRecord(
                        app=AppId.WHATSAPP,
                        attachment_id=refs[0],
                        media_kind=media_kind(head=ctx.head(path) if path else None, name=media_name),
                        media_path=path,
                        size_bytes=None if size is None else int(size),
                        linked_message=message_id,
                        anchor=anchor,
                    )
                )
            if row["key_from_me"] is None:
                direction = Direction.UNKNOWN
            else:
                direction = Direction.OUTGOING if row["key_from_me"] else Direction.INCOMING
            out.append(
                MessageRecord(
                    app=AppId.WHATSAPP,
                    message_id=message_id,
                    direction=direction,
                    conversation_id=jid,
                    peer_id=jid,
                    timestamp_utc_ms=None if row["timestamp"] is None else unix_ms_to_ms(row["timestamp"]),
                    body=body,
                    body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                    attachment_refs=refs,
                    anchor=anchor,
                )
            )
    media_dirs = [f"{media_root}/Media"] if media_root else []
    out.extend(orphan_attachments(ctx, media_dirs, used))

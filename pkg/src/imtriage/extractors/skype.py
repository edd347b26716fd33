"""Skype: ``main.db`` in the per-user folder, ``main.db.EMBEDDED`` avatars on
iOS, cached transfers on the Android SD card."""

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
    MessageRecord,
    SourceAnchor,
    UserProfileRecord,
    split_phones,
)
from .base import (
    AppResult,
    Context,
    installation_record,
    media_kind,
    orphan_attachments,
    text_or_none,
    unix_seconds_to_ms,
)


def run(ctx: Context) -> AppResult:
    home = ctx.home
    assert home.app is AppId.SKYPE
    main_dbs = home.all_stores("main_db")
    if not main_dbs:
        ctx.error(home.install_root, "main_db absent")
        return ctx.finish()

    install = installation_record(ctx, main_dbs[0])
    if install is not None:
        ctx.result.records.append(install)

    used_media: set[str] = set()
    for main_path in main_dbs:
        _extract_user(ctx, main_path, used_media)

    media_dirs = [r for r in home.roots if PurePosixPath(r).name.lower() in ("cache", "media")]
    ctx.result.records.extend(orphan_attachments(ctx, media_dirs, used_media))
    return ctx.finish()


def _avatars(ctx: Context, main_path: str) -> dict[str, AttachmentRecord]:
    """Profile pictures kept beside main.db in ``main.db.EMBEDDED`` (iOS)."""
    parent = PurePosixPath(main_path).parent.as_posix()
    embedded = [p for p in ctx.home.all_stores("embedded_db") if PurePosixPath(p).parent.as_posix() == parent]
    if not embedded:
        return {}
    store = ctx.open_sqlite("embedded_db", embedded[0])
    if store is None:
        return {}
    digest = ctx.digest(store.path)
    out: dict[str, AttachmentRecord] = {}
    for row in ctx.rows(store, "Avatars", ["skypename", "image"]):
        name = text_or_none(row["skypename"])
        blob = row["image"]
        if not name or not isinstance(blob, bytes):
            continue
        out[name] = AttachmentRecord(
            app=AppId.SKYPE,
            attachment_id=f"avatar:{name}",
            media_kind=media_kind(head=blob[:16]),
            size_bytes=len(blob),
            anchor=SourceAnchor.row(store.path, digest, row["_table"], row["rowid"]),
        )
    return out


def _extract_user(ctx: Context, main_path: str, used_media: set[str]) -> None:
    out = ctx.result.records
    store = ctx.open_sqlite("main_db", main_path)
    avatars = _avatars(ctx, main_path)
    if store is None:
        out.extend(avatars.values())
        return
    digest = ctx.digest(store.path)

    def anchor(row):
        return SourceAnchor.row(store.path, digest, row["_table"], row["rowid"])

    accounts = ctx.rows(store, "Accounts", ["skypename", "fullname", "phone"])
    account_ids = set()
    for row in accounts:
        account = text_or_none(row["skypename"])
        if not account:
            continue
        account_ids.add(account)
        phones, raw = split_phones([row["phone"]] if row["phone"] else [])
        out.append(
            UserProfileRecord(
                app=AppId.SKYPE,
                account_id=account,
                display_name=text_or_none(row["fullname"]),
                phone=phones[0] if phones else None,
                raw_phone=raw[0] if raw else None,
                avatar_ref=avatars[account].attachment_id if account in avatars else None,
                anchor=anchor(row),
            )
        )

    for row in ctx.rows(store, "Contacts", ["skypename", "fullname", "phone"]):
        key = text_or_none(row["skypename"]) or ""
        phones, raw = split_phones([row["phone"]] if row["phone"] else [])
        out.append(
            ContactRecord(
                app=AppId.SKYPE,
                contact_key=key,
                display_name=text_or_none(row["fullname"]),
                phone_numbers=phones,
                raw_phone_numbers=raw,
                avatar_ref=avatars[key].attachment_id if key in avatars else None,
                anchor=anchor(row),
            )
        )
    out.extend(avatars.values())

    transfers = ctx.rows(
        store, "Transfers", ["partner_handle", "filename", "filepath", "filesize", "message_id"], optional=True
    )
    by_message: dict[int, list[str]] = {}
    for row in transfers:
        if row["message_id"] is not None:
            by_message.setdefault(row["message_id"], []).append(f"transfer:{row['rowid']}")

    conversations = {
        row["rowid"]: text_or_none(row["identity"])
        for row in ctx.rows(store, "Conversations", ["identity"], optional=True)
    }
    for row in ctx.rows(store, "Messages", ["convo_id", "author", "peer", "body", "timestamp"]):
        author = text_or_none(row["author"]) or ""
        if author in account_ids:
            direction = Direction.OUTGOING
        elif author:
            direction = Direction.INCOMING
        else:
            direction = Direction.UNKNOWN
        peer = text_or_none(row["peer"]) or (author if direction is Direction.INCOMING else "")
        body = text_or_none(row["body"])
        convo = row["convo_id"]
        out.append(
            MessageRecord(
                app=AppId.SKYPE,
                message_id=f"msg:{row['rowid']}",
                direction=direction,
                conversation_id=conversations.get(convo) or str(convo),
                peer_id=peer,
                timestamp_utc_ms=None if row["timestamp"] is None else unix_seconds_to_ms(row["timestamp"]),
                body=body,
                body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                attachment_refs=tuple(by_message.get(row["rowid"], ())),
                anchor=anchor(row),
            )
        )

    for row in ctx.rows(store, "SMSes", ["body", "timestamp", "target_numbers"], optional=True):
        target = text_or_none(row["target_numbers"]) or ""
        body = text_or_none(row["body"])
        out.append(
            MessageRecord(
                app=AppId.SKYPE,
                message_id=f"sms:{row['rowid']}",
                direction=Direction.OUTGOING,
                conversation_id=f"sms:{target}",
                peer_id=target,
                timestamp_utc_ms=None if row["timestamp"] is None else unix_seconds_to_ms(row["timestamp"]),
                body=body,
                body_state=BodyState.CLEARTEXT if body is not None else BodyState.ABSENT,
                anchor=anchor(row),
            )
        )

    for row in ctx.rows(store, "Calls", ["begin", "partner_handle", "is_incoming", "duration", "is_video"]):
        duration = int(row["duration"] or 0)
        if row["is_incoming"]:
            direction = Direction.INCOMING if duration > 0 else Direction.MISSED
        elif row["is_incoming"] is None:
            direction = Direction.UNKNOWN
        else:
            direction = Direction.OUTGOING
        out.append(
            CallRecord(
                app=AppId.SKYPE,
                direction=direction,
                peer_id=text_or_none(row["partner_handle"]) or "",
                start_utc_ms=unix_seconds_to_ms(row["begin"] or 0),
                duration_s=duration,
                kind=CallKind.VIDEO if row["is_video"] else CallKind.AUDIO,
                anchor=anchor(row),
            )
        )

    for row in ctx.rows(store, "Voicemails", ["partner_handle", "timestamp", "duration"], optional=True):
        out.append(
            CallRecord(
                app=AppId.SKYPE,
                direction=Direction.INCOMING,
                peer_id=text_or_none(row["partner_handle"]) or "",
                start_utc_ms=unix_seconds_to_ms(row["timestamp"] or 0),
                duration_s=int(row["duration"] or 0),
                kind=CallKind.VOICEMAIL,
                anchor=anchor(row),
            )
        )

    for row in transfers:
        reference = text_or_none(row["filepath"]) or text_or_none(row["filename"])
        path = ctx.resolve_media(reference)
        if path is not None:
            used_media.add(path)
        size = row["filesize"]
        if size is None and path is not None:
            size = ctx.size(path)
        out.append(
            AttachmentRecord(
                app=AppId.SKYPE,
                attachment_id=f"transfer:{row['rowid']}",
                media_kind=media_kind(
                    head=ctx.head(path) if path else None, name=text_or_none(row["filename"]) or reference
                ),
                media_path=path,
                size_bytes=None if size is None else int(size),
                linked_message=None if row["message_id"] is None else f"msg:{row['message_id']}",
                anchor=anchor(row),
            )
        )

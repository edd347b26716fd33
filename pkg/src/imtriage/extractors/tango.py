"""Tango (registered on disk as ``sgiggle``).

Message stores are encrypted field by field, so message rows are reported
as opaque without bodies or timestamps. ``TangoCache.db`` is cleartext and
points at exchanged media; on Android the ``TCStorageManagerMediaCache``
folder holds those files locally.
"""

from __future__ import annotations

import hashlib
from pathlib import PurePosixPath

from ..model import (
    AppId,
    AttachmentRecord,
    BodyState,
    Direction,
    MessageRecord,
    SourceAnchor,
    UserProfileRecord,
    ValueState,
    split_phones,
)
from ..store import opacity_probe
from .base import AppResult, Context, installation_record, media_kind, orphan_attachments, text_or_none

MEDIA_CACHE = "tcstoragemanagermediacache"

PROFILE_KEYS = {
    "account": "TangoAccountId",
    "first": "FirstName",
    "last": "LastName",
    "phone": "PhoneNumber",
}


def conversation_key(conv_id) -> str:
    """Stable id for a conversation whose stored id may be opaque."""
    if conv_id is None:
        return ""
    raw = conv_id if isinstance(conv_id, bytes) else str(conv_id).encode("utf-8", "surrogateescape")
    if opacity_probe(raw).state is ValueState.CLEARTEXT:
        return raw.decode("utf-8")
    return "sha256:" + hashlib.sha256(raw).hexdigest()[:32]


def run(ctx: Context) -> AppResult:
    home = ctx.home
    assert home.app is AppId.TANGO
    out = ctx.result.records
    if home.hidden:
        ctx.warn(f"application folder for {home.install_root} is hidden ({home.matched_pattern})")

    tc_path = home.store("tc_db")
    install = installation_record(ctx, tc_path)
    if install is not None:
        out.append(install)

    _profile(ctx)

    store = ctx.open_sqlite("tc_db", tc_path)
    if store is not None:
        digest = ctx.digest(store.path)
        for row in ctx.rows(store, "messages", ["conv_id", "payload"]):
            payload = row["payload"]
            if isinstance(payload, str):
                payload = payload.encode("utf-8", "surrogateescape")
            anchor = SourceAnchor.row(store.path, digest, row["_table"], row["rowid"])
            body = None
            state = BodyState.ABSENT
            if payload is not None:
                verdict = opacity_probe(payload)
                if verdict.state is ValueState.OPAQUE:
                    state = BodyState.OPAQUE
                else:
                    state = BodyState.CLEARTEXT
                    body = payload.decode("utf-8")
                    ctx.warn(
                        f"{store.path} rowid {row['rowid']}: payload passed the opacity probe "
                        f"({len(payload)} bytes, {verdict.entropy_bits_per_byte:.2f} bits/byte); "
                        "low-confidence cleartext"
                    )
            out.append(
                MessageRecord(
                    app=AppId.TANGO,
                    message_id=f"tc:{row['rowid']}",
                    direction=Direction.UNKNOWN,
                    conversation_id=conversation_key(row["conv_id"]),
                    peer_id="",
                    timestamp_utc_ms=None,
                    body=body,
                    body_state=state,
                    anchor=anchor,
                )
            )

    media_dirs = [r for r in home.roots if PurePosixPath(r).name.lower() == MEDIA_CACHE]
    used: set[str] = set()
    cache = ctx.open_sqlite("tango_cache_db")
    if cache is not None:
        digest = ctx.digest(cache.path)
        for row in ctx.rows(cache, "cache_entries", ["url", "filename", "content_type", "size"]):
            name = text_or_none(row["filename"])
            path = None
            if name and media_dirs:
                path = ctx.resolve_media(name, prefer_under=media_dirs[0])
                if path is not None and not any(path.startswith(d + "/") for d in media_dirs):
                    path = None
            if path is not None:
                used.add(path)
            size = row["size"] if row["size"] is not None else (ctx.size(path) if path else None)
            out.append(
                AttachmentRecord(
                    app=AppId.TANGO,
                    attachment_id=f"cache:{row['rowid']}",
                    media_kind=media_kind(
                        declared=text_or_none(row["content_type"]),
                        head=ctx.head(path) if path else None,
                        name=name,
                    ),
                    media_path=path,
                    size_bytes=None if size is None else int(size),
                    anchor=SourceAnchor.row(cache.path, digest, row["_table"], row["rowid"]),
                )
            )
    out.extend(orphan_attachments(ctx, media_dirs, used))
    return ctx.finish()


def _profile(ctx: Context) -> None:
    path = ctx.home.store("prefs_plist")
    if path is None:
        return
    prefs = ctx.open_plist("prefs_plist", path)
    if prefs is None:
        return

    def clear(key: str) -> str | None:
        value = prefs.lookup(PROFILE_KEYS[key])
        if value is None:
            return None
        if isinstance(value, bytes) or opacity_probe(str(value)).state is ValueState.OPAQUE:
            ctx.warn(f"{path}: profile field {PROFILE_KEYS[key]} is opaque; skipped")
            return None
        return str(value)

    account = clear("account")
    if not account:
        return
    name = " ".join(p for p in (clear("first"), clear("last")) if p) or None
    phone_text = clear("phone")
    phones, raw = split_phones([phone_text] if phone_text else [])
    ctx.result.records.append(
        UserProfileRecord(
            app=AppId.TANGO,
            account_id=account,
            display_name=name,
            phone=phones[0] if phones else None,
            raw_phone=raw[0] if raw else None,
            anchor=SourceAnchor.keypath(path, ctx.digest(path), PROFILE_KEYS["account"]),
        )
    )

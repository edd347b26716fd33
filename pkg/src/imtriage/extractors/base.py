"""Shared extractor machinery: result container, store access, aliases, epochs."""

from __future__ import annotations

import configparser
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path, PurePosixPath
from typing import Any, Iterable

from ..ingest import AppHome, FileUnreadable, hash_file, walk_files
from ..model import (
    AppId,
    ArtifactRecord,
    AttachmentRecord,
    InstallationRecord,
    MediaKind,
    OsKind,
    SourceAnchor,
    StoreKind,
)
from ..store import StoreError, TableMissing, TableStore, open_plist, open_table_store
from ..store.plist import PlistTree

log = logging.getLogger(__name__)

# epoch rules ---------------------------------------------------------------

UNIX_EPOCH_MS = 0
# 2001-01-01T00:00:00Z, the reference date of Apple/Core Data timestamps
APPLE_EPOCH_OFFSET_MS = 978_307_200_000


def unix_seconds_to_ms(value: int | float) -> int:
    """Skype stores whole seconds since 1970."""
    return int(round(value * 1000))


def unix_ms_to_ms(value: int | float) -> int:
    """Android stores already carry milliseconds since 1970."""
    return int(value)


def apple_seconds_to_ms(value: int | float) -> int:
    """Core Data stores seconds (possibly fractional) since 2001-01-01 UTC."""
    return int(round(value * 1000)) + APPLE_EPOCH_OFFSET_MS


# result --------------------------------------------------------------------


@dataclass
class AppResult:
    app: AppId
    os: OsKind
    records: list[ArtifactRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    errors: list[tuple[str, str]] = field(default_factory=list)
    stores_examined: list[tuple[str, str]] = field(default_factory=list)


# aliases -------------------------------------------------------------------

# app -> "table" or "table.column" (canonical, lower case) -> physical names
DEFAULT_ALIASES: dict[AppId, dict[str, tuple[str, ...]]] = {
    AppId.SKYPE: {
        "messages": ("Messages",),
        "messages.body": ("body_xml", "body"),
        "messages.author": ("author", "from_dispname"),
        "messages.timestamp": ("timestamp", "timestamp__ms"),
        "messages.peer": ("dialog_partner", "identities"),
        "transfers.filename": ("filename", "filepath"),
        "transfers.message_id": ("message_id", "chatmsg_index"),
        "calls.begin": ("begin_timestamp", "start_timestamp"),
        "contacts.phone": ("phone_mobile", "assigned_phone1"),
        "accounts.phone": ("phone_mobile", "assigned_phone1"),
    },
    AppId.VIBER: {
        "zvibermessage": ("ZVIBERMESSAGE",),
        "zvibermessage.ztext": ("ZTEXT", "ZBODY"),
        "zvibermessage.zdate": ("ZDATE",),
        "zrecent.zdate": ("ZDATE",),
        "messages.body": ("body", "msg_body"),
        "messages.date": ("date", "msg_date"),
        "phonebookdata.data1": ("data1", "number"),
    },
    AppId.TANGO: {
        "messages": ("messages",),
        "messages.payload": ("payload", "message_payload"),
    },
    AppId.WHATSAPP: {
        "zwamessage.ztext": ("ZTEXT",),
        "zwamessage.zmessagedate": ("ZMESSAGEDATE",),
        "messages.data": ("data", "text_data"),
        "messages.timestamp": ("timestamp",),
        "wa_contacts.display_name": ("display_name", "wa_name"),
    },
}


class AliasTable:
    """Maps canonical table/column names to the physical names a store uses.

    Extra candidates can be loaded from an INI-style ``key = value`` file with
    one section per app::

        [skype]
        Messages.body = body_xml, body
        Messages = Messages, Chats
    """

    def __init__(self, extra: dict[AppId, dict[str, tuple[str, ...]]] | None = None):
        self._map: dict[AppId, dict[str, tuple[str, ...]]] = {}
        for app, entries in DEFAULT_ALIASES.items():
            self._map[app] = dict(entries)
        for app, entries in (extra or {}).items():
            target = self._map.setdefault(app, {})
            for key, names in entries.items():
                key = key.lower()
                target[key] = tuple(dict.fromkeys(tuple(names) + target.get(key, ())))

    @classmethod
    def from_file(cls, path: str | Path) -> AliasTable:
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keep case of physical names
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
        extra: dict[AppId, dict[str, tuple[str, ...]]] = {}
        for section in parser.sections():
            app = AppId(section.strip().lower())
            for key, value in parser.items(section):
                names = tuple(v.strip() for v in value.split(",") if v.strip())
                extra.setdefault(app, {})[key.strip().lower()] = names
        return cls(extra)

    def candidates(self, app: AppId, key: str) -> tuple[str, ...]:
        found = self._map.get(app, {}).get(key.lower(), ())
        base = key.rsplit(".", 1)[-1]
        return tuple(dict.fromkeys(found + (base,)))


# media ---------------------------------------------------------------------

_EXT_KINDS = {
    ".jpg": MediaKind.IMAGE, ".jpeg": MediaKind.IMAGE, ".png": MediaKind.IMAGE,
    ".gif": MediaKind.IMAGE, ".webp": MediaKind.IMAGE, ".thumb": MediaKind.IMAGE,
    ".heic": MediaKind.IMAGE,
    ".mp4": MediaKind.VIDEO, ".mov": MediaKind.VIDEO, ".3gp": MediaKind.VIDEO,
    ".m4a": MediaKind.AUDIO, ".aac": MediaKind.AUDIO, ".amr": MediaKind.AUDIO,
    ".opus": MediaKind.AUDIO, ".ogg": MediaKind.AUDIO, ".mp3": MediaKind.AUDIO,
    ".pdf": MediaKind.FILE, ".txt": MediaKind.FILE, ".zip": MediaKind.FILE, ".doc": MediaKind.FILE,
}

_MIME_PREFIX = {"image/": MediaKind.IMAGE, "video/": MediaKind.VIDEO, "audio/": MediaKind.AUDIO}


def sniff_media(head: bytes) -> MediaKind | None:
    if head.startswith(b"\x89PNG\r\n\x1a\n") or head.startswith(b"\xff\xd8\xff"):
        return MediaKind.IMAGE
    if head[:6] in (b"GIF87a", b"GIF89a") or (head[:4] == b"RIFF" and head[8:12] == b"WEBP"):
        return MediaKind.IMAGE
    if head[4:8] == b"ftyp":
        brand = head[8:12]
        return MediaKind.AUDIO if brand in (b"M4A ", b"M4B ") else MediaKind.VIDEO
    if head.startswith(b"#!AMR") or head.startswith(b"OggS") or head.startswith(b"ID3"):
        return MediaKind.AUDIO
    if head.startswith(b"%PDF") or head.startswith(b"PK\x03\x04"):
        return MediaKind.FILE
    return None


def media_kind(
    *, declared: str | None = None, head: bytes | None = None, name: str | None = None
) -> MediaKind:
    """Decide a media kind: declared type first, then file magic, then extension."""
    if declared:
        lowered = declared.strip().lower()
        for kind in MediaKind:
            if lowered == kind.value:
                return kind
        for prefix, kind in _MIME_PREFIX.items():
            if lowered.startswith(prefix):
                return kind
        if lowered in ("picture", "photo"):
            return MediaKind.IMAGE
    if head:
        sniffed = sniff_media(head)
        if sniffed is not None:
            return sniffed
    if name:
        return _EXT_KINDS.get(PurePosixPath(name).suffix.lower(), MediaKind.UNKNOWN)
    return MediaKind.UNKNOWN


# extraction context --------------------------------------------------------


class Context:
    """Per-run state for one app home: store access with error capture,
    digest cache and a media index over the home's roots."""

    def __init__(self, image_root: str | Path, home: AppHome, aliases: AliasTable | None = None):
        self.root = Path(image_root)
        self.home = home
        self.aliases = aliases or AliasTable()
        self.result = AppResult(home.app, home.os)
        self._digests: dict[str, bytes] = {}
        self._examined: dict[str, str] = {}
        self._media_index: dict[str, list[str]] | None = None

    # bookkeeping

    def warn(self, message: str) -> None:
        log.warning("%s: %s", self.home.app.value, message)
        self.result.warnings.append(message)

    def error(self, path: str, reason: str) -> None:
        """Record a store failure; one error entry per store path."""
        if any(p == path for p, _ in self.result.errors):
            self.warn(f"{path}: {reason}")
            return
        log.error("%s: %s: %s", self.home.app.value, path, reason)
        self.result.errors.append((path, reason))

    def digest(self, relpath: str) -> bytes:
        cached = self._digests.get(relpath)
        if cached is None:
            cached = hash_file(relpath, self.root)
            self._digests[relpath] = cached
        return cached

    def examine(self, relpath: str) -> bytes:
        digest = self.digest(relpath)
        self._examined[relpath] = digest.hex()
        return digest

    def finish(self) -> AppResult:
        for sidecar in self.home.all_stores("sidecar"):
            try:
                self.examine(sidecar)
            except FileUnreadable as exc:
                self.error(sidecar, f"unreadable: {exc}")
                continue
            self.warn(f"journal sidecar {sidecar} present; hashed, not replayed")
        self.result.stores_examined = sorted(self._examined.items())
        return self.result

    # stores

    def open_sqlite(self, role: str, path: str | None = None) -> TableStore | None:
        path = path or self.home.store(role)
        if path is None:
            self.error(self.home.install_root or self.home.roots[0], f"{role} absent")
            return None
        try:
            self.examine(path)
            return open_table_store(path, self.root)
        except StoreError as exc:
            self.error(path, exc.reason)
        except (OSError, FileUnreadable) as exc:
            self.error(path, f"unreadable: {exc}")
        return None

    def open_plist(self, role: str, path: str | None = None, *, required: bool = True) -> PlistTree | None:
        path = path or self.home.store(role)
        if path is None:
            if required:
                self.error(self.home.install_root or self.home.roots[0], f"{role} absent")
            return None
        try:
            self.examine(path)
            return open_plist(path, self.root)
        except StoreError as exc:
            self.error(path, exc.reason)
        except (OSError, FileUnreadable) as exc:
            self.error(path, f"unreadable: {exc}")
        return None

    def table(self, store: TableStore, canonical: str) -> str | None:
        for name in self.aliases.candidates(self.home.app, canonical):
            found = store.find_table(name)
            if found is not None:
                return found
        return None

    def rows(
        self, store: TableStore, canonical_table: str, columns: Iterable[str], *, optional: bool = False
    ) -> list[dict[str, Any]]:
        """Read a table by canonical names; each row also carries ``rowid``.

        A missing table reads as empty and is recorded as a store error, or
        only as a warning when ``optional``.
        """
        table = self.table(store, canonical_table)
        if table is None:
            if optional:
                self.warn(f"{store.path}: optional table {canonical_table} not present")
            else:
                self.error(store.path, f"table {canonical_table} missing")
            return []
        physical = {c.lower() for c in store.columns(table)}
        wanted: list[tuple[str, str]] = []
        for col in columns:
            key = f"{canonical_table}.{col}"
            choice = next(
                (c for c in self.aliases.candidates(self.home.app, key) if c.lower() in physical),
                col,
            )
            wanted.append((col, choice))
        before = len(store.warnings)
        try:
            raw = store.read_rows(table, ["rowid"] + [p for _, p in wanted])
        except StoreError as exc:
            self.error(store.path, exc.reason)
            return []
        except TableMissing:
            self.error(store.path, f"table {canonical_table} missing")
            return []
        for message in store.warnings[before:]:
            self.warn(message)
        out = []
        for row in raw:
            mapped = {"rowid": row["rowid"], "_table": table}
            for canonical, physical_name in wanted:
                mapped[canonical] = row[physical_name]
            out.append(mapped)
        return out

    # media

    def media_index(self) -> dict[str, list[str]]:
        if self._media_index is None:
            index: dict[str, list[str]] = {}
            seen: set[str] = set()
            for root in self.home.roots:
                top = self.root / root
                if not top.is_dir():
                    continue
                for full in walk_files(top):
                    rel = full.relative_to(self.root).as_posix()
                    if rel in seen:
                        continue
                    seen.add(rel)
                    index.setdefault(full.name.lower(), []).append(rel)
            self._media_index = index
        return self._media_index

    def resolve_media(self, reference: str | None, *, prefer_under: str | None = None) -> str | None:
        """Resolve a stored file reference (full device path or bare name) to
        an image-relative path under one of the home's roots."""
        if not reference:
            return None
        reference = reference.replace("\\", "/")
        if prefer_under:
            candidate = f"{prefer_under.rstrip('/')}/{reference.lstrip('/')}"
            if ".." not in PurePosixPath(candidate).parts and (self.root / candidate).is_file():
                return candidate
        hits = self.media_index().get(PurePosixPath(reference).name.lower(), [])
        if not hits:
            return None
        if len(hits) > 1:
            suffix = reference.lstrip("/").lower()
            for hit in hits:
                if hit.lower().endswith(suffix):
                    return hit
        return hits[0]

    def files_under(self, relpath: str) -> list[str]:
        top = self.root / relpath
        if not top.is_dir():
            return []
        return [full.relative_to(self.root).as_posix() for full in walk_files(top)]

    def head(self, relpath: str, size: int = 16) -> bytes:
        with open(self.root / relpath, "rb") as fh:
            return fh.read(size)

    def size(self, relpath: str) -> int:
        return os.stat(self.root / relpath).st_size


def text_or_none(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, bytes):
        try:
            return value.decode("utf-8")
        except UnicodeDecodeError:
            return None
    return str(value)


def installation_record(ctx: Context, primary: str | None):
    """Installation evidence for the home, anchored on the bundle's Info.plist
    when readable, else on the app's primary store. Not emitted when the
    primary store is missing."""
    home = ctx.home
    if primary is None or not (ctx.root / primary).is_file():
        return None
    version = None
    anchor = None
    info_path = home.store("info_plist")
    if info_path is not None:
        info = ctx.open_plist("info_plist", info_path)
        if info is not None:
            for key in ("CFBundleShortVersionString", "CFBundleVersion"):
                value = info.lookup(key)
                if isinstance(value, str) and value:
                    version = value
                    anchor = SourceAnchor.keypath(info_path, ctx.digest(info_path), key)
                    break
            if anchor is None:
                anchor = SourceAnchor.keypath(info_path, ctx.digest(info_path), "CFBundleIdentifier")
    if anchor is None:
        anchor = SourceAnchor(primary, ctx.examine(primary), StoreKind.SQLITE)
    return InstallationRecord(
        app=home.app, os=home.os, install_root=home.install_root, version_hint=version, anchor=anchor
    )


def orphan_attachments(ctx: Context, dirs: Iterable[str], used: set[str]):
    """Attachment records for media files no store row points at."""
    out = []
    seen: set[str] = set()
    for top in dirs:
        for rel in ctx.files_under(top):
            if rel in used or rel in seen:
                continue
            seen.add(rel)
            out.append(
                AttachmentRecord(
                    app=ctx.home.app,
                    attachment_id=f"file:{rel}",
                    media_kind=media_kind(head=ctx.head(rel), name=rel),
                    media_path=rel,
                    size_bytes=ctx.size(rel),
                    anchor=SourceAnchor.media(rel, ctx.digest(rel)),
                )
            )
    return out

"""Deterministic synthesis of device-image fixtures with ground truth.

A fixture is a directory tree shaped like an extracted iOS or Android file
system, holding real SQLite files, binary plists and tiny valid media files
for the four messaging apps. Next to the tree sits ``manifest.json``: the
spec that produced it, a SHA-256 for every file, and the exact records a
correct extractor must report (without provenance anchors).

Ground-truth records are derived from the values written, never by running
the extractors, so the two sides check each other.
"""

from __future__ import annotations

import hashlib
import json
import plistlib
import random
import sqlite3
import struct
import uuid
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .ingest import walk_files
from .model import (
    AppId,
    ArtifactRecord,
    AttachmentRecord,
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
    UserProfileRecord,
    category_of,
    record_from_dict,
    record_to_dict,
)

MANIFEST_NAME = "manifest.json"
IMAGE_DIR = "image"
MANIFEST_FORMAT = "imtriage-fixture/1"

PROFILES = ("logical", "filesystem")

# 2013-06-01T00:00:00Z; every generated event falls in the following week
WINDOW_START_MS = 1_370_044_800_000
WINDOW_MS = 7 * 24 * 3600 * 1000
APPLE_EPOCH_OFFSET_MS = 978_307_200_000

DEFAULT_MEDIA_KINDS = (MediaKind.IMAGE, MediaKind.VIDEO, MediaKind.IMAGE, MediaKind.AUDIO, MediaKind.FILE)
FORGEABLE_KINDS = frozenset(
    {MediaKind.IMAGE, MediaKind.VIDEO, MediaKind.AUDIO, MediaKind.STICKER, MediaKind.FILE}
)

IOS_BUNDLES = {
    AppId.SKYPE: ("Skype.app", "com.skype.skype", "4.9.1"),
    AppId.VIBER: ("Viber.app", "com.viber", "3.0.1"),
    AppId.TANGO: ("Tango.app", "com.sgiggle.Tango", "2.8.3"),
    AppId.WHATSAPP: ("WhatsApp.app", "net.whatsapp.WhatsApp", "2.10.1"),
}

ANDROID_PACKAGE = {
    AppId.SKYPE: "com.skype.raider",
    AppId.VIBER: "com.viber.voip",
    AppId.TANGO: "com.sgiggle.production",
    AppId.WHATSAPP: "com.whatsapp",
}

_FIRST = ("Anna", "Ben", "Chloe", "Dimitris", "Elena", "Farid", "Grace", "Hugo", "Ines", "Jonas",
          "Katya", "Leo", "Maria", "Nikos", "Olga", "Pavel", "Quinn", "Rosa", "Stefan", "Tara")
_LAST = ("Adams", "Berg", "Costa", "Dufour", "Evans", "Fischer", "Georgiou", "Hale", "Ivanova",
         "Jensen", "Kowalski", "Lopez", "Moreau", "Novak", "Olsen", "Papas", "Rossi", "Silva")
_WORDS = ("meet", "tomorrow", "at", "the", "station", "call", "me", "when", "you", "arrive", "photo",
          "from", "yesterday", "ok", "see", "later", "running", "late", "lunch", "sounds", "good",
          "thanks", "where", "are", "parcel", "delivered", "battery", "low", "café", "ναι", "✓")


class OutputNotEmpty(FileExistsError):
    pass


@dataclass(frozen=True)
class AppCounts:
    messages: int = 0
    calls: int = 0
    contacts: int = 0
    attachments: int = 0
    located_messages: int = 0

    def __post_init__(self):
        for name in ("messages", "calls", "contacts", "attachments", "located_messages"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
        if self.located_messages > self.messages:
            raise ValueError("located_messages cannot exceed messages")


@dataclass(frozen=True)
class FixtureSpec:
    """What to forge. ``apps`` maps each present app to its row counts.

    ``media_kinds`` optionally fixes the cycle of attachment kinds per app;
    ``locations`` supplies Viber coordinates (used in order, then random).
    """

    os: OsKind
    profile: str = "filesystem"
    seed: int = 0
    apps: Mapping[AppId, AppCounts] = field(default_factory=dict)
    media_kinds: Mapping[AppId, tuple[MediaKind, ...]] = field(default_factory=dict)
    locations: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        os_kind = OsKind(self.os)
        if os_kind is OsKind.UNKNOWN:
            raise ValueError("fixture os must be ios or android")
        if self.profile not in PROFILES:
            raise ValueError(f"profile must be one of {PROFILES}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        apps = {AppId(a): c for a, c in self.apps.items()}
        kinds = {AppId(a): tuple(MediaKind(k) for k in ks) for a, ks in self.media_kinds.items()}
        for app, ks in kinds.items():
            if not ks or not set(ks) <= FORGEABLE_KINDS:
                raise ValueError(f"media kinds for {app.value} must be a non-empty subset of {sorted(FORGEABLE_KINDS)}")
        for lat, lon in self.locations:
            if not (-90 <= lat <= 90 and -180 <= lon <= 180):
                raise ValueError(f"coordinate out of range: {(lat, lon)}")
        object.__setattr__(self, "os", os_kind)
        object.__setattr__(self, "apps", dict(sorted(apps.items(), key=lambda kv: kv[0].value)))
        object.__setattr__(self, "media_kinds", dict(sorted(kinds.items(), key=lambda kv: kv[0].value)))
        object.__setattr__(self, "locations", tuple((float(a), float(b)) for a, b in self.locations))

    @property
    def apps_present(self) -> tuple[AppId, ...]:
        return tuple(self.apps)

    def materialized_apps(self) -> tuple[AppId, ...]:
        """Apps whose stores end up in the tree under this profile."""
        if self.profile == "logical":
            if self.os is OsKind.IOS:
                return ()
            return tuple(a for a in self.apps if a not in (AppId.VIBER, AppId.TANGO))
        return self.apps_present

    def kinds_for(self, app: AppId) -> tuple[MediaKind, ...]:
        return self.media_kinds.get(app, DEFAULT_MEDIA_KINDS)

    def to_dict(self) -> dict[str, Any]:
        return {
            "os": self.os.value,
            "profile": self.profile,
            "seed": self.seed,
            "apps": {a.value: vars(c).copy() for a, c in self.apps.items()},
            "media_kinds": {a.value: [k.value for k in ks] for a, ks in self.media_kinds.items()},
            "locations": [list(p) for p in self.locations],
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> FixtureSpec:
        return cls(
            os=OsKind(data["os"]),
            profile=data.get("profile", "filesystem"),
            seed=int(data.get("seed", 0)),
            apps={AppId(a): AppCounts(**c) for a, c in data.get("apps", {}).items()},
            media_kinds={AppId(a): tuple(MediaKind(k) for k in ks) for a, ks in data.get("media_kinds", {}).items()},
            locations=tuple(tuple(p) for p in data.get("locations", ())),
        )


def canonical_spec(os_kind: OsKind | str, profile: str = "filesystem", seed: int = 2013) -> FixtureSpec:
    """The reference scenario: two handsets, all four apps, a week of use."""
    os_kind = OsKind(os_kind)
    if os_kind is OsKind.IOS:
        apps = {
            AppId.SKYPE: AppCounts(messages=25, calls=4, contacts=10, attachments=3),
            AppId.VIBER: AppCounts(messages=20, calls=5, contacts=8, attachments=3, located_messages=2),
            AppId.TANGO: AppCounts(messages=12, attachments=3),
            AppId.WHATSAPP: AppCounts(messages=30, contacts=6, attachments=4),
        }
        kinds = {app: (MediaKind.IMAGE,) for app in apps}
        kinds[AppId.VIBER] = (MediaKind.IMAGE, MediaKind.VIDEO, MediaKind.STICKER)
    else:
        apps = {
            AppId.SKYPE: AppCounts(messages=25, calls=4, contacts=10, attachments=4),
            AppId.VIBER: AppCounts(messages=20, calls=5, contacts=8, attachments=3, located_messages=2),
            AppId.TANGO: AppCounts(messages=12, attachments=3),
            AppId.WHATSAPP: AppCounts(messages=30, contacts=6, attachments=4),
        }
        kinds = {
            AppId.SKYPE: (MediaKind.IMAGE, MediaKind.VIDEO),
            AppId.VIBER: (MediaKind.IMAGE, MediaKind.VIDEO),
            AppId.TANGO: (MediaKind.IMAGE,),
            AppId.WHATSAPP: (MediaKind.IMAGE,),
        }
    return FixtureSpec(
        os=os_kind,
        profile=profile,
        seed=seed,
        apps=apps,
        media_kinds=kinds,
        locations=((48.8566, 2.3522), (51.5074, -0.1278)),
    )


@dataclass(frozen=True)
class FixtureManifest:
    spec: FixtureSpec
    files: dict[str, str]
    records: dict[AppId, tuple[ArtifactRecord, ...]]

    def counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for app, records in self.records.items():
            per: dict[str, int] = {}
            for record in records:
                key = category_of(record).value
                per[key] = per.get(key, 0) + 1
            out[app.value] = dict(sorted(per.items()))
        return out

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": MANIFEST_FORMAT,
            "spec": self.spec.to_dict(),
            "files": dict(sorted(self.files.items())),
            "records": {
                app.value: [record_to_dict(r, with_anchor=False) for r in records]
                for app, records in self.records.items()
            },
            "counts": self.counts(),
        }

    def dumps(self) -> bytes:
        return (json.dumps(self.to_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> FixtureManifest:
        if data.get("format") != MANIFEST_FORMAT:
            raise ValueError(f"unsupported manifest format {data.get('format')!r}")
        return cls(
            spec=FixtureSpec.from_dict(data["spec"]),
            files=dict(data["files"]),
            records={
                AppId(app): tuple(record_from_dict(r) for r in records)
                for app, records in data["records"].items()
            },
        )

    @classmethod
    def load(cls, path: str | Path) -> FixtureManifest:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# media bytes ---------------------------------------------------------------


def _png(rng: random.Random) -> bytes:
    def chunk(tag: bytes, body: bytes) -> bytes:
        return struct.pack(">I", len(body)) + tag + body + struct.pack(">I", zlib.crc32(tag + body))

    pixel = bytes([0, rng.randrange(256), rng.randrange(256), rng.randrange(256)])
    return (
        b"\x89PNG\r\n\x1a\n"
        + chunk(b"IHDR", struct.pack(">IIBBBBB", 1, 1, 8, 2, 0, 0, 0))
        + chunk(b"IDAT", zlib.compress(pixel))
        + chunk(b"IEND", b"")
    )


def _media_bytes(kind: MediaKind, rng: random.Random) -> bytes:
    pad = rng.randbytes(rng.randrange(8, 40))
    if kind is MediaKind.IMAGE:
        return b"\xff\xd8\xff\xe0\x00\x10JFIF\x00\x01\x01\x00\x00\x01\x00\x01\x00\x00" + pad + b"\xff\xd9"
    if kind is MediaKind.VIDEO:
        return struct.pack(">I", 24) + b"ftypisom\x00\x00\x02\x00isomiso2" + struct.pack(">I", 8 + len(pad)) + b"free" + pad
    if kind is MediaKind.AUDIO:
        return struct.pack(">I", 24) + b"ftypM4A \x00\x00\x00\x00M4A mp42" + struct.pack(">I", 8 + len(pad)) + b"free" + pad
    if kind is MediaKind.FILE:
        return b"%PDF-1.4\n%" + pad.hex().encode() + b"\n%%EOF\n"
    return _png(rng)  # sticker


_EXT = {
    MediaKind.IMAGE: ".jpg",
    MediaKind.VIDEO: ".mp4",
    MediaKind.AUDIO: ".m4a",
    MediaKind.FILE: ".pdf",
    MediaKind.STICKER: ".png",
}

_MIME = {
    MediaKind.IMAGE: "image/jpeg",
    MediaKind.VIDEO: "video/mp4",
    MediaKind.AUDIO: "audio/mp4",
    MediaKind.FILE: "application/pdf",
    MediaKind.STICKER: "sticker",
}


def _content_kind(kind: MediaKind) -> MediaKind:
    """Kind a reader can tell from the bytes alone: stickers are PNG images."""
    return MediaKind.IMAGE if kind is MediaKind.STICKER else kind


# generation helpers --------------------------------------------------------


class _People:
    """Seeded names, handles and fictional phone numbers, all unique."""

    def __init__(self, rng: random.Random):
        self.rng = rng
        self._phones: set[str] = set()
        self._handles: set[str] = set()

    def name(self) -> tuple[str, str]:
        return self.rng.choice(_FIRST), self.rng.choice(_LAST)

    def phone(self) -> str:
        while True:
            number = f"+155501{self.rng.randrange(100000):05d}"
            if number not in self._phones:
                self._phones.add(number)
                return number

    def local_phone(self) -> str:
        return f"555-01{self.rng.randrange(100):02d}"

    def handle(self, first: str, last: str) -> str:
        while True:
            handle = f"{first.lower()}.{last.lower()}{self.rng.randrange(10, 1000)}"
            if handle not in self._handles:
                self._handles.add(handle)
                return handle

    def body(self) -> str:
        words = [self.rng.choice(_WORDS) for _ in range(self.rng.randint(2, 10))]
        return " ".join(words).capitalize()

    def time_ms(self, resolution_ms: int = 1) -> int:
        return WINDOW_START_MS + self.rng.randrange(WINDOW_MS // resolution_ms) * resolution_ms


def _apple_seconds(ms: int) -> float:
    return (ms - APPLE_EPOCH_OFFSET_MS) / 1000.0


def _opaque_blob(rng: random.Random, low: int, high: int) -> bytes:
    """Seeded random bytes that are not valid UTF-8 (so they read as opaque)."""
    while True:
        blob = rng.randbytes(rng.randint(low, high))
        try:
            blob.decode("utf-8")
        except UnicodeDecodeError:
            return blob


def _write_db(path: Path, schema: list[str], rows: list[tuple[str, list[tuple]]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    con = sqlite3.connect(path)
    try:
        for statement in schema:
            con.execute(statement)
        for sql, values in rows:
            con.executemany(sql, values)
        con.commit()
    finally:
        con.close()


class _Forge:
    def __init__(self, spec: FixtureSpec, image: Path):
        self.spec = spec
        self.image = image
        self.records: dict[AppId, list[ArtifactRecord]] = {}

    def rng(self, app: AppId, purpose: str = "") -> random.Random:
        return random.Random(f"{self.spec.seed}:{app.value}:{purpose}")

    def write(self, rel: str, data: bytes) -> None:
        full = self.image / rel
        full.parent.mkdir(parents=True, exist_ok=True)
        full.write_bytes(data)

    def db(self, rel: str, schema: list[str], rows: list[tuple[str, list[tuple]]]) -> None:
        _write_db(self.image / rel, schema, rows)

    def container(self, app: AppId) -> str:
        digest = hashlib.sha256(f"{self.spec.seed}:{app.value}:container".encode()).digest()
        guid = str(uuid.UUID(bytes=digest[:16], version=4)).upper()
        root = f"var/mobile/Applications/{guid}"
        bundle, identifier, version = IOS_BUNDLES[app]
        info = {
            "CFBundleIdentifier": identifier,
            "CFBundleName": bundle[: -len(".app")],
            "CFBundleShortVersionString": version,
        }
        self.write(f"{root}/{bundle}/Info.plist", plistlib.dumps(info, fmt=plistlib.FMT_BINARY))
        (self.image / root / "Documents").mkdir(parents=True, exist_ok=True)
        (self.image / root / "Library").mkdir(parents=True, exist_ok=True)
        return root

    def install(self, app: AppId, root: str) -> InstallationRecord:
        version = IOS_BUNDLES[app][2] if self.spec.os is OsKind.IOS else None
        return InstallationRecord(app=app, os=self.spec.os, install_root=root, version_hint=version)

    def media(self, rel: str, kind: MediaKind, rng: random.Random) -> int:
        data = _media_bytes(kind, rng)
        self.write(rel, data)
        return len(data)


# per-app writers -------------------------------------------------------------


def _forge_skype(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    app = AppId.SKYPE
    ios = f.spec.os is OsKind.IOS
    people = _People(f.rng(app))
    media_rng = f.rng(app, "media")
    first, last = people.name()
    account = people.handle(first, last)
    account_phone = people.phone()

    if ios:
        install_root = f.container(app)
        user_dir = f"{install_root}/Library/Application Support/Skype/{account}"
        media_dir = f"{user_dir}/media"
    else:
        install_root = f"data/data/{ANDROID_PACKAGE[app]}"
        user_dir = f"{install_root}/files/{account}"
        media_dir = "mnt/sdcard/Android/data/com.skype.raider/cache"
    out: list[ArtifactRecord] = [f.install(app, install_root)]

    avatars: dict[str, AttachmentRecord] = {}
    avatar_rows = []

    def add_avatar(name: str) -> str:
        blob = _png(media_rng)
        avatar_rows.append((len(avatar_rows) + 1, name, blob))
        avatars[name] = AttachmentRecord(
            app=app, attachment_id=f"avatar:{name}", media_kind=MediaKind.IMAGE, size_bytes=len(blob)
        )
        return avatars[name].attachment_id

    account_avatar = add_avatar(account) if ios else None
    out.append(
        UserProfileRecord(
            app=app, account_id=account, display_name=f"{first} {last}", phone=account_phone,
            avatar_ref=account_avatar,
        )
    )

    contact_rows = []
    handles = []
    for i in range(counts.contacts):
        cf, cl = people.name()
        handle = people.handle(cf, cl)
        handles.append(handle)
        phone = None if i % 3 == 2 else (people.local_phone() if i % 5 == 4 else people.phone())
        contact_rows.append((i + 1, handle, f"{cf} {cl}", phone))
        avatar = add_avatar(handle) if ios and i < 2 else None
        out.append(
            ContactRecord(
                app=app,
                contact_key=handle,
                display_name=f"{cf} {cl}",
                phone_numbers=(phone,) if phone and phone.startswith("+") else (),
                raw_phone_numbers=(phone,) if phone and not phone.startswith("+") else (),
                avatar_ref=avatar,
            )
        )
    out.extend(avatars.values())

    peers = handles[:5] or [people.handle(*people.name()) for _ in range(2)]
    convo_ids = {peer: i + 1 for i, peer in enumerate(peers)}
    conversation_rows = [(cid, peer, 1) for peer, cid in convo_ids.items()]

    message_rows, sms_rows = [], []
    chat_messages: list[dict] = []
    sms_records = []
    for i in range(counts.messages):
        ts_ms = people.time_ms(1000)
        body = people.body()
        if i % 7 == 6:
            target = people.phone()
            sms_id = len(sms_rows) + 1
            sms_rows.append((sms_id, body, ts_ms // 1000, target))
            sms_records.append(
                MessageRecord(
                    app=app, message_id=f"sms:{sms_id}", direction=Direction.OUTGOING,
                    conversation_id=f"sms:{target}", peer_id=target, timestamp_utc_ms=ts_ms,
                    body=body, body_state=BodyState.CLEARTEXT,
                )
            )
            continue
        peer = people.rng.choice(peers)
        outgoing = people.rng.random() < 0.5
        msg_id = len(message_rows) + 1
        message_rows.append((msg_id, convo_ids[peer], account if outgoing else peer, peer, body, ts_ms // 1000))
        chat_messages.append(
            dict(id=msg_id, peer=peer, outgoing=outgoing, ts=ts_ms, body=body, refs=[])
        )

    call_rows, voicemail_rows = [], []
    for i in range(counts.calls):
        peer = people.rng.choice(peers)
        ts_ms = people.time_ms(1000)
        if i % 4 == 3:
            duration = people.rng.randint(3, 90)
            voicemail_rows.append((len(voicemail_rows) + 1, peer, ts_ms // 1000, duration))
            out.append(
                CallRecord(app=app, direction=Direction.INCOMING, peer_id=peer, start_utc_ms=ts_ms,
                           duration_s=duration, kind=CallKind.VOICEMAIL)
            )
            continue
        direction = people.rng.choice((Direction.OUTGOING, Direction.INCOMING, Direction.MISSED))
        duration = 0 if direction is Direction.MISSED else people.rng.randint(1, 3600)
        video = people.rng.random() < 0.3
        call_rows.append(
            (len(call_rows) + 1, ts_ms // 1000, peer, int(direction is not Direction.OUTGOING), duration, int(video))
        )
        out.append(
            CallRecord(app=app, direction=direction, peer_id=peer, start_utc_ms=ts_ms, duration_s=duration,
                       kind=CallKind.VIDEO if video else CallKind.AUDIO)
        )

    kinds = f.spec.kinds_for(app)
    transfer_rows = []
    for i in range(counts.attachments):
        kind = kinds[i % len(kinds)]
        name = f"skype_{i + 1:03d}{_EXT[kind]}"
        rel = f"{media_dir}/{name}"
        size = f.media(rel, kind, media_rng)
        linked = chat_messages[i] if i < len(chat_messages) else None
        tid = i + 1
        transfer_rows.append(
            (tid, linked["peer"] if linked else peers[0], name, "/" + rel, size, linked["id"] if linked else None)
        )
        if linked:
            linked["refs"].append(f"transfer:{tid}")
        out.append(
            AttachmentRecord(
                app=app, attachment_id=f"transfer:{tid}", media_kind=_content_kind(kind), media_path=rel,
                size_bytes=size, linked_message=f"msg:{linked['id']}" if linked else None,
            )
        )

    for m in chat_messages:
        out.append(
            MessageRecord(
                app=app, message_id=f"msg:{m['id']}",
                direction=Direction.OUTGOING if m["outgoing"] else Direction.INCOMING,
                conversation_id=m["peer"], peer_id=m["peer"], timestamp_utc_ms=m["ts"], body=m["body"],
                body_state=BodyState.CLEARTEXT, attachment_refs=tuple(m["refs"]),
            )
        )
    out.extend(sms_records)

    f.db(
        f"{user_dir}/main.db",
        [
            "CREATE TABLE Accounts (id INTEGER PRIMARY KEY, skypename TEXT, fullname TEXT, phone_mobile TEXT)",
            "CREATE TABLE Contacts (id INTEGER PRIMARY KEY, skypename TEXT, fullname TEXT, phone_mobile TEXT)",
            "CREATE TABLE Conversations (id INTEGER PRIMARY KEY, identity TEXT, type INTEGER)",
            "CREATE TABLE Messages (id INTEGER PRIMARY KEY, convo_id INTEGER, author TEXT, dialog_partner TEXT,"
            " body_xml TEXT, timestamp INTEGER)",
            "CREATE TABLE SMSes (id INTEGER PRIMARY KEY, body TEXT, timestamp INTEGER, target_numbers TEXT)",
            "CREATE TABLE Calls (id INTEGER PRIMARY KEY, begin_timestamp INTEGER, partner_handle TEXT,"
            " is_incoming INTEGER, duration INTEGER, is_video INTEGER)",
            "CREATE TABLE Voicemails (id INTEGER PRIMARY KEY, partner_handle TEXT, timestamp INTEGER, duration INTEGER)",
            "CREATE TABLE Transfers (id INTEGER PRIMARY KEY, partner_handle TEXT, filename TEXT, filepath TEXT,"
            " filesize INTEGER, message_id INTEGER)",
        ],
        [
            ("INSERT INTO Accounts VALUES (?,?,?,?)", [(1, account, f"{first} {last}", account_phone)]),
            ("INSERT INTO Contacts VALUES (?,?,?,?)", contact_rows),
            ("INSERT INTO Conversations VALUES (?,?,?)", conversation_rows),
            ("INSERT INTO Messages VALUES (?,?,?,?,?,?)", message_rows),
            ("INSERT INTO SMSes VALUES (?,?,?,?)", sms_rows),
            ("INSERT INTO Calls VALUES (?,?,?,?,?,?)", call_rows),
            ("INSERT INTO Voicemails VALUES (?,?,?,?)", voicemail_rows),
            ("INSERT INTO Transfers VALUES (?,?,?,?,?,?)", transfer_rows),
        ],
    )
    if ios:
        f.db(
            f"{user_dir}/main.db.EMBEDDED",
            ["CREATE TABLE Avatars (id INTEGER PRIMARY KEY, skypename TEXT, image BLOB)"],
            [("INSERT INTO Avatars VALUES (?,?,?)", avatar_rows)],
        )
    return out


def _viber_people(people: _People, counts: AppCounts):
    contacts = []
    for i in range(counts.contacts):
        first, last = people.name()
        phone = people.local_phone() if i % 5 == 4 else people.phone()
        contacts.append((f"{first} {last}", phone))
    peers = [p for _, p in contacts if p.startswith("+")][:4] or [people.phone() for _ in range(2)]
    return contacts, peers


def _coordinates(f: _Forge, rng: random.Random, count: int) -> list[tuple[float, float]]:
    fixed = list(f.spec.locations[:count])
    while len(fixed) < count:
        fixed.append((round(rng.uniform(-90, 90), 6), round(rng.uniform(-180, 180), 6)))
    return fixed


def _forge_viber(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    if f.spec.os is OsKind.IOS:
        return _forge_viber_ios(f, counts)
    return _forge_viber_android(f, counts)


def _forge_viber_ios(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    app = AppId.VIBER
    people = _People(f.rng(app))
    media_rng = f.rng(app, "media")
    root = f.container(app)
    out: list[ArtifactRecord] = [f.install(app, root)]
    contacts, peers = _viber_people(people, counts)

    abcontact_rows, phone_rows = [], []
    for i, (name, phone) in enumerate(contacts):
        abcontact_rows.append((i + 1, name))
        phone_rows.append((i + 1, i + 1, phone))
        e164 = phone.startswith("+")
        out.append(
            ContactRecord(
                app=app, contact_key=f"contact:{i + 1}", display_name=name,
                phone_numbers=(phone,) if e164 else (), raw_phone_numbers=() if e164 else (phone,),
            )
        )
    conversation_rows = [(i + 1, peer) for i, peer in enumerate(peers)]

    kinds = f.spec.kinds_for(app)
    attachment_rows = []
    for i in range(counts.attachments):
        kind = kinds[i % len(kinds)]
        name = f"viber_{i + 1:03d}{_EXT[kind]}"
        rel = f"{root}/Documents/Attachments/{name}"
        size = f.media(rel, kind, media_rng)
        attachment_rows.append((i + 1, name, kind.value, size))
        out.append(
            AttachmentRecord(
                app=app, attachment_id=f"att:{i + 1}", media_kind=kind, media_path=rel, size_bytes=size,
                linked_message=f"msg:{i + 1}" if i < counts.messages else None,
            )
        )

    coordinates = _coordinates(f, f.rng(app, "location"), counts.located_messages)
    location_rows, message_rows = [], []
    for i in range(counts.messages):
        pk = i + 1
        convo = people.rng.randrange(len(peers))
        outgoing = people.rng.random() < 0.5
        ts = people.time_ms()
        body = people.body()
        loc_pk = None
        if i < counts.located_messages:
            loc_pk = len(location_rows) + 1
            lat, lon = coordinates[i]
            location_rows.append((loc_pk, lat, lon))
            out.append(
                LocationFix(app=app, location_id=f"loc:{loc_pk}", latitude_deg=lat, longitude_deg=lon,
                            linked_message=f"msg:{pk}")
            )
        attachment_pk = pk if i < counts.attachments else None
        message_rows.append(
            (pk, convo + 1, peers[convo], body, _apple_seconds(ts), "delivered" if outgoing else "received",
             loc_pk, attachment_pk)
        )
        out.append(
            MessageRecord(
                app=app, message_id=f"msg:{pk}", direction=Direction.OUTGOING if outgoing else Direction.INCOMING,
                conversation_id=peers[convo], peer_id=peers[convo], timestamp_utc_ms=ts, body=body,
                body_state=BodyState.CLEARTEXT, attachment_refs=(f"att:{pk}",) if attachment_pk else (),
                location_ref=f"loc:{loc_pk}" if loc_pk else None,
            )
        )

    recent_rows = []
    for i in range(counts.calls):
        direction = people.rng.choice((Direction.INCOMING, Direction.OUTGOING, Direction.MISSED))
        duration = 0 if direction is Direction.MISSED else people.rng.randint(1, 3600)
        peer = people.rng.choice(peers)
        ts = people.time_ms()
        recent_rows.append((i + 1, peer, _apple_seconds(ts), duration, direction.value))
        out.append(
            CallRecord(app=app, direction=direction, peer_id=peer, start_utc_ms=ts, duration_s=duration,
                       kind=CallKind.AUDIO)
        )

    f.db(
        f"{root}/Documents/Contacts.data",
        [
            "CREATE TABLE ZABCONTACT (Z_PK INTEGER PRIMARY KEY, ZMAINNAME VARCHAR)",
            "CREATE TABLE ZPHONENUMBER (Z_PK INTEGER PRIMARY KEY, ZCONTACT INTEGER, ZPHONE VARCHAR)",
            "CREATE TABLE ZCONVERSATION (Z_PK INTEGER PRIMARY KEY, ZIDENTIFIER VARCHAR)",
            "CREATE TABLE ZVIBERLOCATION (Z_PK INTEGER PRIMARY KEY, ZLATITUDE FLOAT, ZLONGITUDE FLOAT)",
            "CREATE TABLE ZATTACHMENT (Z_PK INTEGER PRIMARY KEY, ZNAME VARCHAR, ZTYPE VARCHAR, ZSIZE INTEGER)",
            "CREATE TABLE ZVIBERMESSAGE (Z_PK INTEGER PRIMARY KEY, ZCONVERSATION INTEGER, ZPHONENUM VARCHAR,"
            " ZTEXT VARCHAR, ZDATE TIMESTAMP, ZSTATE VARCHAR, ZLOCATION INTEGER, ZATTACHMENT INTEGER)",
            "CREATE TABLE ZRECENT (Z_PK INTEGER PRIMARY KEY, ZPHONENUM VARCHAR, ZDATE TIMESTAMP, ZDURATION INTEGER,"
            " ZCALLTYPE VARCHAR)",
        ],
        [
            ("INSERT INTO ZABCONTACT VALUES (?,?)", abcontact_rows),
            ("INSERT INTO ZPHONENUMBER VALUES (?,?,?)", phone_rows),
            ("INSERT INTO ZCONVERSATION VALUES (?,?)", conversation_rows),
            ("INSERT INTO ZVIBERLOCATION VALUES (?,?,?)", location_rows),
            ("INSERT INTO ZATTACHMENT VALUES (?,?,?,?)", attachment_rows),
            ("INSERT INTO ZVIBERMESSAGE VALUES (?,?,?,?,?,?,?,?)", message_rows),
            ("INSERT INTO ZRECENT VALUES (?,?,?,?,?)", recent_rows),
        ],
    )
    (f.image / root / "Documents" / "Attachments").mkdir(parents=True, exist_ok=True)
    return out


_ANDROID_CALL_TYPE = {Direction.INCOMING: 1, Direction.OUTGOING: 2, Direction.MISSED: 3}


def _forge_viber_android(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    app = AppId.VIBER
    people = _People(f.rng(app))
    media_rng = f.rng(app, "media")
    package = f"data/data/{ANDROID_PACKAGE[app]}"
    sdcard = "mnt/sdcard/viber"
    out: list[ArtifactRecord] = [f.install(app, package)]
    contacts, peers = _viber_people(people, counts)

    contact_rows, data_rows = [], []
    avatars_left = 2
    for i, (name, phone) in enumerate(contacts):
        contact_rows.append((i + 1, name))
        data_rows.append((i + 1, i + 1, phone))
        e164 = phone.startswith("+")
        avatar = None
        if e164 and avatars_left:
            avatars_left -= 1
            rel = f"{sdcard}/User photos/{phone[1:]}.jpg"
            size = f.media(rel, MediaKind.IMAGE, media_rng)
            avatar = f"file:{rel}"
            out.append(AttachmentRecord(app=app, attachment_id=avatar, media_kind=MediaKind.IMAGE,
                                        media_path=rel, size_bytes=size))
        out.append(
            ContactRecord(
                app=app, contact_key=f"contact:{i + 1}", display_name=name,
                phone_numbers=(phone,) if e164 else (), raw_phone_numbers=() if e164 else (phone,),
                avatar_ref=avatar,
            )
        )

    kinds = f.spec.kinds_for(app)
    attachment_paths = []
    for i in range(counts.attachments):
        kind = kinds[i % len(kinds)]
        folder = "Viber Video" if kind is MediaKind.VIDEO else "Viber Images"
        rel = f"{sdcard}/{folder}/viber_{i + 1:03d}{_EXT[kind]}"
        size = f.media(rel, kind, media_rng)
        attachment_paths.append(rel)
        out.append(
            AttachmentRecord(
                app=app, attachment_id=f"file:{rel}", media_kind=_content_kind(kind), media_path=rel,
                size_bytes=size, linked_message=f"msg:{i + 1}" if i < counts.messages else None,
            )
        )

    coordinates = _coordinates(f, f.rng(app, "location"), counts.located_messages)
    message_rows = []
    for i in range(counts.messages):
        pk = i + 1
        convo = people.rng.randrange(len(peers))
        outgoing = people.rng.random() < 0.5
        ts = people.time_ms()
        body = people.body()
        lat = lon = None
        if i < counts.located_messages:
            lat, lon = coordinates[i]
            out.append(
                LocationFix(app=app, location_id=f"loc:{pk}", latitude_deg=lat, longitude_deg=lon,
                            linked_message=f"msg:{pk}")
            )
        extra = "/" + attachment_paths[i] if i < len(attachment_paths) else None
        message_rows.append((pk, convo + 1, peers[convo], body, ts, int(outgoing), lat, lon, extra))
        out.append(
            MessageRecord(
                app=app, message_id=f"msg:{pk}", direction=Direction.OUTGOING if outgoing else Direction.INCOMING,
                conversation_id=str(convo + 1), peer_id=peers[convo], timestamp_utc_ms=ts, body=body,
                body_state=BodyState.CLEARTEXT,
                attachment_refs=(f"file:{attachment_paths[i]}",) if extra else (),
                location_ref=f"loc:{pk}" if lat is not None else None,
            )
        )

    call_rows = []
    for i in range(counts.calls):
        direction = people.rng.choice((Direction.INCOMING, Direction.OUTGOING, Direction.MISSED))
        duration = 0 if direction is Direction.MISSED else people.rng.randint(1, 3600)
        peer = people.rng.choice(peers)
        ts = people.time_ms()
        call_rows.append((i + 1, peer, ts, duration, _ANDROID_CALL_TYPE[direction]))
        out.append(
            CallRecord(app=app, direction=direction, peer_id=peer, start_utc_ms=ts, duration_s=duration,
                       kind=CallKind.AUDIO)
        )

    f.db(
        f"{package}/databases/viber_messages",
        [
            "CREATE TABLE messages (_id INTEGER PRIMARY KEY, conversation_id INTEGER, address TEXT, body TEXT,"
            " date INTEGER, type INTEGER, location_lat REAL, location_lng REAL, extra_uri TEXT)",
        ],
        [("INSERT INTO messages VALUES (?,?,?,?,?,?,?,?,?)", message_rows)],
    )
    f.db(
        f"{package}/databases/viber_data",
        [
            "CREATE TABLE calls (_id INTEGER PRIMARY KEY, number TEXT, date INTEGER, duration INTEGER, type INTEGER)",
            "CREATE TABLE phonebookcontact (_id INTEGER PRIMARY KEY, display_name TEXT)",
            "CREATE TABLE phonebookdata (_id INTEGER PRIMARY KEY, contact_id INTEGER, data1 TEXT)",
        ],
        [
            ("INSERT INTO calls VALUES (?,?,?,?,?)", call_rows),
            ("INSERT INTO phonebookcontact VALUES (?,?)", contact_rows),
            ("INSERT INTO phonebookdata VALUES (?,?,?)", data_rows),
        ],
    )
    return out


def _forge_tango(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    app = AppId.TANGO
    ios = f.spec.os is OsKind.IOS
    people = _People(f.rng(app))
    blob_rng = f.rng(app, "payload")
    media_rng = f.rng(app, "media")
    if ios:
        install_root = f.container(app)
        data_dir = f"{install_root}/Library/.sgiggle"
        media_dir = None
    else:
        install_root = f"data/data/{ANDROID_PACKAGE[app]}"
        data_dir = f"{install_root}/files"
        media_dir = f"{data_dir}/TCStorageManagerMediaCache"
    out: list[ArtifactRecord] = [f.install(app, install_root)]

    if ios:
        first, last = people.name()
        phone = people.phone()
        account = f"tg{people.rng.randrange(10**8, 10**9)}"
        prefs = {"TangoAccountId": account, "FirstName": first, "LastName": last, "PhoneNumber": phone}
        f.write(
            f"{install_root}/Library/Preferences/com.sgiggle.Tango.plist",
            plistlib.dumps(prefs, fmt=plistlib.FMT_BINARY),
        )
        out.append(UserProfileRecord(app=app, account_id=account, display_name=f"{first} {last}", phone=phone))

    conversations = [_opaque_blob(blob_rng, 16, 24) for _ in range(min(3, counts.messages))]
    message_rows = []
    for i in range(counts.messages):
        conv = conversations[i % len(conversations)]
        message_rows.append((conv, _opaque_blob(blob_rng, 128, 256)))
        out.append(
            MessageRecord(
                app=app, message_id=f"tc:{i + 1}", direction=Direction.UNKNOWN,
                conversation_id="sha256:" + hashlib.sha256(conv).hexdigest()[:32], peer_id="",
                timestamp_utc_ms=None, body=None, body_state=BodyState.OPAQUE,
            )
        )

    kinds = f.spec.kinds_for(app)
    cache_rows = []
    for i in range(counts.attachments):
        kind = kinds[i % len(kinds)]
        name = f"tc_{i + 1:03d}{_EXT[kind]}"
        rel = None
        if media_dir is not None:
            rel = f"{media_dir}/{name}"
            size = f.media(rel, kind, media_rng)
        else:
            size = media_rng.randrange(1_000, 500_000)
        cache_rows.append((i + 1, f"https://cache.tango.example/{name}", name, _MIME[kind], size))
        out.append(
            AttachmentRecord(app=app, attachment_id=f"cache:{i + 1}", media_kind=kind, media_path=rel,
                             size_bytes=size)
        )

    f.db(
        f"{data_dir}/tc.db",
        ["CREATE TABLE messages (conv_id BLOB, payload BLOB)"],
        [("INSERT INTO messages VALUES (?,?)", message_rows)],
    )
    f.db(
        f"{data_dir}/TangoCache.db",
        [
            "CREATE TABLE cache_entries (id INTEGER PRIMARY KEY, url TEXT, filename TEXT, content_type TEXT,"
            " size INTEGER)",
        ],
        [("INSERT INTO cache_entries VALUES (?,?,?,?,?)", cache_rows)],
    )
    if media_dir is not None:
        (f.image / media_dir).mkdir(parents=True, exist_ok=True)
    return out


def _jid(phone: str) -> str:
    return f"{phone.lstrip('+')}@s.whatsapp.net"


_WA_FOLDERS = {
    MediaKind.IMAGE: "WhatsApp Images",
    MediaKind.VIDEO: "WhatsApp Video",
    MediaKind.AUDIO: "WhatsApp Audio",
    MediaKind.FILE: "WhatsApp Documents",
    MediaKind.STICKER: "WhatsApp Images",
}


def _forge_whatsapp(f: _Forge, counts: AppCounts) -> list[ArtifactRecord]:
    app = AppId.WHATSAPP
    ios = f.spec.os is OsKind.IOS
    people = _People(f.rng(app))
    media_rng = f.rng(app, "media")
    if ios:
        install_root = f.container(app)
        media_root = f"{install_root}/Library/Media"
    else:
        install_root = f"data/data/{ANDROID_PACKAGE[app]}"
        media_root = "mnt/sdcard/WhatsApp"
    out: list[ArtifactRecord] = [f.install(app, install_root)]

    contact_rows = []
    phones = []
    for i in range(counts.contacts):
        first, last = people.name()
        phone = people.phone()
        phones.append(phone)
        avatar = None
        if ios and i < 2:
            rel = f"{media_root}/profile/{phone[1:]}.jpg"
            size = f.media(rel, MediaKind.IMAGE, media_rng)
            avatar = f"file:{rel}"
            out.append(AttachmentRecord(app=app, attachment_id=avatar, media_kind=MediaKind.IMAGE,
                                        media_path=rel, size_bytes=size))
        contact_rows.append((i + 1, f"{first} {last}", phone, _jid(phone)))
        out.append(
            ContactRecord(app=app, contact_key=_jid(phone), display_name=f"{first} {last}",
                          phone_numbers=(phone,), avatar_ref=avatar)
        )

    n_chats = min(3, counts.messages)
    chats = [_jid(p) for p in phones[:n_chats]]
    while len(chats) < n_chats:
        chats.append(_jid(people.phone()))
    fallback_jid = chats[0] if chats else _jid(people.phone())

    messages = []
    for i in range(counts.messages):
        messages.append(
            dict(pk=i + 1, jid=chats[i % n_chats], outgoing=people.rng.random() < 0.5, ts=people.time_ms(),
                 body=people.body(), media=None)
        )

    kinds = f.spec.kinds_for(app)
    media_rows = []
    for i in range(counts.attachments):
        kind = kinds[i % len(kinds)]
        name = f"wa_{i + 1:03d}{_EXT[kind]}"
        linked = messages[i] if i < len(messages) else None
        if ios:
            folder = linked["jid"] if linked else fallback_jid
            rel = f"{media_root}/{folder}/{name}"
        else:
            rel = f"{media_root}/Media/{_WA_FOLDERS[kind]}/{name}"
        size = f.media(rel, kind, media_rng)
        if ios:
            media_rows.append((i + 1, linked["pk"] if linked else None, rel[len(install_root) + len("/Library/"):], size))
            attachment_id = f"media:{i + 1}"
        elif linked:
            attachment_id = f"media:{linked['pk']}"
        else:
            attachment_id = f"file:{rel}"
        if linked:
            linked["media"] = (attachment_id, name, size)
            linked["body"] = None
        out.append(
            AttachmentRecord(
                app=app, attachment_id=attachment_id, media_kind=_content_kind(kind), media_path=rel,
                size_bytes=size, linked_message=f"msg:{linked['pk']}" if linked else None,
            )
        )

    for m in messages:
        out.append(
            MessageRecord(
                app=app, message_id=f"msg:{m['pk']}",
                direction=Direction.OUTGOING if m["outgoing"] else Direction.INCOMING,
                conversation_id=m["jid"], peer_id=m["jid"], timestamp_utc_ms=m["ts"], body=m["body"],
                body_state=BodyState.CLEARTEXT if m["body"] is not None else BodyState.ABSENT,
                attachment_refs=(m["media"][0],) if m["media"] else (),
            )
        )

    if ios:
        docs = f"{install_root}/Documents"
        f.db(
            f"{docs}/Contacts.sqlite",
            ["CREATE TABLE ZWAADDRESSBOOKCONTACT (Z_PK INTEGER PRIMARY KEY, ZFULLNAME VARCHAR,"
             " ZPHONENUMBER VARCHAR, ZWHATSAPPID VARCHAR)"],
            [("INSERT INTO ZWAADDRESSBOOKCONTACT VALUES (?,?,?,?)", contact_rows)],
        )
        f.db(
            f"{docs}/ChatStorage.sqlite",
            [
                "CREATE TABLE ZWACHATSESSION (Z_PK INTEGER PRIMARY KEY, ZCONTACTJID VARCHAR)",
                "CREATE TABLE ZWAMESSAGE (Z_PK INTEGER PRIMARY KEY, ZCHATSESSION INTEGER, ZISFROMME INTEGER,"
                " ZFROMJID VARCHAR, ZTOJID VARCHAR, ZTEXT VARCHAR, ZMESSAGEDATE TIMESTAMP)",
                "CREATE TABLE ZWAMEDIAITEM (Z_PK INTEGER PRIMARY KEY, ZMESSAGE INTEGER, ZMEDIALOCALPATH VARCHAR,"
                " ZFILESIZE INTEGER)",
            ],
            [
                ("INSERT INTO ZWACHATSESSION VALUES (?,?)", [(i + 1, jid) for i, jid in enumerate(chats)]),
                (
                    "INSERT INTO ZWAMESSAGE VALUES (?,?,?,?,?,?,?)",
                    [
                        (m["pk"], chats.index(m["jid"]) + 1, int(m["outgoing"]),
                         None if m["outgoing"] else m["jid"], m["jid"] if m["outgoing"] else None,
                         m["body"], _apple_seconds(m["ts"]))
                        for m in messages
                    ],
                ),
                ("INSERT INTO ZWAMEDIAITEM VALUES (?,?,?,?)", media_rows),
            ],
        )
        (f.image / media_root).mkdir(parents=True, exist_ok=True)
    else:
        dbs = f"{install_root}/databases"
        f.db(
            f"{dbs}/wa.db",
            ["CREATE TABLE wa_contacts (_id INTEGER PRIMARY KEY, display_name TEXT, number TEXT, jid TEXT)"],
            [("INSERT INTO wa_contacts VALUES (?,?,?,?)", contact_rows)],
        )
        f.db(
            f"{dbs}/msgstore.db",
            [
                "CREATE TABLE messages (_id INTEGER PRIMARY KEY, key_remote_jid TEXT, key_from_me INTEGER,"
                " data TEXT, timestamp INTEGER, media_name TEXT, media_size INTEGER)",
            ],
            [
                (
                    "INSERT INTO messages VALUES (?,?,?,?,?,?,?)",
                    [
                        (m["pk"], m["jid"], int(m["outgoing"]), m["body"], m["ts"],
                         m["media"][1] if m["media"] else None, m["media"][2] if m["media"] else None)
                        for m in messages
                    ],
                )
            ],
        )
        (f.image / media_root / "Media").mkdir(parents=True, exist_ok=True)
    return out


_WRITERS = {
    AppId.SKYPE: _forge_skype,
    AppId.VIBER: _forge_viber,
    AppId.TANGO: _forge_tango,
    AppId.WHATSAPP: _forge_whatsapp,
}


# public API ----------------------------------------------------------------


def _tree_digests(image: Path) -> dict[str, str]:
    out = {}
    for full in walk_files(image):
        out[full.relative_to(image).as_posix()] = hashlib.sha256(full.read_bytes()).hexdigest()
    return out


def forge_device(spec: FixtureSpec, out: str | Path) -> FixtureManifest:
    """Write ``out/image`` and ``out/manifest.json`` for ``spec``."""
    out = Path(out)
    if out.exists() and (not out.is_dir() or any(out.iterdir())):
        raise OutputNotEmpty(f"output directory is not empty: {out}")
    image = out / IMAGE_DIR
    image.mkdir(parents=True)
    forge = _Forge(spec, image)
    if spec.os is OsKind.IOS:
        (image / "var/mobile/Applications").mkdir(parents=True)
    else:
        (image / "data/data").mkdir(parents=True)
        (image / "mnt/sdcard").mkdir(parents=True)
    records: dict[AppId, tuple[ArtifactRecord, ...]] = {}
    for app in spec.materialized_apps():
        records[app] = tuple(_WRITERS[app](forge, spec.apps[app]))
    manifest = FixtureManifest(spec=spec, files=_tree_digests(image), records=records)
    (out / MANIFEST_NAME).write_bytes(manifest.dumps())
    return manifest


def verify_fixture(tree: str | Path, manifest: FixtureManifest | str | Path) -> list[str]:
    """Discrepancies between an image tree and its manifest; empty when intact."""
    if not isinstance(manifest, FixtureManifest):
        manifest = FixtureManifest.load(manifest)
    tree = Path(tree)
    found = _tree_digests(tree) if tree.is_dir() else {}
    problems = []
    for rel, digest in sorted(manifest.files.items()):
        if rel not in found:
            problems.append(f"missing file: {rel}")
        elif found[rel] != digest:
            problems.append(f"digest mismatch: {rel}")
    for rel in sorted(set(found) - set(manifest.files)):
        problems.append(f"unexpected file: {rel}")
    return problems


def fixture_paths(out: str | Path) -> tuple[Path, Path]:
    """(image tree, manifest path) inside a forge output directory."""
    out = Path(out)
    return out / IMAGE_DIR, out / MANIFEST_NAME


__all__ = [
    "AppCounts",
    "FixtureManifest",
    "FixtureSpec",
    "OutputNotEmpty",
    "canonical_spec",
    "fixture_paths",
    "forge_device",
    "verify_fixture",
]

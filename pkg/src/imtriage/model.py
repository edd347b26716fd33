"""Artifact taxonomy, normalized evidence records and provenance anchors.

Every record type is a frozen dataclass. Records carry a :class:`SourceAnchor`
pointing back at the exact bytes they were read from; ground-truth records
produced by the fixture forge leave ``anchor`` unset.
"""

from __future__ import annotations

import dataclasses
import enum
import re
from dataclasses import dataclass
from pathlib import Path, PurePosixPath
from typing import Any, Union


class StrEnum(str, enum.Enum):
    def __str__(self) -> str:
        return self.value


class AppId(StrEnum):
    SKYPE = "skype"
    VIBER = "viber"
    TANGO = "tango"
    WHATSAPP = "whatsapp"


class OsKind(StrEnum):
    IOS = "ios"
    ANDROID = "android"
    UNKNOWN = "unknown"


class TaxonomyCategory(StrEnum):
    INSTALLATION = "InstallationData"
    TRAFFIC = "TrafficData"
    CONTENT = "ContentData"
    USER_PROFILE = "UserProfileData"
    USER_AUTHENTICATION = "UserAuthenticationData"
    CONTACT_DATABASE = "ContactDatabase"
    ATTACHMENT = "AttachmentFile"
    LOCATION = "LocationData"


class StoreKind(StrEnum):
    SQLITE = "sqlite"
    PLIST = "plist"
    MEDIA = "media"
    DIRECTORY = "directory"


class Direction(StrEnum):
    INCOMING = "incoming"
    OUTGOING = "outgoing"
    MISSED = "missed"
    UNKNOWN = "unknown"


class BodyState(StrEnum):
    CLEARTEXT = "cleartext"
    OPAQUE = "opaque"
    ABSENT = "absent"


class CallKind(StrEnum):
    AUDIO = "audio"
    VIDEO = "video"
    VOICEMAIL = "voicemail"


class MediaKind(StrEnum):
    IMAGE = "image"
    VIDEO = "video"
    AUDIO = "audio"
    STICKER = "sticker"
    FILE = "file"
    UNKNOWN = "unknown"


class TokenKind(StrEnum):
    PASSWORD = "password"
    SESSION_KEY = "session_key"
    COOKIE = "cookie"
    UNKNOWN = "unknown"


class ValueState(StrEnum):
    CLEARTEXT = "cleartext"
    OPAQUE = "opaque"


_LOCATOR_RE = re.compile(r"^(table=[^;]+;rowid=-?\d+|keypath=.+)$")
_E164_RE = re.compile(r"^\+[1-9]\d{1,14}$")


@dataclass(frozen=True)
class SourceAnchor:
    image_relative_path: str
    file_digest: bytes
    store_kind: StoreKind
    locator: str | None = None

    @classmethod
    def row(cls, path: str, digest: bytes, table: str, rowid: int) -> SourceAnchor:
        return cls(path, digest, StoreKind.SQLITE, f"table={table};rowid={rowid}")

    @classmethod
    def keypath(cls, path: str, digest: bytes, keypath: str) -> SourceAnchor:
        return cls(path, digest, StoreKind.PLIST, f"keypath={keypath}")

    @classmethod
    def media(cls, path: str, digest: bytes) -> SourceAnchor:
        return cls(path, digest, StoreKind.MEDIA)


@dataclass(frozen=True, kw_only=True)
class MessageRecord:
    app: AppId
    message_id: str
    direction: Direction
    conversation_id: str
    peer_id: str
    timestamp_utc_ms: int | None
    body: str | None = None
    body_state: BodyState = BodyState.ABSENT
    attachment_refs: tuple[str, ...] = ()
    location_ref: str | None = None
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class CallRecord:
    app: AppId
    direction: Direction
    peer_id: str
    start_utc_ms: int
    duration_s: int
    kind: CallKind
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class ContactRecord:
    app: AppId
    contact_key: str
    display_name: str | None = None
    phone_numbers: tuple[str, ...] = ()
    # numbers kept verbatim because no country code could be derived
    raw_phone_numbers: tuple[str, ...] = ()
    avatar_ref: str | None = None
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class UserProfileRecord:
    app: AppId
    account_id: str
    display_name: str | None = None
    phone: str | None = None
    raw_phone: str | None = None
    avatar_ref: str | None = None
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class AttachmentRecord:
    app: AppId
    attachment_id: str
    media_kind: MediaKind
    media_path: str | None = None
    size_bytes: int | None = None
    linked_message: str | None = None
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class LocationFix:
    app: AppId
    location_id: str
    latitude_deg: float
    longitude_deg: float
    linked_message: str
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class InstallationRecord:
    app: AppId
    os: OsKind
    install_root: str
    version_hint: str | None = None
    anchor: SourceAnchor | None = None


@dataclass(frozen=True, kw_only=True)
class AuthTokenRecord:
    app: AppId
    token_kind: TokenKind
    value_state: ValueState
    value: str | None = None
    anchor: SourceAnchor | None = None


ArtifactRecord = Union[
    MessageRecord,
    CallRecord,
    ContactRecord,
    UserProfileRecord,
    AttachmentRecord,
    LocationFix,
    InstallationRecord,
    AuthTokenRecord,
]

_CATEGORY = {
    MessageRecord: TaxonomyCategory.CONTENT,
    CallRecord: TaxonomyCategory.TRAFFIC,
    ContactRecord: TaxonomyCategory.CONTACT_DATABASE,
    UserProfileRecord: TaxonomyCategory.USER_PROFILE,
    AttachmentRecord: TaxonomyCategory.ATTACHMENT,
    LocationFix: TaxonomyCategory.LOCATION,
    InstallationRecord: TaxonomyCategory.INSTALLATION,
    AuthTokenRecord: TaxonomyCategory.USER_AUTHENTICATION,
}

RECORD_TYPES: dict[str, type] = {cls.__name__: cls for cls in _CATEGORY}


def category_of(record: ArtifactRecord) -> TaxonomyCategory:
    """Map a record to its taxonomy category.

    Message history metadata also feeds the traffic row of the
    recoverability matrix; that is decided in ``reportgen``, not here.
    """
    return _CATEGORY[type(record)]


def is_safe_relative_path(path: str) -> bool:
    if not path or path.startswith(("/", "\\")):
        return False
    return ".." not in PurePosixPath(path).parts


def validate(record: ArtifactRecord, image_root: Any = None) -> list[str]:
    """Return a description of every invariant the record violates.

    With ``image_root`` given, paths the record claims exist in the image
    (media paths, install roots) are checked against the file system too.
    """
    problems: list[str] = []
    anchor = record.anchor
    if anchor is None:
        problems.append("anchor missing")
    else:
        if not is_safe_relative_path(anchor.image_relative_path):
            problems.append("anchor path must be image-relative without '..'")
        if len(anchor.file_digest) != 32:
            problems.append("anchor digest must be 32 bytes")
        if anchor.locator is not None and not _LOCATOR_RE.match(anchor.locator):
            problems.append("malformed anchor locator")

    if isinstance(record, MessageRecord):
        if record.body_state is BodyState.OPAQUE and record.body is not None:
            problems.append("opaque body must be absent")
        if record.body_state is BodyState.ABSENT and record.body is not None:
            problems.append("absent body must not carry text")
        if record.timestamp_utc_ms is not None and record.timestamp_utc_ms < 0:
            problems.append("timestamp before 1970")
    elif isinstance(record, CallRecord):
        if record.duration_s < 0:
            problems.append("negative call duration")
        if record.start_utc_ms < 0:
            problems.append("timestamp before 1970")
    elif isinstance(record, ContactRecord):
        if not (record.display_name or record.phone_numbers or record.contact_key):
            problems.append("contact has no identifying field")
        problems.extend(
            f"phone number not E.164: {n}" for n in record.phone_numbers if not _E164_RE.match(n)
        )
    elif isinstance(record, UserProfileRecord):
        if not record.account_id:
            problems.append("account_id empty")
        if record.phone is not None and not _E164_RE.match(record.phone):
            problems.append(f"phone number not E.164: {record.phone}")
    elif isinstance(record, AttachmentRecord):
        if record.size_bytes is not None and record.size_bytes < 0:
            problems.append("negative attachment size")
        if record.media_path is not None:
            if not is_safe_relative_path(record.media_path):
                problems.append("media path must be image-relative without '..'")
            elif image_root is not None and not (Path(image_root) / record.media_path).is_file():
                problems.append("media path does not resolve in image")
    elif isinstance(record, LocationFix):
        if not -90.0 <= record.latitude_deg <= 90.0:
            problems.append("latitude out of range")
        if not -180.0 <= record.longitude_deg <= 180.0:
            problems.append("longitude out of range")
    elif isinstance(record, InstallationRecord):
        if not is_safe_relative_path(record.install_root):
            problems.append("install root must be image-relative without '..'")
        elif image_root is not None and not (Path(image_root) / record.install_root).is_dir():
            problems.append("install root does not exist in image")
    elif isinstance(record, AuthTokenRecord):
        if record.value is not None and record.value_state is not ValueState.CLEARTEXT:
            problems.append("opaque token must not carry a value")
    return problems


def normalize_phone(raw: str, *, international: bool = False) -> tuple[str | None, str | None]:
    """Split a stored phone number into ``(e164, verbatim)``.

    Exactly one side is set. A country code is derivable when the number
    carries a ``+`` or ``00`` prefix, or when the caller knows the digits are
    already international (WhatsApp JIDs).
    """
    text = raw.strip()
    digits = re.sub(r"[\s().\-/]", "", text)
    if digits.startswith("+"):
        body = digits[1:]
    elif digits.startswith("00"):
        body = digits[2:]
    elif international:
        body = digits
    else:
        return None, raw
    candidate = "+" + body
    if _E164_RE.match(candidate):
        return candidate, None
    return None, raw


def split_phones(values, *, international: bool = False) -> tuple[tuple[str, ...], tuple[str, ...]]:
    e164: list[str] = []
    verbatim: list[str] = []
    for value in values:
        norm, raw = normalize_phone(value, international=international)
        if norm is not None:
            e164.append(norm)
        else:
            verbatim.append(raw)
    return tuple(e164), tuple(verbatim)


# serialization ------------------------------------------------------------


def anchor_to_dict(anchor: SourceAnchor) -> dict[str, Any]:
    return {
        "path": anchor.image_relative_path,
        "sha256": anchor.file_digest.hex(),
        "store_kind": anchor.store_kind.value,
        "locator": anchor.locator,
    }


def anchor_from_dict(data: dict[str, Any]) -> SourceAnchor:
    return SourceAnchor(
        image_relative_path=data["path"],
        file_digest=bytes.fromhex(data["sha256"]),
        store_kind=StoreKind(data["store_kind"]),
        locator=data.get("locator"),
    )


def record_to_dict(record: ArtifactRecord, *, with_anchor: bool = True) -> dict[str, Any]:
    out: dict[str, Any] = {"type": type(record).__name__}
    for f in dataclasses.fields(record):
        value = getattr(record, f.name)
        if f.name == "anchor":
            if with_anchor:
                out["anchor"] = None if value is None else anchor_to_dict(value)
            continue
        if isinstance(value, enum.Enum):
            value = value.value
        elif isinstance(value, tuple):
            value = list(value)
        out[f.name] = value
    return out


def record_from_dict(data: dict[str, Any]) -> ArtifactRecord:
    cls = RECORD_TYPES[data["type"]]
    kwargs: dict[str, Any] = {}
    for f in dataclasses.fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if f.name == "anchor":
            value = None if value is None else anchor_from_dict(value)
        elif isinstance(value, list):
            value = tuple(value)
        else:
            enum_cls = _ENUM_FIELDS.get((cls, f.name))
            if enum_cls is not None and value is not None:
                value = enum_cls(value)
        kwargs[f.name] = value
    return cls(**kwargs)


_ENUM_FIELDS: dict[tuple[type, str], type] = {}
for _cls in RECORD_TYPES.values():
    _ENUM_FIELDS[(_cls, "app")] = AppId
_ENUM_FIELDS.update(
    {
        (MessageRecord, "direction"): Direction,
        (MessageRecord, "body_state"): BodyState,
        (CallRecord, "direction"): Direction,
        (CallRecord, "kind"): CallKind,
        (AttachmentRecord, "media_kind"): MediaKind,
        (InstallationRecord, "os"): OsKind,
        (AuthTokenRecord, "token_kind"): TokenKind,
        (AuthTokenRecord, "value_state"): ValueState,
    }
)


def record_sort_key(record: ArtifactRecord) -> tuple:
    anchor = record.anchor
    return (
        record.app.value,
        category_of(record).value,
        type(record).__name__,
        anchor.image_relative_path if anchor else "",
        anchor.locator or "" if anchor else "",
        repr(record_to_dict(record)),
    )


def strip_anchor(record: ArtifactRecord) -> ArtifactRecord:
    return dataclasses.replace(record, anchor=None)


__all__ = [
    "AppId",
    "ArtifactRecord",
    "AttachmentRecord",
    "AuthTokenRecord",
    "BodyState",
    "CallKind",
    "CallRecord",
    "ContactRecord",
    "Direction",
    "InstallationRecord",
    "LocationFix",
    "MediaKind",
    "MessageRecord",
    "OsKind",
    "SourceAnchor",
    "StoreKind",
    "TaxonomyCategory",
    "TokenKind",
    "UserProfileRecord",
    "ValueState",
    "category_of",
    "normalize_phone",
    "record_from_dict",
    "record_to_dict",
    "split_phones",
    "validate",
]

"""Case report assembly: merge per-app results, build the timeline and the
recoverability matrix, and serialize deterministically."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Any, Iterable, Mapping

from . import __version__
from .extractors.base import AppResult
from .model import (
    AppId,
    ArtifactRecord,
    AttachmentRecord,
    AuthTokenRecord,
    BodyState,
    CallRecord,
    ContactRecord,
    InstallationRecord,
    LocationFix,
    MessageRecord,
    OsKind,
    SourceAnchor,
    TaxonomyCategory,
    UserProfileRecord,
    anchor_to_dict,
    category_of,
    record_sort_key,
    record_to_dict,
)

TOOL_NAME = "imtriage"
FORMATS = ("json", "csv", "timeline")

REPORT_JSON = "report.json"
TIMELINE_TXT = "timeline.txt"


class DuplicateApp(ValueError):
    pass


@dataclass(frozen=True)
class TimelineEvent:
    timestamp_utc_ms: int
    app: AppId
    category: TaxonomyCategory
    summary: str
    anchor: SourceAnchor | None

    def sort_key(self) -> tuple:
        anchor = self.anchor
        return (
            self.timestamp_utc_ms,
            self.app.value,
            self.category.value,
            anchor.image_relative_path if anchor else "",
            (anchor.locator or "") if anchor else "",
            self.summary,
        )


@dataclass(frozen=True)
class CaseReport:
    records: tuple[ArtifactRecord, ...] = ()
    warnings: tuple[tuple[str, str], ...] = ()
    errors: tuple[tuple[str, str, str], ...] = ()
    stores_examined: tuple[tuple[str, str, str], ...] = ()
    apps: tuple[AppId, ...] = ()
    image_os: OsKind = OsKind.UNKNOWN
    file_count: int = 0
    tool: str = TOOL_NAME
    version: str = __version__

    def counts(self) -> dict[str, int]:
        out = {c.value: 0 for c in TaxonomyCategory}
        for record in self.records:
            out[category_of(record).value] += 1
        return out

    def app_counts(self) -> dict[str, dict[str, int]]:
        out: dict[str, dict[str, int]] = {}
        for app in self.apps:
            out[app.value] = {c.value: 0 for c in TaxonomyCategory}
        for record in self.records:
            out.setdefault(record.app.value, {c.value: 0 for c in TaxonomyCategory})
            out[record.app.value][category_of(record).value] += 1
        return dict(sorted(out.items()))

    def records_for(self, app: AppId) -> list[ArtifactRecord]:
        return [r for r in self.records if r.app is app]


def combine(results: Iterable[AppResult]) -> list[AppResult]:
    """Fold several results of the same (app, os), e.g. two Skype user
    folders in separate containers, into one result each."""
    grouped: dict[tuple[AppId, OsKind], AppResult] = {}
    for result in results:
        key = (result.app, result.os)
        target = grouped.get(key)
        if target is None:
            grouped[key] = AppResult(
                result.app,
                result.os,
                list(result.records),
                list(result.warnings),
                list(result.errors),
                list(result.stores_examined),
            )
            continue
        target.records.extend(result.records)
        target.warnings.extend(result.warnings)
        target.errors.extend(result.errors)
        target.stores_examined = sorted(set(target.stores_examined) | set(result.stores_examined))
    return [grouped[k] for k in sorted(grouped, key=lambda k: (k[0].value, k[1].value))]


def merge(
    results: Iterable[AppResult],
    *,
    image_os: OsKind = OsKind.UNKNOWN,
    file_count: int = 0,
    image_warnings: Iterable[str] = (),
) -> CaseReport:
    """Merge per-app results into one report; input order does not matter."""
    results = list(results)
    seen: set[tuple[AppId, OsKind]] = set()
    for result in results:
        key = (result.app, result.os)
        if key in seen:
            raise DuplicateApp(f"more than one result for {result.app.value} on {result.os.value}")
        seen.add(key)
    records = sorted((r for res in results for r in res.records), key=record_sort_key)
    warnings = [("", w) for w in image_warnings]
    warnings += [(res.app.value, w) for res in results for w in res.warnings]
    errors = [(res.app.value, path, reason) for res in results for path, reason in res.errors]
    stores = {(res.app.value, path, digest) for res in results for path, digest in res.stores_examined}
    return CaseReport(
        records=tuple(records),
        warnings=tuple(sorted(warnings)),
        errors=tuple(sorted(errors)),
        stores_examined=tuple(sorted(stores)),
        apps=tuple(sorted({res.app for res in results}, key=lambda a: a.value)),
        image_os=OsKind(image_os),
        file_count=file_count,
    )


# timeline ------------------------------------------------------------------

_TIMED = (MessageRecord, CallRecord, LocationFix)


def _clean(text: str, limit: int = 80) -> str:
    flat = " ".join(text.split())
    return flat if len(flat) <= limit else flat[: limit - 3] + "..."


def _message_summary(m: MessageRecord) -> str:
    who = {"incoming": "from", "outgoing": "to"}.get(m.direction.value, "with")
    head = f"{m.direction.value} message {who} {m.peer_id or '?'}"
    if m.body_state is BodyState.CLEARTEXT and m.body:
        return f"{head}: {_clean(m.body)}"
    return f"{head} [{m.body_state.value}]"


def build_timeline_with_excluded(report: CaseReport) -> tuple[list[TimelineEvent], int]:
    """Events for messages, calls and located fixes, plus how many timed
    records had no usable timestamp."""
    message_times = {
        (r.app, r.message_id): r.timestamp_utc_ms for r in report.records if isinstance(r, MessageRecord)
    }
    events: list[TimelineEvent] = []
    excluded = 0
    for record in report.records:
        if not isinstance(record, _TIMED):
            continue
        if isinstance(record, MessageRecord):
            ts, summary = record.timestamp_utc_ms, _message_summary(record)
        elif isinstance(record, CallRecord):
            ts = record.start_utc_ms
            summary = f"{record.direction.value} {record.kind.value} call with {record.peer_id or '?'}, {record.duration_s}s"
        else:
            ts = message_times.get((record.app, record.linked_message))
            summary = f"location {record.latitude_deg!r},{record.longitude_deg!r} ({record.linked_message})"
        if ts is None:
            excluded += 1
            continue
        events.append(TimelineEvent(ts, record.app, category_of(record), summary, record.anchor))
    events.sort(key=TimelineEvent.sort_key)
    return events, excluded


def build_timeline(report: CaseReport) -> list[TimelineEvent]:
    return build_timeline_with_excluded(report)[0]


def iso_utc(ms: int) -> str:
    moment = datetime(1970, 1, 1, tzinfo=timezone.utc) + timedelta(milliseconds=ms)
    return moment.strftime("%Y-%m-%dT%H:%M:%S.") + f"{ms % 1000:03d}Z"


# recoverability matrix -----------------------------------------------------

NONE = "none"
UNKNOWN = "unknown"

CONTENT_TOKENS = ("text", "image", "video", "audio", "sticker", "file")


@dataclass(frozen=True)
class RecoverabilityMatrix:
    """Per (app, category) set of recovered artifact tokens; empty means none."""

    cells: Mapping[tuple[AppId, TaxonomyCategory], frozenset[str]] = field(default_factory=dict)

    def get(self, app: AppId, category: TaxonomyCategory) -> frozenset[str]:
        return self.cells.get((app, category), frozenset())

    def to_dict(self) -> dict[str, dict[str, Any]]:
        out: dict[str, dict[str, Any]] = {}
        for app in AppId:
            out[app.value] = {}
            for category in TaxonomyCategory:
                tokens = self.get(app, category)
                out[app.value][category.value] = sorted(tokens) if tokens else NONE
        return out


def build_matrix(report: CaseReport) -> RecoverabilityMatrix:
    cells: dict[tuple[AppId, TaxonomyCategory], set[str]] = {}

    def add(app: AppId, category: TaxonomyCategory, token: str) -> None:
        cells.setdefault((app, category), set()).add(token)

    avatars = {
        (r.app, r.avatar_ref)
        for r in report.records
        if isinstance(r, (ContactRecord, UserProfileRecord)) and r.avatar_ref
    }
    for r in report.records:
        if isinstance(r, InstallationRecord):
            add(r.app, TaxonomyCategory.INSTALLATION, "installed")
        elif isinstance(r, MessageRecord):
            # history metadata needs something a reader can place: a time or a peer
            if r.timestamp_utc_ms is not None or r.peer_id:
                add(r.app, TaxonomyCategory.TRAFFIC, "chats")
            if r.body_state is BodyState.CLEARTEXT and r.body:
                add(r.app, TaxonomyCategory.CONTENT, "text")
        elif isinstance(r, CallRecord):
            add(r.app, TaxonomyCategory.TRAFFIC, "calls")
        elif isinstance(r, AttachmentRecord):
            add(r.app, TaxonomyCategory.ATTACHMENT, r.media_kind.value)
            if (r.app, r.attachment_id) not in avatars:
                add(r.app, TaxonomyCategory.CONTENT, r.media_kind.value)
        elif isinstance(r, UserProfileRecord):
            add(r.app, TaxonomyCategory.USER_PROFILE, "profile")
        elif isinstance(r, ContactRecord):
            add(r.app, TaxonomyCategory.CONTACT_DATABASE, "contacts")
        elif isinstance(r, LocationFix):
            add(r.app, TaxonomyCategory.LOCATION, "location")
        elif isinstance(r, AuthTokenRecord):
            add(r.app, TaxonomyCategory.USER_AUTHENTICATION, "credentials")
    return RecoverabilityMatrix({k: frozenset(v) for k, v in cells.items()})


@dataclass(frozen=True)
class ReferenceCell:
    """A published finding. ``exact`` cells must match exactly; the rest
    must be contained in the computed cell."""

    tokens: frozenset[str] = frozenset()
    exact: bool = False
    not_applicable: bool = False


def _cell(*tokens: str, exact: bool = False) -> ReferenceCell:
    return ReferenceCell(frozenset(tokens), exact)


_NOT_FOUND = _cell()  # "No": nothing to require
# app data not visible at all under this acquisition
_NA = ReferenceCell(frozenset(), exact=True, not_applicable=True)

_S, _V, _T, _W = AppId.SKYPE, AppId.VIBER, AppId.TANGO, AppId.WHATSAPP
_INST = TaxonomyCategory.INSTALLATION
_TRAF = TaxonomyCategory.TRAFFIC
_CONT = TaxonomyCategory.CONTENT
_PROF = TaxonomyCategory.USER_PROFILE
_BOOK = TaxonomyCategory.CONTACT_DATABASE

# Automated analyzer output for the iOS handset, file-system acquisition.
# Cells not listed were left blank (no finding reported) and are not checked.
IOS_FILESYSTEM_REFERENCE: Mapping[tuple[AppId, TaxonomyCategory], ReferenceCell] = {
    (_S, _INST): _cell("installed"),
    (_V, _INST): _cell("installed"),
    (_T, _INST): _cell("installed"),
    (_W, _INST): _cell("installed"),
    (_S, _TRAF): _cell("calls", "chats"),
    (_V, _TRAF): _cell("calls", "chats"),
    (_T, _TRAF): _cell(exact=True),  # "No": message metadata is encrypted
    (_W, _TRAF): _cell("chats"),
    (_S, _CONT): _cell("text", "image"),
    (_V, _CONT): _cell("text", "image"),
    (_T, _CONT): _cell("image", exact=True),  # only the cleartext media cache
    (_W, _CONT): _cell("text", "image"),
    (_S, _PROF): _cell("profile"),
    (_V, _PROF): _NOT_FOUND,
    (_T, _PROF): _cell("profile"),
    (_W, _PROF): _NOT_FOUND,
    (_S, _BOOK): _cell("contacts"),
    (_V, _BOOK): _NOT_FOUND,
    (_W, _BOOK): _NOT_FOUND,
}

# Automated analyzer output for the Android handset, logical acquisition.
# There is no installation row, so installation is unknown for every app.
ANDROID_LOGICAL_REFERENCE: Mapping[tuple[AppId, TaxonomyCategory], ReferenceCell] = {
    (_S, _TRAF): _cell("calls", "chats"),
    (_V, _TRAF): _NA,
    (_T, _TRAF): _NA,
    (_W, _TRAF): _cell("chats"),
    (_S, _CONT): _cell("text", "image", "video"),
    (_V, _CONT): _NA,
    (_T, _CONT): _NA,
    (_W, _CONT): _cell("text", "image"),
    (_S, _PROF): _cell("profile"),
    (_V, _PROF): _NA,
    (_T, _PROF): _NA,
    (_W, _PROF): _NOT_FOUND,
    (_S, _BOOK): _cell("contacts"),
    (_V, _BOOK): _NA,
    (_T, _BOOK): _NA,
    (_W, _BOOK): _NOT_FOUND,
}

REFERENCES: Mapping[tuple[OsKind, str], Mapping[tuple[AppId, TaxonomyCategory], ReferenceCell]] = {
    (OsKind.IOS, "filesystem"): IOS_FILESYSTEM_REFERENCE,
    (OsKind.ANDROID, "logical"): ANDROID_LOGICAL_REFERENCE,
}


def reference_finding(
    reference: Mapping[tuple[AppId, TaxonomyCategory], ReferenceCell], app: AppId, category: TaxonomyCategory
) -> str | list[str]:
    cell = reference.get((app, category))
    if cell is None:
        return UNKNOWN
    if cell.not_applicable:
        return "n/a"
    if not cell.tokens:
        return "none (exact)" if cell.exact else NONE
    return sorted(cell.tokens) + (["(exact)"] if cell.exact else [])


def compare_matrix(
    computed: RecoverabilityMatrix, reference: Mapping[tuple[AppId, TaxonomyCategory], ReferenceCell]
) -> list[str]:
    """Cells where the computed matrix fails the reference; empty when it
    holds (superset everywhere, equality on exact cells)."""
    problems = []
    for (app, category), cell in sorted(reference.items(), key=lambda kv: (kv[0][0].value, kv[0][1].value)):
        got = computed.get(app, category)
        if cell.exact and got != cell.tokens:
            problems.append(
                f"{app.value}/{category.value}: expected exactly {sorted(cell.tokens) or NONE}, got {sorted(got) or NONE}"
            )
        elif not cell.exact and not cell.tokens <= got:
            problems.append(
                f"{app.value}/{category.value}: missing {sorted(cell.tokens - got)} (got {sorted(got) or NONE})"
            )
    return problems


# serialization -------------------------------------------------------------


def _dumps(data: Any) -> bytes:
    return (json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


def report_document(report: CaseReport) -> dict[str, Any]:
    events, excluded = build_timeline_with_excluded(report)
    return {
        "meta": {
            "tool": report.tool,
            "version": report.version,
            "os": report.image_os.value,
            "file_count": report.file_count,
            "apps": [a.value for a in report.apps],
            "counts": report.counts(),
            "app_counts": report.app_counts(),
            "timeline_excluded": excluded,
            "warnings": [{"app": app, "message": message} for app, message in report.warnings],
            "stores_examined": [
                {"app": app, "path": path, "sha256": digest} for app, path, digest in report.stores_examined
            ],
        },
        "records": [record_to_dict(r) for r in report.records],
        "matrix": build_matrix(report).to_dict(),
        "timeline": [
            {
                "timestamp_utc_ms": e.timestamp_utc_ms,
                "time": iso_utc(e.timestamp_utc_ms),
                "app": e.app.value,
                "category": e.category.value,
                "summary": e.summary,
                "anchor": None if e.anchor is None else anchor_to_dict(e.anchor),
            }
            for e in events
        ],
        "errors": [{"app": app, "path": path, "reason": reason} for app, path, reason in report.errors],
    }


_CATEGORY_TYPE = {
    TaxonomyCategory.CONTENT: MessageRecord,
    TaxonomyCategory.TRAFFIC: CallRecord,
    TaxonomyCategory.CONTACT_DATABASE: ContactRecord,
    TaxonomyCategory.USER_PROFILE: UserProfileRecord,
    TaxonomyCategory.ATTACHMENT: AttachmentRecord,
    TaxonomyCategory.LOCATION: LocationFix,
    TaxonomyCategory.INSTALLATION: InstallationRecord,
    TaxonomyCategory.USER_AUTHENTICATION: AuthTokenRecord,
}

_ANCHOR_COLUMNS = ("anchor_path", "anchor_sha256", "anchor_store_kind", "anchor_locator")


def _csv_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, list):
        return ";".join(str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _category_csv(report: CaseReport, category: TaxonomyCategory) -> bytes:
    fields = [f.name for f in dataclasses.fields(_CATEGORY_TYPE[category]) if f.name != "anchor"]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields + list(_ANCHOR_COLUMNS))
    for record in report.records:
        if category_of(record) is not category:
            continue
        data = record_to_dict(record)
        anchor = data.get("anchor") or {}
        writer.writerow(
            [_csv_value(data[name]) for name in fields]
            + [_csv_value(anchor.get(k)) for k in ("path", "sha256", "store_kind", "locator")]
        )
    return buf.getvalue().encode("utf-8")


def _timeline_text(report: CaseReport) -> bytes:
    lines = [
        f"{iso_utc(e.timestamp_utc_ms)}\t{e.app.value}\t{e.category.value}\t{_clean(e.summary, 10_000)}\n"
        for e in build_timeline(report)
    ]
    return "".join(lines).encode("utf-8")


def serialize(report: CaseReport, fmt: str) -> dict[str, bytes]:
    """Render ``report`` as named output files.

    ``json`` gives ``report.json``; ``timeline`` gives ``timeline.txt``;
    ``csv`` gives one ``<Category>.csv`` per taxonomy category.
    """
    if fmt == "json":
        return {REPORT_JSON: _dumps(report_document(report))}
    if fmt == "timeline":
        return {TIMELINE_TXT: _timeline_text(report)}
    if fmt == "csv":
        return {f"{c.value}.csv": _category_csv(report, c) for c in TaxonomyCategory}
    raise ValueError(f"unknown format {fmt!r}; expected one of {FORMATS}")


__all__ = [
    "ANDROID_LOGICAL_REFERENCE",
    "CaseReport",
    "DuplicateApp",
    "IOS_FILESYSTEM_REFERENCE",
    "REFERENCES",
    "RecoverabilityMatrix",
    "ReferenceCell",
    "TimelineEvent",
    "build_matrix",
    "build_timeline",
    "build_timeline_with_excluded",
    "combine",
    "compare_matrix",
    "merge",
    "serialize",
]

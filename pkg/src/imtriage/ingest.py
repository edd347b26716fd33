"""Image classification, per-app data home discovery and file hashing."""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass
from pathlib import Path, PurePosixPath

from .model import AppId, OsKind

log = logging.getLogger(__name__)

_CHUNK = 1 << 20

IOS_APP_PARENTS = ("var/mobile/Applications", "private/var/mobile/Applications")
ANDROID_DATA = "data/data"
SDCARD_PREFIXES = ("mnt/sdcard", "sdcard")

ANDROID_PACKAGES = {
    "com.skype.raider": AppId.SKYPE,
    "com.viber.voip": AppId.VIBER,
    "com.whatsapp": AppId.WHATSAPP,
}

SDCARD_COMPANIONS = {
    AppId.SKYPE: ("Android/data/com.skype.raider/cache",),
    AppId.VIBER: ("viber",),
    AppId.WHATSAPP: ("WhatsApp",),
    AppId.TANGO: (),
}

# store role -> final path component, matched case-insensitively
STORE_NAMES: dict[AppId, dict[str, str]] = {
    AppId.SKYPE: {"main_db": "main.db", "embedded_db": "main.db.EMBEDDED"},
    AppId.VIBER: {
        "contacts_data": "Contacts.data",
        "viber_messages": "viber_messages",
        "viber_data": "viber_data",
    },
    AppId.TANGO: {"tc_db": "tc.db", "tango_cache_db": "TangoCache.db"},
    AppId.WHATSAPP: {
        "chat_storage": "ChatStorage.sqlite",
        "contacts_sqlite": "Contacts.sqlite",
        "msgstore_db": "msgstore.db",
        "wa_db": "wa.db",
    },
}

SIDECAR_SUFFIXES = ("-wal", "-journal", "-shm")


class UnreadableRoot(OSError):
    pass


class FileUnreadable(OSError):
    pass


@dataclass(frozen=True)
class ImageRoot:
    root_path: Path
    os: OsKind
    file_count: int
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class AppHome:
    app: AppId
    os: OsKind
    roots: tuple[str, ...]
    stores: tuple[tuple[str, str], ...]
    hidden: bool = False
    install_root: str = ""
    matched_pattern: str = ""

    def store(self, role: str) -> str | None:
        for r, path in self.stores:
            if r == role:
                return path
        return None

    def all_stores(self, role: str) -> list[str]:
        return [path for r, path in self.stores if r == role]


def hash_file(path: str | Path, root: str | Path | None = None) -> bytes:
    """SHA-256 of the file's bytes (32-byte digest)."""
    full = Path(root) / path if root is not None else Path(path)
    digest = hashlib.sha256()
    try:
        with open(full, "rb") as fh:
            for chunk in iter(lambda: fh.read(_CHUNK), b""):
                digest.update(chunk)
    except OSError as exc:
        raise FileUnreadable(str(path)) from exc
    return digest.digest()


def _child_ci(parent: Path, name: str) -> Path | None:
    """Find a child of ``parent`` whose name matches ``name`` ignoring case."""
    exact = parent / name
    if exact.exists():
        return exact
    try:
        entries = sorted(os.listdir(parent))
    except OSError:
        return None
    for entry in entries:
        if entry.lower() == name.lower():
            return parent / entry
    return None


def _resolve_ci(root: Path, relpath: str) -> Path | None:
    node = root
    for part in PurePosixPath(relpath).parts:
        node = _child_ci(node, part)
        if node is None:
            return None
    return node


def _rel(root: Path, path: Path) -> str:
    return path.relative_to(root).as_posix()


def walk_files(top: Path):
    """Yield every regular file under ``top`` in a deterministic order."""
    for dirpath, dirnames, filenames in os.walk(top):
        dirnames.sort()
        for name in sorted(filenames):
            full = Path(dirpath) / name
            if full.is_file():
                yield full


def classify_image(root: str | Path) -> ImageRoot:
    root = Path(root)
    if not root.is_dir() or not os.access(root, os.R_OK | os.X_OK):
        raise UnreadableRoot(f"cannot traverse {root}")
    try:
        file_count = sum(1 for _ in walk_files(root))
    except OSError as exc:
        raise UnreadableRoot(f"cannot traverse {root}: {exc}") from exc
    android = _resolve_ci(root, ANDROID_DATA)
    android = android is not None and android.is_dir()
    ios = False
    for parent in IOS_APP_PARENTS:
        found = _resolve_ci(root, parent)
        if found is not None and found.is_dir():
            ios = True
    warnings: list[str] = []
    if android and ios:
        message = "both Android and iOS markers present; classified as android"
        log.warning(message)
        warnings.append(message)
    os_kind = OsKind.ANDROID if android else OsKind.IOS if ios else OsKind.UNKNOWN
    return ImageRoot(root, os_kind, file_count, tuple(warnings))


def _find_stores(root: Path, tops: list[Path], app: AppId) -> list[tuple[str, str]]:
    wanted = {name.lower(): role for role, name in STORE_NAMES[app].items()}
    stores: list[tuple[str, str]] = []
    for top in tops:
        for full in walk_files(top):
            role = wanted.get(full.name.lower())
            if role is not None:
                stores.append((role, _rel(root, full)))
            elif any(full.name.lower().endswith(s) for s in SIDECAR_SUFFIXES):
                base = full.name.lower()
                for s in SIDECAR_SUFFIXES:
                    if base.endswith(s) and base[: -len(s)] in wanted:
                        stores.append(("sidecar", _rel(root, full)))
    return sorted(set(stores), key=lambda s: (s[1], s[0]))


def discover_apps(image: ImageRoot) -> list[AppHome]:
    """Locate the data homes of the four messaging apps in a classified image."""
    if image.os is OsKind.ANDROID:
        homes = _discover_android(image.root_path)
    elif image.os is OsKind.IOS:
        homes = _discover_ios(image.root_path)
    else:
        log.warning("image OS unknown; no app discovery performed")
        return []
    return sorted(homes, key=lambda h: (h.app.value, h.roots))


def _sdcard_dirs(root: Path, app: AppId) -> list[Path]:
    found: list[Path] = []
    for prefix in SDCARD_PREFIXES:
        base = _resolve_ci(root, prefix)
        if base is None or not base.is_dir():
            continue
        for companion in SDCARD_COMPANIONS[app]:
            hit = _resolve_ci(base, companion)
            if hit is not None and hit.is_dir() and hit not in found:
                found.append(hit)
    return found


def _discover_android(root: Path) -> list[AppHome]:
    data = _resolve_ci(root, ANDROID_DATA)
    packages: dict[AppId, list[tuple[Path, str]]] = {}
    for entry in sorted(os.listdir(data)):
        full = data / entry
        if not full.is_dir():
            continue
        lowered = entry.lower()
        app = ANDROID_PACKAGES.get(lowered)
        pattern = lowered
        if app is None and "sgiggle" in lowered:
            app, pattern = AppId.TANGO, "*sgiggle*"
        if app is not None:
            packages.setdefault(app, []).append((full, pattern))

    homes = []
    for app, hits in packages.items():
        for pkg_dir, pattern in hits:
            tops = [pkg_dir] + _sdcard_dirs(root, app)
            stores = _find_stores(root, tops, app)
            roots = [_rel(root, pkg_dir)]
            if app is AppId.SKYPE:
                files = _child_ci(pkg_dir, "files")
                if files is not None and files.is_dir():
                    for user in sorted(os.listdir(files)):
                        user_dir = files / user
                        if user_dir.is_dir():
                            roots.append(_rel(root, user_dir))
                            media = _child_ci(user_dir, "media")
                            if media is not None and media.is_dir():
                                roots.append(_rel(root, media))
            if app is AppId.TANGO:
                for full in sorted(pkg_dir.rglob("*")):
                    if full.is_dir() and full.name.lower() == "tcstoragemanagermediacache":
                        roots.append(_rel(root, full))
            roots += [_rel(root, d) for d in _sdcard_dirs(root, app)]
            homes.append(
                AppHome(
                    app=app,
                    os=OsKind.ANDROID,
                    roots=tuple(dict.fromkeys(roots)),
                    stores=tuple(stores),
                    hidden=pkg_dir.name.startswith("."),
                    install_root=_rel(root, pkg_dir),
                    matched_pattern=pattern,
                )
            )
    return homes


def _ios_signatures(container: Path) -> dict[AppId, tuple[list[Path], str]]:
    """Identify apps in one iOS container by the files they keep."""
    hits: dict[AppId, tuple[list[Path], str]] = {}
    for dirpath, dirnames, filenames in os.walk(container):
        dirnames.sort()
        here = Path(dirpath)
        for d in dirnames:
            if "sgiggle" in d.lower() and AppId.TANGO not in hits:
                hits[AppId.TANGO] = ([here / d], "sgiggle folder")
        for name in sorted(filenames):
            lowered = name.lower()
            if lowered == "main.db":
                rel_parts = [p.lower() for p in here.relative_to(container).parts]
                if any("skype" in p for p in rel_parts):
                    roots = hits.setdefault(AppId.SKYPE, ([], "main.db under skype folder"))[0]
                    roots.append(here)
            elif lowered == "contacts.data" and AppId.VIBER not in hits:
                hits[AppId.VIBER] = ([], "Contacts.data")
            elif lowered == "chatstorage.sqlite" and AppId.WHATSAPP not in hits:
                hits[AppId.WHATSAPP] = ([], "ChatStorage.sqlite")
    return hits


def _discover_ios(root: Path) -> list[AppHome]:
    homes = []
    for parent_rel in IOS_APP_PARENTS:
        parent = _resolve_ci(root, parent_rel)
        if parent is None or not parent.is_dir():
            continue
        for guid in sorted(os.listdir(parent)):
            container = parent / guid
            if not container.is_dir():
                continue
            try:
                hits = _ios_signatures(container)
            except OSError as exc:
                log.warning("skipping container %s: %s", container, exc)
                continue
            for app, (extra_roots, pattern) in hits.items():
                roots = [_rel(root, container)] + [_rel(root, p) for p in extra_roots]
                hidden = False
                if app is AppId.TANGO:
                    hidden = any(p.name.startswith(".") for p in extra_roots)
                if app is AppId.SKYPE:
                    for user_dir in extra_roots:
                        media = _child_ci(user_dir, "media")
                        if media is not None and media.is_dir():
                            roots.append(_rel(root, media))
                if app is AppId.WHATSAPP:
                    media = _resolve_ci(container, "Library/Media")
                    if media is not None and media.is_dir():
                        roots.append(_rel(root, media))
                stores = _find_stores(root, [container], app)
                info = _find_info_plist(container)
                if info is not None:
                    stores.append(("info_plist", _rel(root, info)))
                if app is AppId.TANGO:
                    prefs = _resolve_ci(container, "Library/Preferences")
                    if prefs is not None and prefs.is_dir():
                        for name in sorted(os.listdir(prefs)):
                            if "sgiggle" in name.lower() and name.lower().endswith(".plist"):
                                stores.append(("prefs_plist", _rel(root, prefs / name)))
                homes.append(
                    AppHome(
                        app=app,
                        os=OsKind.IOS,
                        roots=tuple(dict.fromkeys(roots)),
                        stores=tuple(sorted(set(stores), key=lambda s: (s[1], s[0]))),
                        hidden=hidden,
                        install_root=_rel(root, container),
                        matched_pattern=pattern,
                    )
                )
    return homes


def _find_info_plist(container: Path) -> Path | None:
    for entry in sorted(os.listdir(container)):
        if entry.lower().endswith(".app") and (container / entry).is_dir():
            info = _child_ci(container / entry, "Info.plist")
            if info is not None and info.is_file():
                return info
    return None

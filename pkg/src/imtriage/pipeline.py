"""classify -> discover -> extract -> merge, as one library call."""

from __future__ import annotations

import dataclasses
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable

from .extractors import AliasTable, AppResult, extract
from .ingest import ImageRoot, classify_image, discover_apps
from .model import AppId, OsKind
from .reportgen import CaseReport, combine, merge

log = logging.getLogger(__name__)


def scan_image(
    root: str | Path,
    *,
    os_override: OsKind | str | None = None,
    apps: Iterable[AppId | str] | None = None,
    aliases: AliasTable | None = None,
    max_workers: int | None = None,
) -> tuple[ImageRoot, CaseReport]:
    """Run the whole read-only pipeline over an image directory.

    Raises ``UnreadableRoot`` when the directory cannot be traversed; every
    other failure is recorded inside the report.
    """
    image = classify_image(root)
    warnings = list(image.warnings)
    if os_override is not None and OsKind(os_override) is not OsKind.UNKNOWN:
        forced = OsKind(os_override)
        if forced is not image.os:
            warnings.append(f"os forced to {forced.value} (classified as {image.os.value})")
        image = dataclasses.replace(image, os=forced)
    if image.os is OsKind.UNKNOWN:
        warnings.append("no iOS or Android layout found; nothing to extract")

    homes = discover_apps(image)
    if apps is not None:
        wanted = {AppId(a) for a in apps}
        homes = [h for h in homes if h.app in wanted]

    results: list[AppResult]
    if len(homes) > 1 and max_workers != 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            results = list(pool.map(lambda h: extract(h, image.root_path, aliases), homes))
    else:
        results = [extract(h, image.root_path, aliases) for h in homes]

    report = merge(
        combine(results),
        image_os=image.os,
        file_count=image.file_count,
        image_warnings=warnings,
    )
    return image, report

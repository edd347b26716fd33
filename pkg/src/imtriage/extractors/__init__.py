"""Per-app extraction of normalized records from discovered data homes."""

from __future__ import annotations

import logging
from pathlib import Path

from ..ingest import AppHome
from ..model import AppId
from . import skype, tango, viber, whatsapp
from .base import (
    APPLE_EPOCH_OFFSET_MS,
    AliasTable,
    AppResult,
    Context,
    apple_seconds_to_ms,
    unix_ms_to_ms,
    unix_seconds_to_ms,
)

log = logging.getLogger(__name__)

_RUNNERS = {
    AppId.SKYPE: skype.run,
    AppId.VIBER: viber.run,
    AppId.TANGO: tango.run,
    AppId.WHATSAPP: whatsapp.run,
}


def extract(home: AppHome, image_root: str | Path, aliases: AliasTable | None = None) -> AppResult:
    """Run the extractor for ``home.app``. Never raises: any failure lands in
    the result's ``errors``."""
    ctx = Context(image_root, home, aliases)
    try:
        return _RUNNERS[home.app](ctx)
    except Exception as exc:  # isolation: a broken app must not take the run down
        log.exception("extractor for %s failed", home.app.value)
        ctx.error(home.install_root or home.roots[0], f"internal error: {type(exc).__name__}: {exc}")
        ctx.result.records.clear()
        return ctx.finish()


def extract_skype(home: AppHome, image_root: str | Path, aliases: AliasTable | None = None) -> AppResult:
    if home.app is not AppId.SKYPE:
        raise ValueError(f"not a skype home: {home.app}")
    return extract(home, image_root, aliases)


def extract_viber(home: AppHome, image_root: str | Path, aliases: AliasTable | None = None) -> AppResult:
    if home.app is not AppId.VIBER:
        raise ValueError(f"not a viber home: {home.app}")
    return extract(home, image_root, aliases)


def extract_tango(home: AppHome, image_root: str | Path, aliases: AliasTable | None = None) -> AppResult:
    if home.app is not AppId.TANGO:
        raise ValueError(f"not a tango home: {home.app}")
    return extract(home, image_root, aliases)


def extract_whatsapp(home: AppHome, image_root: str | Path, aliases: AliasTable | None = None) -> AppResult:
    if home.app is not AppId.WHATSAPP:
        raise ValueError(f"not a whatsapp home: {home.app}")
    return extract(home, image_root, aliases)


__all__ = [
    "APPLE_EPOCH_OFFSET_MS",
    "AliasTable",
    "AppResult",
    "apple_seconds_to_ms",
    "extract",
    "extract_skype",
    "extract_tango",
    "extract_viber",
    "extract_whatsapp",
    "unix_ms_to_ms",
    "unix_seconds_to_ms",
]

"""Property-list access (binary ``bplist00`` and XML) on top of :mod:`plistlib`."""

from __future__ import annotations

import plistlib
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import NotAPlist

_MISSING = object()


@dataclass(frozen=True)
class PlistTree:
    path: str
    root: Any

    def lookup(self, keypath: str, default: Any = None) -> Any:
        """Resolve a dotted key path; integer segments index into arrays."""
        node = self.root
        for part in keypath.split("."):
            if isinstance(node, dict):
                node = node.get(part, _MISSING)
            elif isinstance(node, list) and part.isdigit() and int(part) < len(node):
                node = node[int(part)]
            else:
                node = _MISSING
            if node is _MISSING:
                return default
        return node


def open_plist(path: str | Path, root: str | Path | None = None) -> PlistTree:
    full = Path(root) / path if root is not None else Path(path)
    label = Path(path).as_posix()
    with open(full, "rb") as fh:
        data = fh.read()
    stripped = data.lstrip()
    if not (data.startswith(b"bplist00") or stripped.startswith(b"<?xml") or stripped.startswith(b"<plist")):
        raise NotAPlist(label, "unrecognised header")
    try:
        tree = plistlib.loads(data)
    except Exception as exc:  # plistlib raises a mix of ValueError/InvalidFileException/ExpatError
        raise NotAPlist(label, str(exc) or type(exc).__name__) from exc
    return PlistTree(label, tree)

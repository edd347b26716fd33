from __future__ import annotations


class StoreError(Exception):
    """Base class for store failures; extractors record these, never re-raise."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


class NotASQLiteFile(StoreError):
    def __init__(self, path: str):
        super().__init__(path, "not a SQLite file (bad magic)")


class CorruptStore(StoreError):
    pass


class NotAPlist(StoreError):
    def __init__(self, path: str, detail: str = ""):
        reason = "not a property list" + (f": {detail}" if detail else "")
        super().__init__(path, reason)


class TableMissing(KeyError):
    def __init__(self, table: str):
        super().__init__(table)
        self.table = table

    def __str__(self) -> str:
        return f"table missing: {self.table}"

"""Read-only access to SQLite-format stores, property lists and opaque blobs."""

from .errors import CorruptStore, NotAPlist, NotASQLiteFile, StoreError, TableMissing
from .opacity import OpacityVerdict, opacity_probe, shannon_entropy
from .plist import PlistTree, open_plist
from .sqlite import TableStore, open_table_store


def read_rows(store: TableStore, table: str, columns: list[str]) -> list[dict]:
    return store.read_rows(table, columns)


__all__ = [
    "CorruptStore",
    "NotAPlist",
    "NotASQLiteFile",
    "OpacityVerdict",
    "PlistTree",
    "StoreError",
    "TableMissing",
    "TableStore",
    "open_plist",
    "open_table_store",
    "opacity_probe",
    "read_rows",
    "shannon_entropy",
]

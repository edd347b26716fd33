"""Read-only reader for the SQLite version 3 on-disk format.

No SQL engine is involved: the file is read into memory once and table
b-trees are walked directly, so nothing (journal, WAL index, temp file) can
ever be written next to the evidence.
"""

from __future__ import annotations

import logging
import re
import struct
from pathlib import Path
from typing import Any

from .errors import CorruptStore, NotASQLiteFile, TableMissing

log = logging.getLogger(__name__)

MAGIC = b"SQLite format 3\x00"

_LEAF_TABLE = 0x0D
_INTERIOR_TABLE = 0x05
_LEAF_INDEX = 0x0A
_INTERIOR_INDEX = 0x02

_ENCODINGS = {1: "utf-8", 2: "utf-16-le", 3: "utf-16-be"}


def _varint(buf: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for i in range(8):
        byte = buf[pos + i]
        value = (value << 7) | (byte & 0x7F)
        if byte < 0x80:
            return value, pos + i + 1
    value = (value << 8) | buf[pos + 8]
    if value >= 1 << 63:
        value -= 1 << 64
    return value, pos + 9


class _Table:
    __slots__ = ("name", "rootpage", "columns", "rowid_alias", "sql", "unsupported")

    def __init__(self, name, rootpage, columns, rowid_alias, sql, unsupported=None):
        self.name = name
        self.rootpage = rootpage
        self.columns = columns
        self.rowid_alias = rowid_alias
        self.sql = sql
        self.unsupported = unsupported


class TableStore:
    """An opened SQLite file.

    ``path`` is the image-relative path the store was opened under (or the
    path as given when no image root was supplied). ``warnings`` collects
    schema-tolerance notes produced by :meth:`read_rows`.
    """

    def __init__(self, path: str, data: bytes):
        self.path = path
        self.warnings: list[str] = []
        self._data = data
        self._parse_header()
        self._tables: dict[str, _Table] = {}
        self._load_schema()

    # header ---------------------------------------------------------------

    def _parse_header(self) -> None:
        data = self._data
        if len(data) < 100 or data[:16] != MAGIC:
            raise NotASQLiteFile(self.path)
        (raw_size,) = struct.unpack_from(">H", data, 16)
        page_size = 65536 if raw_size == 1 else raw_size
        if page_size < 512 or page_size & (page_size - 1):
            raise CorruptStore(self.path, f"invalid page size {raw_size}")
        self.page_size = page_size
        reserved = data[20]
        self.usable_size = page_size - reserved
        if self.usable_size < 480:
            raise CorruptStore(self.path, "usable page size below 480")
        (change_counter, header_pages) = struct.unpack_from(">II", data, 24)
        (version_valid_for,) = struct.unpack_from(">I", data, 92)
        (encoding,) = struct.unpack_from(">I", data, 56)
        self.encoding = _ENCODINGS.get(encoding or 1)
        if self.encoding is None:
            raise CorruptStore(self.path, f"unknown text encoding {encoding}")
        if len(data) < page_size:
            raise CorruptStore(self.path, "file shorter than one page")
        file_pages = len(data) // page_size
        if header_pages and change_counter == version_valid_for:
            if header_pages > file_pages:
                raise CorruptStore(
                    self.path, f"truncated: header declares {header_pages} pages, file holds {file_pages}"
                )
            self.page_count = header_pages
        else:
            self.page_count = file_pages

    # page access ----------------------------------------------------------

    def _page(self, number: int) -> tuple[int, bytes]:
        if number < 1 or number > self.page_count:
            raise CorruptStore(self.path, f"page {number} out of range")
        start = (number - 1) * self.page_size
        return (100 if number == 1 else 0), self._data[start : start + self.page_size]

    def _iter_table_cells(self, rootpage: int):
        """Yield ``(rowid, payload)`` for every cell, rowid ascending."""
        seen: set[int] = set()
        stack = [rootpage]
        # depth-first, right-most child pushed first so pages pop in key order
        while stack:
            number = stack.pop()
            if number in seen:
                raise CorruptStore(self.path, f"b-tree cycle at page {number}")
            seen.add(number)
            hdr, page = self._page(number)
            try:
                kind = page[hdr]
                (ncells,) = struct.unpack_from(">H", page, hdr + 3)
            except (IndexError, struct.error) as exc:
                raise CorruptStore(self.path, f"bad page header on page {number}") from exc
            if kind == _INTERIOR_TABLE:
                (right,) = struct.unpack_from(">I", page, hdr + 8)
                children = []
                for i in range(ncells):
                    (ptr,) = struct.unpack_from(">H", page, hdr + 12 + 2 * i)
                    (child,) = struct.unpack_from(">I", page, ptr)
                    children.append(child)
                children.append(right)
                stack.extend(reversed(children))
            elif kind == _LEAF_TABLE:
                for i in range(ncells):
                    try:
                        (ptr,) = struct.unpack_from(">H", page, hdr + 8 + 2 * i)
                        size, pos = _varint(page, ptr)
                        rowid, pos = _varint(page, pos)
                    except (IndexError, struct.error) as exc:
                        raise CorruptStore(self.path, f"bad cell on page {number}") from exc
                    yield rowid, self._payload(page, pos, size)
            elif kind in (_LEAF_INDEX, _INTERIOR_INDEX):
                raise CorruptStore(self.path, f"index page {number} where table page expected")
            else:
                raise CorruptStore(self.path, f"unknown b-tree page type {kind:#x} on page {number}")

    def _payload(self, page: bytes, pos: int, size: int) -> bytes:
        usable = self.usable_size
        max_local = usable - 35
        if size <= max_local:
            local = size
        else:
            min_local = ((usable - 12) * 32 // 255) - 23
            local = min_local + (size - min_local) % (usable - 4)
            if local > max_local:
                local = min_local
        chunk = page[pos : pos + local]
        if len(chunk) != local:
            raise CorruptStore(self.path, "cell payload runs past page end")
        if local == size:
            return bytes(chunk)
        parts = [chunk]
        remaining = size - local
        (overflow,) = struct.unpack_from(">I", page, pos + local)
        seen: set[int] = set()
        while remaining > 0:
            if overflow == 0 or overflow in seen:
                raise CorruptStore(self.path, "broken overflow chain")
            seen.add(overflow)
            _, opage = self._page(overflow)
            take = min(remaining, usable - 4)
            parts.append(opage[4 : 4 + take])
            remaining -= take
            (overflow,) = struct.unpack_from(">I", opage, 0)
        return b"".join(parts)

    # records --------------------------------------------------------------

    def _decode_record(self, payload: bytes) -> list[Any]:
        header_size, pos = _varint(payload, 0)
        types = []
        while pos < header_size:
            serial, pos = _varint(payload, pos)
            types.append(serial)
        body = header_size
        values: list[Any] = []
        for serial in types:
            if serial == 0:
                values.append(None)
            elif 1 <= serial <= 6:
                width = (0, 1, 2, 3, 4, 6, 8)[serial]
                values.append(int.from_bytes(payload[body : body + width], "big", signed=True))
                body += width
            elif serial == 7:
                values.append(struct.unpack_from(">d", payload, body)[0])
                body += 8
            elif serial == 8:
                values.append(0)
            elif serial == 9:
                values.append(1)
            elif serial >= 12:
                length = (serial - 12) // 2
                raw = payload[body : body + length]
                if len(raw) != length:
                    raise CorruptStore(self.path, "record value runs past payload")
                body += length
                if serial % 2:
                    values.append(raw.decode(self.encoding, errors="surrogateescape"))
                else:
                    values.append(bytes(raw))
            else:
                raise CorruptStore(self.path, f"reserved serial type {serial}")
        return values

    def _load_schema(self) -> None:
        try:
            for _rowid, payload in self._iter_table_cells(1):
                row = self._decode_record(payload)
                row += [None] * (5 - len(row))
                kind, name, _tbl, rootpage, sql = row[:5]
                if kind != "table" or not isinstance(name, str):
                    continue
                self._tables[name] = _parse_create_table(name, rootpage, sql or "")
        except CorruptStore:
            raise
        except Exception as exc:  # malformed bytes surface as arbitrary decode errors
            raise CorruptStore(self.path, f"unreadable schema: {exc}") from exc

    # public API -----------------------------------------------------------

    @property
    def tables(self) -> list[str]:
        return sorted(self._tables)

    def find_table(self, name: str) -> str | None:
        if name in self._tables:
            return name
        lowered = name.lower()
        for candidate in self._tables:
            if candidate.lower() == lowered:
                return candidate
        return None

    def columns(self, table: str) -> list[str]:
        return list(self._require(table).columns)

    def _require(self, table: str) -> _Table:
        actual = self.find_table(table)
        if actual is None:
            raise TableMissing(table)
        return self._tables[actual]

    def iter_rows(self, table: str):
        """Yield ``(rowid, {column: value})`` over the whole table."""
        info = self._require(table)
        if info.unsupported:
            raise CorruptStore(self.path, f"table {info.name}: {info.unsupported}")
        ncols = len(info.columns)
        try:
            for rowid, payload in self._iter_table_cells(info.rootpage):
                values = self._decode_record(payload)
                if len(values) < ncols:
                    values += [None] * (ncols - len(values))
                row = dict(zip(info.columns, values))
                if info.rowid_alias is not None:
                    row[info.rowid_alias] = rowid
                yield rowid, row
        except CorruptStore:
            raise
        except Exception as exc:
            raise CorruptStore(self.path, f"table {info.name}: {exc}") from exc

    def read_rows(self, table: str, columns: list[str]) -> list[dict[str, Any]]:
        """Return the requested columns for every row, rowid ascending.

        A column the table lacks reads as ``None`` in every row and records
        one warning.
        """
        info = self._require(table)
        lookup = {c.lower(): c for c in info.columns}
        resolved: list[tuple[str, str | None]] = []
        for col in columns:
            if col.lower() == "rowid":
                resolved.append((col, "rowid"))
                continue
            actual = lookup.get(col.lower())
            if actual is None:
                message = f"{self.path}: column {info.name}.{col} missing, read as null"
                self.warnings.append(message)
                log.warning(message)
            resolved.append((col, actual))
        out = []
        for rowid, row in self.iter_rows(table):
            out.append(
                {
                    col: (rowid if actual == "rowid" else row.get(actual) if actual else None)
                    for col, actual in resolved
                }
            )
        return out


_CONSTRAINT_WORDS = ("constraint", "primary", "unique", "check", "foreign")


def _split_top_level(body: str) -> list[str]:
    parts, depth, current, quote = [], 0, [], None
    for ch in body:
        if quote:
            current.append(ch)
            if ch == quote:
                quote = None
            continue
        if ch in "\"'`[":
            quote = "]" if ch == "[" else ch
        elif ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            parts.append("".join(current).strip())
            current = []
            continue
        current.append(ch)
    if "".join(current).strip():
        parts.append("".join(current).strip())
    return parts


def _unquote(token: str) -> str:
    if len(token) >= 2 and token[0] in "\"'`[" and token[-1] in "\"'`]":
        return token[1:-1]
    return token


_IDENT = re.compile(r'\s*("(?:[^"]|"")*"|`[^`]*`|\[[^\]]*\]|\'[^\']*\'|[^\s(]+)\s*(.*)', re.S)


def _parse_create_table(name: str, rootpage: Any, sql: str) -> _Table:
    upper = sql.upper()
    if "VIRTUAL TABLE" in upper or not rootpage:
        return _Table(name, 0, [], None, sql, "virtual tables are not readable")
    start = sql.find("(")
    end = sql.rfind(")")
    if start < 0 or end < start:
        return _Table(name, rootpage, [], None, sql, "table schema not parseable")
    tail = sql[end + 1 :].upper()
    columns: list[str] = []
    alias = None
    for part in _split_top_level(sql[start + 1 : end]):
        first = part.split(None, 1)[0].lower() if part.split() else ""
        if first in _CONSTRAINT_WORDS:
            continue
        match = _IDENT.match(part)
        if not match:
            continue
        col = _unquote(match.group(1))
        rest = match.group(2).upper()
        columns.append(col)
        decl = rest.split()
        if decl[:1] == ["INTEGER"] and "PRIMARY KEY" in " ".join(decl) and "DESC" not in decl:
            alias = col
    unsupported = "WITHOUT ROWID tables are not readable" if "WITHOUT ROWID" in tail else None
    return _Table(name, int(rootpage), columns, alias, sql, unsupported)


def open_table_store(path: str | Path, root: str | Path | None = None) -> TableStore:
    """Open a SQLite-format file strictly read-only.

    With ``root`` given, ``path`` is taken relative to it and kept that way
    on the returned store.
    """
    full = Path(root) / path if root is not None else Path(path)
    label = Path(path).as_posix()
    with open(full, "rb") as fh:
        data = fh.read()
    return TableStore(label, data)

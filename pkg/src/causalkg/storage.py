"""Single-file durability for a TripleStore.

File layout (UTF-8, LF line endings, bit-exact):

    causalstore-v1
    <sorted canonical N-Triples snapshot>
    %%LOG
    <log records: 'A ' or 'R ' followed by one N-Triples line>

Replaying the log over the snapshot reproduces the in-memory triple set.
Any prefix of the log that ends at a record boundary is a valid historical
state; a torn trailing record is dropped (and truncated away when the store
is opened writable).
"""

from __future__ import annotations

import fcntl
import logging
import os
from pathlib import Path
from typing import Iterable, Optional

from .errors import LockError, ParseError, StorageError
from .rdf import Triple, TripleStore, parse_triple_line, triple_line

logger = logging.getLogger("causalkg.storage")

MAGIC = "causalstore-v1"
LOG_MARK = "%%LOG"

_HEADER = (MAGIC + "\n").encode()
_MARK = (LOG_MARK + "\n").encode()


class StoreFile:
    """A TripleStore bound to its on-disk snapshot+log file.

    One exclusive (writing) holder per path, enforced with an OS advisory
    lock on a ``<path>.lock`` sidecar; shared openers read the state as of
    open time and never write.
    """

    def __init__(self, path: Path, exclusive: bool, store: TripleStore,
                 fsync: bool, lock_handle, dropped_lines: int):
        self.path = path
        self.exclusive = exclusive
        self.store = store
        self.fsync = fsync
        self.dropped_lines = dropped_lines
        self._lock_handle = lock_handle
        self._append = open(path, "ab") if exclusive else None
        self._closed = False

    def commit(self, asserts: Iterable[Triple] = (), retracts: Iterable[Triple] = ()) -> tuple[int, int]:
        """Apply retracts then asserts to the store and append the effective
        changes to the log, flushed to stable storage before returning."""
        self._require_writable()
        records = bytearray()
        removed = added = 0
        for t in retracts:
            if self.store.delete(t):
                removed += 1
                records += f"R {triple_line(t)}\n".encode()
        for t in asserts:
            if self.store.insert(t):
                added += 1
                records += f"A {triple_line(t)}\n".encode()
        if records:
            try:
                self._append.write(records)
                self._append.flush()
                if self.fsync:
                    os.fsync(self._append.fileno())
            except OSError as exc:
                raise StorageError(f"commit failed on {self.path}: {exc}") from exc
        return added, removed

    def compact(self) -> None:
        """Rewrite the file as header + sorted snapshot + empty log."""
        self._require_writable()
        tmp = self.path.with_name(self.path.name + ".tmp")
        data = _HEADER + self.store.dump_ntriples().encode() + _MARK
        with open(tmp, "wb") as handle:
            handle.write(data)
            handle.flush()
            os.fsync(handle.fileno())
        self._append.close()
        os.replace(tmp, self.path)
        self._append = open(self.path, "ab")

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        if self._append is not None:
            self._append.close()
        if self._lock_handle is not None:
            fcntl.flock(self._lock_handle.fileno(), fcntl.LOCK_UN)
            self._lock_handle.close()

    def _require_writable(self) -> None:
        if self._closed:
            raise StorageError("store file is closed")
        if not self.exclusive:
            raise StorageError("store was opened shared (read-only)")

    def __enter__(self) -> "StoreFile":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def open_store(path, exclusive: bool = True, *, fsync: bool = True) -> StoreFile:
    """Open (creating if absent) the store file at ``path``.

    Exclusive mode takes the writer lock and repairs any torn tail left by
    a crash; shared mode reads the current state without locking.
    """
    path = Path(path)
    if not path.parent.is_dir():
        raise StorageError(f"parent directory does not exist: {path.parent}")

    lock_handle = None
    if exclusive:
        lock_handle = open(path.with_name(path.name + ".lock"), "ab")
        try:
            fcntl.flock(lock_handle.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            lock_handle.close()
            raise LockError(f"store is exclusively locked by another holder: {path}")

    try:
        if not path.exists():
            if not exclusive:
                # shared openers never write, not even to create the file
                return StoreFile(path, False, TripleStore(), fsync, None, 0)
            with open(path, "wb") as handle:
                handle.write(_HEADER + _MARK)
                handle.flush()
                os.fsync(handle.fileno())

        data = path.read_bytes()
        store, valid_end, dropped, needs_rewrite = _replay(data)
        if dropped:
            logger.warning("store %s: dropped %d unparseable line(s) during recovery", path, dropped)
        if exclusive and (needs_rewrite or valid_end < len(data)):
            _repair(path, store, valid_end, needs_rewrite, data)
        return StoreFile(path, exclusive, store, fsync, lock_handle, dropped)
    except Exception:
        if lock_handle is not None:
            fcntl.flock(lock_handle.fileno(), fcntl.LOCK_UN)
            lock_handle.close()
        raise


def _replay(data: bytes) -> tuple[TripleStore, int, int, bool]:
    """Reconstruct a store from file bytes.

    Returns (store, end offset of the last valid record, count of dropped
    lines, whether the prefix itself needs rewriting rather than a plain
    truncation).
    """
    store = TripleStore()
    lines = data.split(b"\n")
    # split() leaves a trailing '' for LF-terminated data; a non-empty final
    # element is a torn, unterminated line
    tail = lines.pop() if lines else b""
    dropped = 1 if tail else 0

    if not lines or lines[0] != MAGIC.encode():
        return TripleStore(), 0, dropped + len([l for l in lines if l]), True

    offset = len(lines[0]) + 1
    section = "snapshot"
    valid_end = 0
    needs_rewrite = False

    for raw in lines[1:]:
        line_len = len(raw) + 1
        if section == "snapshot":
            if raw == LOG_MARK.encode():
                section = "log"
                offset += line_len
                valid_end = offset
                continue
            triple = _decode_snapshot_line(raw)
            if triple is None:
                # torn or corrupt snapshot: keep what parsed, rebuild file
                dropped += 1
                needs_rewrite = True
                section = "broken"
                continue
            store.insert(triple)
            offset += line_len
        elif section == "log":
            record = _decode_log_line(raw)
            if record is None:
                dropped += 1
                section = "broken"
                continue
            op, triple = record
            if op == "A":
                store.insert(triple)
            else:
                store.delete(triple)
            offset += line_len
            valid_end = offset
        else:
            if raw:
                dropped += 1

    if section == "snapshot":
        # file ended before %%LOG: snapshot section was torn
        needs_rewrite = True
        valid_end = 0
    return store, valid_end, dropped, needs_rewrite


def _decode_snapshot_line(raw: bytes) -> Optional[Triple]:
    try:
        return parse_triple_line(raw.decode("utf-8"))
    except (UnicodeDecodeError, ParseError):
        return None


def _decode_log_line(raw: bytes):
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError:
        return None
    if len(text) < 2 or text[0] not in "AR" or text[1] != " ":
        return None
    try:
        return text[0], parse_triple_line(text[2:])
    except ParseError:
        return None


def _repair(path: Path, store: TripleStore, valid_end: int, needs_rewrite: bool, data: bytes) -> None:
    if needs_rewrite:
        logger.warning("store %s: rebuilding snapshot after corruption", path)
        tmp = path.with_name(path.name + ".tmp")
        with open(tmp, "wb") as handle:
            handle.write(_HEADER + store.dump_ntriples().encode() + _MARK)
            handle.flush()
            os.fsync(handle.fileno())
        os.replace(tmp, path)
        return
    if valid_end < len(data):
        logger.warning("store %s: truncating torn tail (%d bytes)", path, len(data) - valid_end)
        with open(path, "r+b") as handle:
            handle.truncate(valid_end)
            handle.flush()
            os.fsync(handle.fileno())

"""Pluggable persistence: a volatile memory backend and a durable disk backend.

Disk layout inside the data directory:
  journal.log    — append-only frames: 4-byte BE length, JSON payload,
                   4-byte BE CRC32 of the payload
  snapshot.json  — {"format", "seq", "crc32", "state"}; crc32 covers the
                   canonical dump of "state"

A torn tail frame (short read or checksum mismatch) is discarded on open and
the file truncated back to the last good frame, so a crash mid-append can
never surface a half-applied mutation. Snapshots are written to a temp file
and renamed into place; journal frames with seq <= snapshot seq are skipped
at load, which makes the snapshot-then-truncate sequence safe to interrupt
at any point.
"""
from __future__ import annotations

import json
import os
import struct
import threading
import zlib
from pathlib import Path

from .errors import CorruptSnapshot, IoError

JOURNAL_NAME = "journal.log"
SNAPSHOT_NAME = "snapshot.json"

_LEN = struct.Struct(">I")
_MAX_FRAME = 64 * 1024 * 1024


def _canonical(state: dict) -> bytes:
    return json.dumps(state, sort_keys=True, separators=(",", ":")).encode("utf-8")


def write_snapshot_file(path: str | os.PathLike, state: dict, seq: int) -> str:
    """Atomically write a checksummed snapshot artifact; returns its path."""
    path = Path(path)
    payload = {
        "format": 1,
        "seq": seq,
        "crc32": zlib.crc32(_canonical(state)),
        "state": state,
    }
    tmp = path.with_suffix(".tmp")
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            json.dump(payload, fh)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except OSError as exc:
        raise IoError(f"cannot write snapshot {path}: {exc}") from exc
    return str(path)


def read_snapshot_file(path: str | os.PathLike) -> tuple[dict, int]:
    """Load and verify a snapshot artifact -> (state, seq)."""
    try:
        raw = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read snapshot {path}: {exc}") from exc
    try:
        payload = json.loads(raw)
        state = payload["state"]
        seq = payload["seq"]
        crc = payload["crc32"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise CorruptSnapshot(f"snapshot {path} unreadable: {exc}") from exc
    if zlib.crc32(_canonical(state)) != crc:
        raise CorruptSnapshot(f"snapshot {path} failed its checksum")
    return state, seq


class MemoryBackend:
    """Volatile storage: nothing persisted, nothing restored."""

    name = "memory"

    def load(self) -> tuple[dict | None, list[tuple[int, str, dict]]]:
        return None, []

    def append(self, seq: int, kind: str, data: dict) -> None:
        pass

    def snapshot(self, state: dict, seq: int) -> str | None:
        return None

    def close(self) -> None:
        pass


class DiskBackend:
    """Append-only journal plus snapshot files under a data directory."""

    name = "disk"

    def __init__(self, data_dir: str | os.PathLike, fsync: bool = True):
        self.data_dir = Path(data_dir)
        self.fsync = fsync
        self._lock = threading.Lock()
        try:
            self.data_dir.mkdir(parents=True, exist_ok=True)
            self._journal = open(self.journal_path, "ab")
        except OSError as exc:
            raise IoError(f"cannot open journal in {data_dir}: {exc}") from exc

    @property
    def journal_path(self) -> Path:
        return self.data_dir / JOURNAL_NAME

    @property
    def snapshot_path(self) -> Path:
        return self.data_dir / SNAPSHOT_NAME

    def load(self) -> tuple[dict | None, list[tuple[int, str, dict]]]:
        """Prior state: (snapshot state or None, journal events past the snapshot).

        Scans the journal from the start, drops anything after the first torn
        or corrupt frame, and truncates the file back to the good prefix.
        """
        state = None
        snap_seq = 0
        if self.snapshot_path.exists():
            state, snap_seq = read_snapshot_file(self.snapshot_path)

        events: list[tuple[int, str, dict]] = []
        good_end = 0
        try:
            with open(self.journal_path, "rb") as fh:
                while True:
                    header = fh.read(_LEN.size)
                    if len(header) < _LEN.size:
                        break
                    (length,) = _LEN.unpack(header)
                    if length > _MAX_FRAME:
                        break
                    payload = fh.read(length)
                    trailer = fh.read(_LEN.size)
                    if len(payload) < length or len(trailer) < _LEN.size:
                        break
                    (crc,) = _LEN.unpack(trailer)
                    if zlib.crc32(payload) != crc:
                        break
                    try:
                        record = json.loads(payload.decode("utf-8"))
                        seq, kind, data = record["seq"], record["kind"], record["data"]
                    except (json.JSONDecodeError, KeyError, UnicodeDecodeError):
                        break
                    good_end = fh.tell()
                    if seq > snap_seq:
                        events.append((seq, kind, data))
            size = os.path.getsize(self.journal_path)
            if size > good_end:
                with self._lock:
                    self._journal.close()
                    with open(self.journal_path, "ab") as fh:
                        fh.truncate(good_end)
                    self._journal = open(self.journal_path, "ab")
        except OSError as exc:
            raise IoError(f"cannot read journal {self.journal_path}: {exc}") from exc
        return state, events

    def append(self, seq: int, kind: str, data: dict) -> None:
        payload = json.dumps({"seq": seq, "kind": kind, "data": data}).encode("utf-8")
        frame = _LEN.pack(len(payload)) + payload + _LEN.pack(zlib.crc32(payload))
        with self._lock:
            try:
                self._journal.write(frame)
                self._journal.flush()
                if self.fsync:
                    os.fsync(self._journal.fileno())
            except OSError as exc:
                raise IoError(f"cannot append to journal: {exc}") from exc

    def snapshot(self, state: dict, seq: int) -> str:
        """Write a snapshot and truncate the journal it supersedes."""
        path = write_snapshot_file(self.snapshot_path, state, seq)
        with self._lock:
            try:
                self._journal.close()
                with open(self.journal_path, "wb"):
                    pass
                self._journal = open(self.journal_path, "ab")
            except OSError as exc:
                raise IoError(f"cannot truncate journal: {exc}") from exc
        return path

    def close(self) -> None:
        with self._lock:
            self._journal.close()


def open_backend(kind: str, data_dir: str | None, fsync: bool = True):
    if kind == "memory":
        return MemoryBackend()
    if kind == "disk":
        if not data_dir:
            raise IoError("disk backend requires a data directory")
        return DiskBackend(data_dir, fsync=fsync)
    raise ValueError(f"unknown backend {kind!r}")

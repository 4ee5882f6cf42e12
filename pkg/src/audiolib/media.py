"""Resumable chunked uploads, duration probing, and range streaming.

Upload sessions stage bytes in a sparse file plus a JSON sidecar manifest,
so both a restarted server and an interrupted client can resume from the
recorded ranges.  A session only becomes an immutable blob when coverage is
complete and the stored bytes hash to the checksum declared up front.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
import time
import uuid
from dataclasses import asdict, dataclass, field

from . import mp3
from .domain import PartStatus, Role
from .errors import (
    BadChecksumFormat,
    BlobMissing,
    ChunkConflict,
    ChecksumMismatch,
    NoSuchSession,
    NotPublished,
    RangeRejected,
    SizeRejected,
    UploadIncomplete,
    WrongState,
)
from .store import BlobRef, BlobStore, Put, RecordStore

_HEX64 = re.compile(r"^[0-9a-f]{64}$")
_HASH_CHUNK = 1 << 20


@dataclass
class UploadSession:
    session_id: str
    owner: str
    declared_size: int
    declared_checksum: str
    received: list[list[int]] = field(default_factory=list)  # sorted [start, end)
    state: str = "Open"  # Open | Complete | Aborted
    created_at: float = 0.0

    @property
    def covered_bytes(self) -> int:
        return sum(end - start for start, end in self.received)

    def missing_ranges(self) -> list[list[int]]:
        gaps, cursor = [], 0
        for start, end in self.received:
            if start > cursor:
                gaps.append([cursor, start])
            cursor = end
        if cursor < self.declared_size:
            gaps.append([cursor, self.declared_size])
        return gaps


@dataclass(frozen=True)
class ChunkResult:
    received_bytes: int
    fraction: float
    complete: bool


@dataclass(frozen=True)
class StreamResult:
    payload: bytes
    total: int
    start: int
    end: int
    mode: str  # Stream | Download


class MediaStore:
    """Upload sessions, published-part streaming, and the playback log."""

    def __init__(self, blobs: BlobStore, records: RecordStore,
                 max_upload_bytes: int, clock=time.time):
        self.blobs = blobs
        self.records = records
        self.max_upload_bytes = max_upload_bytes
        self.clock = clock
        self._sessions: dict[str, UploadSession] = {}
        self._session_locks: dict[str, threading.RLock] = {}
        self._registry_lock = threading.Lock()
        self._load_staged_sessions()

    # -- upload protocol -----------------------------------------------------

    def begin_upload(self, owner: str, declared_size: int,
                     declared_checksum: str) -> str:
        if not isinstance(declared_size, int) or declared_size <= 0 \
                or declared_size > self.max_upload_bytes:
            raise SizeRejected(
                f"declared size {declared_size} outside (0, {self.max_upload_bytes}]"
            )
        digest = str(declared_checksum).lower()
        if not _HEX64.match(digest):
            raise BadChecksumFormat("checksum must be 64 hex characters")
        session = UploadSession(
            session_id=uuid.uuid4().hex,
            owner=owner,
            declared_size=declared_size,
            declared_checksum=digest,
            created_at=self.clock(),
        )
        with open(self._data_path(session.session_id), "wb") as fh:
            fh.truncate(declared_size)
        with self._registry_lock:
            self._sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.RLock()
        self._save_manifest(session)
        return session.session_id

    def put_chunk(self, session_id: str, offset: int, data: bytes) -> ChunkResult:
        session, lock = self._session(session_id)
        with lock:
            if session.state != "Open":
                raise WrongState(f"session is {session.state}")
            if offset < 0 or offset + len(data) > session.declared_size:
                raise RangeRejected(
                    f"[{offset}, {offset + len(data)}) exceeds "
                    f"declared size {session.declared_size}"
                )
            if data:
                self._check_overlap(session, offset, data)
                with open(self._data_path(session_id), "r+b") as fh:
                    fh.seek(offset)
                    fh.write(data)
                _merge_range(session.received, offset, offset + len(data))
                self._save_manifest(session)
            covered = session.covered_bytes
            return ChunkResult(
                received_bytes=covered,
                fraction=covered / session.declared_size,
                complete=covered == session.declared_size,
            )

    def received_state(self, session_id: str) -> UploadSession:
        session, lock = self._session(session_id)
        with lock:
            return UploadSession(**asdict(session))

    def finish_upload(self, session_id: str) -> BlobRef:
        session, lock = self._session(session_id)
        with lock:
            if session.state == "Complete":
                return BlobRef(self._staging_key(session_id),
                               session.declared_size, session.declared_checksum)
            if session.state != "Open":
                raise WrongState(f"session is {session.state}")
            missing = session.missing_ranges()
            if missing:
                raise UploadIncomplete(
                    f"{len(missing)} range(s) missing", missing=missing
                )
            digest = self._hash_staged(session_id)
            if digest != session.declared_checksum:
                session.state = "Aborted"
                self._data_path(session_id).unlink(missing_ok=True)
                self._save_manifest(session)
                raise ChecksumMismatch(
                    f"stored bytes hash to {digest}, "
                    f"declared {session.declared_checksum}"
                )
            session.state = "Complete"
            self._save_manifest(session)
            return BlobRef(self._staging_key(session_id),
                           session.declared_size, digest)

    def take_completed_blob(self, session_id: str, owner: str) -> BlobRef:
        """Hand a Complete session's blob to the workflow for publication."""
        session, lock = self._session(session_id)
        with lock:
            if session.owner != owner:
                raise NoSuchSession(f"session {session_id} not found for caller")
            if session.state != "Complete":
                raise UploadIncomplete(
                    f"session is {session.state}, not Complete",
                    missing=session.missing_ranges(),
                )
            return BlobRef(self._staging_key(session_id),
                           session.declared_size, session.declared_checksum)

    def drop_session(self, session_id: str) -> None:
        with self._registry_lock:
            self._sessions.pop(session_id, None)
            self._session_locks.pop(session_id, None)
        self._manifest_path(session_id).unlink(missing_ok=True)

    # -- probing ---------------------------------------------------------------

    def probe_blob(self, key: str) -> mp3.AudioProbe:
        path = self.blobs.path_of(key)
        if not path.is_file():
            raise BlobMissing(key)
        return mp3.probe(path)

    # -- playback ----------------------------------------------------------------

    def stream_range(self, caller: dict, part_code: int,
                     byte_range: tuple[int | None, int | None] | None
                     ) -> "StreamResult":
        """Bytes for an audition or playback request, plus blob size and mode.

        byte_range is half-open; (start, None) runs to the end and (None, n)
        is a suffix of n bytes.  Impaired members only ever reach Approved
        parts; admins may audit any status and a volunteer may replay their
        own pending submission.  Playback events are logged for Approved
        parts only; a request returning the whole blob counts as a Download,
        anything partial as a Stream.
        """
        found = self.records.get("part", part_code)
        if found is None:
            raise NotPublished(f"part {part_code}")
        part = found[1]
        role = Role(caller["role"])
        status = PartStatus(part["status"])
        if role is Role.IMPAIRED:
            allowed = status is PartStatus.APPROVED
        elif role is Role.ADMIN:
            allowed = True
        else:
            allowed = (
                part["submitted_by"] == caller["account_id"]
                and status is not PartStatus.REJECTED
            )
        if not allowed:
            raise NotPublished(f"part {part_code}")

        key = part["blob"]
        if not self.blobs.exists(key):
            raise BlobMissing(key)
        total = self.blobs.size(key)
        if byte_range is None:
            start, end = 0, total
        else:
            raw_start, raw_end = byte_range
            if raw_start is None:
                if raw_end is None or raw_end <= 0:
                    raise RangeRejected("empty suffix range")
                start, end = max(0, total - raw_end), total
            else:
                start = raw_start
                end = total if raw_end is None else raw_end
            if not (0 <= start < end <= total):
                raise RangeRejected(f"[{start}, {end}) outside [0, {total})")
        payload = self.blobs.read(key, start, end - start)
        mode = "Download" if len(payload) == total else "Stream"
        if status is PartStatus.APPROVED:
            event_id = uuid.uuid4().hex
            self.records.commit([
                Put("playback", event_id, {
                    "event_id": event_id,
                    "part_code": part["part_code"],
                    "book_code": part["book_code"],
                    "listener": caller["account_id"],
                    "at": self.clock(),
                    "mode": mode,
                }),
            ], scope_id=f"playback:{event_id}")
        return StreamResult(payload, total, start, end, mode)

    def playback_stats(self, window: tuple[float, float] | None = None
                       ) -> dict[int, tuple[int, float]]:
        """Per book: (event count, most recent event time) within the window."""
        stats: dict[int, tuple[int, float]] = {}
        for event in self.records.list_kind("playback"):
            at = event["at"]
            if window is not None and not (window[0] <= at <= window[1]):
                continue
            book = event["book_code"]
            count, last = stats.get(book, (0, 0.0))
            stats[book] = (count + 1, max(last, at))
        return stats

    def playback_counts(self, window: tuple[float, float] | None = None
                        ) -> dict[int, int]:
        return {book: count for book, (count, _) in self.playback_stats(window).items()}

    # -- internals ---------------------------------------------------------------

    def _session(self, session_id: str) -> tuple[UploadSession, threading.RLock]:
        with self._registry_lock:
            session = self._sessions.get(session_id)
            lock = self._session_locks.get(session_id)
        if session is None or lock is None:
            raise NoSuchSession(f"session {session_id} not found")
        return session, lock

    def _check_overlap(self, session: UploadSession, offset: int,
                       data: bytes) -> None:
        end = offset + len(data)
        overlaps = [
            (max(offset, s), min(end, e))
            for s, e in session.received
            if s < end and e > offset
        ]
        if not overlaps:
            return
        with open(self._data_path(session.session_id), "rb") as fh:
            for s, e in overlaps:
                fh.seek(s)
                stored = fh.read(e - s)
                if stored != data[s - offset:e - offset]:
                    raise ChunkConflict(
                        f"bytes [{s}, {e}) differ from previously received data"
                    )

    def _hash_staged(self, session_id: str) -> str:
        digest = hashlib.sha256()
        with open(self._data_path(session_id), "rb") as fh:
            while True:
                block = fh.read(_HASH_CHUNK)
                if not block:
                    break
                digest.update(block)
        return digest.hexdigest()

    def _staging_key(self, session_id: str) -> str:
        return f"staging/{session_id}.part"

    def _data_path(self, session_id: str):
        return self.blobs.path_of(self._staging_key(session_id))

    def _manifest_path(self, session_id: str):
        return self.blobs.path_of(f"staging/{session_id}.json")

    def _save_manifest(self, session: UploadSession) -> None:
        path = self._manifest_path(session.session_id)
        tmp = path.with_suffix(".json.tmp")
        tmp.write_text(json.dumps(asdict(session)))
        tmp.replace(path)

    def _load_staged_sessions(self) -> None:
        for manifest in (self.blobs.root / "staging").glob("*.json"):
            try:
                raw = json.loads(manifest.read_text())
                session = UploadSession(**raw)
            except (ValueError, TypeError):
                continue
            self._sessions[session.session_id] = session
            self._session_locks[session.session_id] = threading.RLock()


def _merge_range(ranges: list[list[int]], start: int, end: int) -> None:
    """Insert [start, end) keeping the list sorted and coalesced."""
    ranges.append([start, end])
    ranges.sort()
    merged = [ranges[0]]
    for s, e in ranges[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    ranges[:] = merged


def sha256_hex(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()

"""Durable storage: a transactional record store and an immutable blob store.

Records live in a single SQLite file as versioned JSON documents.  Commits
are atomic and serialized per connection; every commit appends a journal row
inside the same transaction, so after a crash the surviving journal length
identifies exactly which prefix of the commit history the store recovered to.

Two uniqueness channels are enforced at the database level:
  unique_key  — identity uniqueness (usernames, normalized book titles)
  live_key    — state-dependent uniqueness (at most one live claim per book)
"""

from __future__ import annotations

import hashlib
import json
import os
import sqlite3
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

from . import domain
from .errors import IntegrityViolation, VersionConflict

LIVE_CLAIM_STATUSES = (domain.ClaimStatus.PENDING.value, domain.ClaimStatus.APPROVED.value)


@dataclass(frozen=True)
class Put:
    kind: str
    record_id: str
    data: dict
    expected_version: int | None = None  # None = create


@dataclass(frozen=True)
class Delete:
    kind: str
    record_id: str
    expected_version: int | None = None


Write = Put | Delete


@dataclass(frozen=True)
class TransactionScope:
    scope_id: str
    touched: frozenset[tuple[str, str]]


@dataclass(frozen=True)
class BlobRef:
    key: str
    size: int
    digest: str


def _unique_key(kind: str, data: dict) -> str | None:
    if kind == "account":
        return data["username"]
    if kind == "book":
        return domain.book_identity(data["title"], data["author"])
    if kind == "friend":
        return f"{data['owner']}:{data['friend']}"
    return None


def _live_key(kind: str, data: dict) -> str | None:
    if kind == "claim" and data["status"] in LIVE_CLAIM_STATUSES:
        return f"claim-live:{data['book_code']}"
    return None


class RecordStore:
    """Versioned JSON documents with atomic multi-record commits."""

    def __init__(self, path: str | os.PathLike = ":memory:"):
        self._path = str(path)
        self._write_lock = threading.RLock()
        self._conn = sqlite3.connect(self._path, check_same_thread=False)
        self._conn.isolation_level = None
        self._in_memory = self._path == ":memory:"
        if not self._in_memory:
            Path(self._path).parent.mkdir(parents=True, exist_ok=True)
            self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA synchronous=FULL")
        self._bootstrap()
        self._read_lock = threading.RLock()
        if self._in_memory:
            self._read_conn = self._conn
            self._read_lock = self._write_lock
        else:
            self._read_conn = sqlite3.connect(self._path, check_same_thread=False)
            self._read_conn.isolation_level = None

    def _bootstrap(self) -> None:
        with self._write_lock:
            self._conn.executescript(
                """
                CREATE TABLE IF NOT EXISTS records (
                    kind TEXT NOT NULL,
                    id TEXT NOT NULL,
                    version INTEGER NOT NULL,
                    unique_key TEXT,
                    live_key TEXT,
                    data TEXT NOT NULL,
                    PRIMARY KEY (kind, id)
                );
                CREATE UNIQUE INDEX IF NOT EXISTS idx_records_unique
                    ON records (kind, unique_key) WHERE unique_key IS NOT NULL;
                CREATE UNIQUE INDEX IF NOT EXISTS idx_records_live
                    ON records (live_key) WHERE live_key IS NOT NULL;
                CREATE TABLE IF NOT EXISTS journal (
                    seq INTEGER PRIMARY KEY AUTOINCREMENT,
                    scope_id TEXT NOT NULL,
                    touched TEXT NOT NULL
                );
                """
            )

    # -- write path ---------------------------------------------------------

    def commit(self, writes: Sequence[Write], scope_id: str = "") -> int:
        """Apply all writes atomically; returns the journal sequence number."""
        if not writes:
            raise IntegrityViolation("empty transaction scope")
        touched = frozenset((w.kind, w.record_id) for w in writes)
        scope = TransactionScope(scope_id or _auto_scope_id(touched), touched)
        with self._write_lock:
            cur = self._conn.cursor()
            cur.execute("BEGIN IMMEDIATE")
            try:
                for w in writes:
                    self._apply(cur, w)
                self._check_references(cur, writes)
                cur.execute(
                    "INSERT INTO journal (scope_id, touched) VALUES (?, ?)",
                    (scope.scope_id, json.dumps(sorted(scope.touched))),
                )
                seq = cur.lastrowid
                cur.execute("COMMIT")
                return seq
            except BaseException:
                cur.execute("ROLLBACK")
                raise

    def _apply(self, cur: sqlite3.Cursor, w: Write) -> None:
        row = cur.execute(
            "SELECT version FROM records WHERE kind=? AND id=?",
            (w.kind, w.record_id),
        ).fetchone()
        current = row[0] if row else None
        if isinstance(w, Delete):
            if current is None or (
                w.expected_version is not None and current != w.expected_version
            ):
                raise VersionConflict(
                    f"delete {w.kind}/{w.record_id}: have {current}, "
                    f"expected {w.expected_version}"
                )
            cur.execute(
                "DELETE FROM records WHERE kind=? AND id=?", (w.kind, w.record_id)
            )
            return
        if w.expected_version is None:
            if current is not None:
                raise VersionConflict(f"{w.kind}/{w.record_id} already exists")
            version = 1
        else:
            if current != w.expected_version:
                raise VersionConflict(
                    f"{w.kind}/{w.record_id}: have {current}, "
                    f"expected {w.expected_version}"
                )
            version = current + 1
        unique_key = _unique_key(w.kind, w.data)
        live_key = _live_key(w.kind, w.data)
        for column, value in (("unique_key", unique_key), ("live_key", live_key)):
            if value is None:
                continue
            clash = cur.execute(
                f"SELECT id FROM records WHERE kind=? AND {column}=? AND id<>?",
                (w.kind, value, w.record_id),
            ).fetchone()
            if clash:
                raise IntegrityViolation(
                    f"{column} {value!r} already held by {w.kind}/{clash[0]}",
                    key=value,
                    column=column,
                )
        try:
            cur.execute(
                "INSERT OR REPLACE INTO records (kind, id, version, unique_key,"
                " live_key, data) VALUES (?, ?, ?, ?, ?, ?)",
                (w.kind, w.record_id, version, unique_key, live_key,
                 json.dumps(w.data, ensure_ascii=False)),
            )
        except sqlite3.IntegrityError as exc:
            raise IntegrityViolation(str(exc)) from exc

    def _check_references(self, cur: sqlite3.Cursor, writes: Sequence[Write]) -> None:
        def exists(kind: str, record_id: Any) -> bool:
            return cur.execute(
                "SELECT 1 FROM records WHERE kind=? AND id=?",
                (kind, str(record_id)),
            ).fetchone() is not None

        def need(kind: str, record_id: Any, why: str) -> None:
            if record_id is not None and not exists(kind, record_id):
                raise IntegrityViolation(f"{why}: missing {kind} {record_id}")

        for w in writes:
            if isinstance(w, Delete):
                continue
            d = w.data
            if w.kind == "part":
                need("book", d["book_code"], "part references book")
            elif w.kind == "claim":
                need("book", d["book_code"], "claim references book")
                need("account", d["volunteer"], "claim references volunteer")
            elif w.kind == "playback":
                row = cur.execute(
                    "SELECT data FROM records WHERE kind='part' AND id=?",
                    (str(d["part_code"]),),
                ).fetchone()
                if row is None:
                    raise IntegrityViolation(
                        f"playback references missing part {d['part_code']}"
                    )
                if json.loads(row[0])["status"] != domain.PartStatus.APPROVED.value:
                    raise IntegrityViolation(
                        f"playback references non-approved part {d['part_code']}"
                    )
            elif w.kind == "message":
                need("account", d["from_id"], "message sender")
                need("account", d["to_id"], "message recipient")
            elif w.kind == "friend":
                need("account", d["owner"], "friend-link owner")
                need("account", d["friend"], "friend-link target")
            elif w.kind == "book":
                need("account", d.get("requested_by"), "book requester")
                need("account", d.get("assigned_reader"), "book reader")
            elif w.kind == "application":
                need("account", d.get("decided_by"), "application decider")

    # -- read path ----------------------------------------------------------

    def get(self, kind: str, record_id: Any) -> tuple[int, dict] | None:
        with self._read_lock:
            row = self._read_conn.execute(
                "SELECT version, data FROM records WHERE kind=? AND id=?",
                (kind, str(record_id)),
            ).fetchone()
        return (row[0], json.loads(row[1])) if row else None

    def find_unique(self, kind: str, unique_key: str) -> tuple[int, dict] | None:
        with self._read_lock:
            row = self._read_conn.execute(
                "SELECT version, data FROM records WHERE kind=? AND unique_key=?",
                (kind, unique_key),
            ).fetchone()
        return (row[0], json.loads(row[1])) if row else None

    def list_kind(self, kind: str) -> list[dict]:
        with self._read_lock:
            rows = self._read_conn.execute(
                "SELECT data FROM records WHERE kind=?", (kind,)
            ).fetchall()
        return [json.loads(r[0]) for r in rows]

    def snapshot(self) -> dict[str, dict[str, dict]]:
        """Point-in-time consistent view of every record, keyed kind → id."""
        with self._read_lock:
            cur = self._read_conn.cursor()
            cur.execute("BEGIN")
            try:
                rows = cur.execute("SELECT kind, id, data FROM records").fetchall()
            finally:
                cur.execute("COMMIT")
        view: dict[str, dict[str, dict]] = {}
        for kind, record_id, data in rows:
            view.setdefault(kind, {})[record_id] = json.loads(data)
        return view

    def journal_length(self) -> int:
        with self._read_lock:
            row = self._read_conn.execute("SELECT MAX(seq) FROM journal").fetchone()
        return row[0] or 0

    def close(self) -> None:
        with self._write_lock:
            self._conn.close()
        if not self._in_memory:
            with self._read_lock:
                self._read_conn.close()


def _auto_scope_id(touched: frozenset[tuple[str, str]]) -> str:
    digest = hashlib.sha256(repr(sorted(touched)).encode()).hexdigest()[:12]
    return f"scope-{digest}"


class LockManager:
    """Named mutexes giving per-aggregate serialization above the store."""

    def __init__(self):
        self._master = threading.Lock()
        self._locks: dict[str, threading.RLock] = {}

    def aggregate(self, kind: str, record_id: Any) -> threading.RLock:
        key = f"{kind}:{record_id}"
        with self._master:
            lock = self._locks.get(key)
            if lock is None:
                lock = self._locks[key] = threading.RLock()
            return lock


class BlobStore:
    """Content-addressed-ish immutable blobs under a fixed directory layout.

    books/{book_code}/parts/{part_code}.mp3 for published audio,
    staging/{session_id}.part (+ .json sidecar) for uploads in flight,
    trials/{application_id}.mp3 for vetting samples.
    """

    def __init__(self, root: str | os.PathLike):
        self.root = Path(root)
        for sub in ("staging", "books", "trials"):
            (self.root / sub).mkdir(parents=True, exist_ok=True)

    def path_of(self, key: str) -> Path:
        path = (self.root / key).resolve()
        if not path.is_relative_to(self.root.resolve()):
            raise IntegrityViolation(f"blob key escapes the store: {key}")
        return path

    def exists(self, key: str) -> bool:
        return self.path_of(key).is_file()

    def size(self, key: str) -> int:
        return self.path_of(key).stat().st_size

    def read(self, key: str, start: int = 0, length: int | None = None) -> bytes:
        with open(self.path_of(key), "rb") as fh:
            fh.seek(start)
            return fh.read() if length is None else fh.read(length)

    def write_trial(self, application_id: str, data: bytes) -> str:
        key = f"trials/{application_id}.mp3"
        path = self.path_of(key)
        path.write_bytes(data)
        return key

    def promote(self, staging_key: str, book_code: int, part_code: int) -> str:
        """Move a committed staging blob into its published location."""
        key = f"books/{book_code}/parts/{part_code}.mp3"
        dest = self.path_of(key)
        dest.parent.mkdir(parents=True, exist_ok=True)
        os.replace(self.path_of(staging_key), dest)
        return key

"""Stateful orchestration of the three-role lifecycle.

Every mutation takes the owning aggregate's lock, re-reads state, derives the
next status through the pure transition functions, and applies one atomic
commit.  Decisions are single-shot; replays surface AlreadyDecided without
touching state.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import asdict, dataclass
from pathlib import Path

from . import auth, domain
from .domain import (
    AccountStatus,
    ApplicationForm,
    ApplicationStatus,
    Book,
    BookEvent,
    BookStatus,
    ClaimStatus,
    Decision,
    MembershipApplication,
    Part,
    PartStatus,
    RecordingClaim,
    Role,
    UserAccount,
)
from .errors import (
    AlreadyDecided,
    ClaimConflict,
    DuplicateDemand,
    Forbidden,
    IntegrityViolation,
    NoApprovedParts,
    NotAssigned,
    NotAudio,
    NotFound,
    UsernameTaken,
    ValidationFailed,
    WrongState,
)
from .media import MediaStore
from .store import Delete, LockManager, Put, RecordStore

FIRST_BOOK_CODE = 3001


@dataclass(frozen=True)
class NotificationEvent:
    kind: str  # CredentialsIssued | ClaimDecided | PartDecided | PasswordReset
    recipient_email: str
    payload: dict


class OutboxSink:
    """Append-only notification outbox, one JSON event per line."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def emit(self, event: NotificationEvent) -> None:
        line = json.dumps(asdict(event), ensure_ascii=False)
        with self._lock, open(self.path, "a", encoding="utf-8") as fh:
            fh.write(line + "\n")


class ListSink:
    """In-process sink for tests."""

    def __init__(self):
        self.events: list[NotificationEvent] = []
        self._lock = threading.Lock()

    def emit(self, event: NotificationEvent) -> None:
        with self._lock:
            self.events.append(event)


class WorkflowService:
    def __init__(self, records: RecordStore, media: MediaStore, sink,
                 clock=time.time):
        self.records = records
        self.media = media
        self.sink = sink
        self.clock = clock
        self.locks = LockManager()
        self.transition_log: list[dict] = []
        self._log_lock = threading.Lock()

    # -- membership -----------------------------------------------------------

    def apply_for_membership(self, desired_role: Role | str, form: dict | ApplicationForm,
                             trial_recording: bytes | None = None) -> str:
        try:
            role = Role(desired_role)
        except ValueError:
            raise ValidationFailed(
                f"desired_role must be one of "
                f"{Role.VOLUNTEER.value!r}, {Role.IMPAIRED.value!r}"
            ) from None
        if isinstance(form, dict):
            form = ApplicationForm(
                name=str(form.get("name", "")),
                email=str(form.get("email", "")),
                username=str(form.get("username", "")),
            )
        verdict = domain.validate_application(role, form, trial_recording is not None)
        if not verdict:
            raise ValidationFailed("; ".join(verdict.reasons), reasons=verdict.reasons)
        if self.records.find_unique("account", form.username) is not None:
            raise UsernameTaken(form.username)
        application = MembershipApplication(
            application_id=uuid.uuid4().hex,
            desired_role=role,
            form=form,
            created_at=self.clock(),
        )
        if trial_recording is not None:
            application.trial_blob = self.media.blobs.write_trial(
                application.application_id, trial_recording
            )
        self.records.commit(
            [Put("application", application.application_id, asdict(application))],
            scope_id=f"apply:{application.application_id}",
        )
        return application.application_id

    def review_application(self, admin_id: str, application_id: str,
                           decision: Decision | str) -> dict:
        admin = self._require_role(admin_id, Role.ADMIN)
        decision = Decision(decision)
        with self.locks.aggregate("application", application_id):
            found = self.records.get("application", application_id)
            if found is None:
                raise NotFound(f"application {application_id}")
            version, app = found
            if app["status"] != ApplicationStatus.SUBMITTED.value:
                raise AlreadyDecided(f"application is {app['status']}")
            app["decided_by"] = admin["account_id"]
            app["decided_at"] = self.clock()
            if decision is Decision.REJECT:
                app["status"] = ApplicationStatus.REJECTED.value
                self.records.commit(
                    [Put("application", application_id, app, version)],
                    scope_id=f"review-app:{application_id}",
                )
                return {"application_id": application_id, "status": app["status"]}
            password = auth.generate_password()
            account = UserAccount(
                account_id=uuid.uuid4().hex,
                username=app["form"]["username"],
                password_digest=auth.hash_password(password),
                email=app["form"]["email"],
                role=Role(app["desired_role"]),
                created_at=self.clock(),
            )
            app["status"] = ApplicationStatus.APPROVED.value
            try:
                self.records.commit(
                    [
                        Put("account", account.account_id, asdict(account)),
                        Put("application", application_id, app, version),
                    ],
                    scope_id=f"review-app:{application_id}",
                )
            except IntegrityViolation as exc:
                if exc.data.get("column") == "unique_key":
                    raise UsernameTaken(account.username) from exc
                raise
        self.sink.emit(NotificationEvent(
            kind="CredentialsIssued",
            recipient_email=account.email,
            payload={"username": account.username, "password": password},
        ))
        return {
            "application_id": application_id,
            "status": app["status"],
            "account_id": account.account_id,
            "username": account.username,
            "password": password,
        }

    def create_account(self, username: str, password: str, email: str,
                       role: Role | str) -> str:
        """Direct account creation for bootstrap seeding (no vetting)."""
        account = UserAccount(
            account_id=uuid.uuid4().hex,
            username=username,
            password_digest=auth.hash_password(password),
            email=email,
            role=Role(role),
            created_at=self.clock(),
        )
        try:
            self.records.commit(
                [Put("account", account.account_id, asdict(account))],
                scope_id=f"seed:{username}",
            )
        except IntegrityViolation as exc:
            raise UsernameTaken(username) from exc
        return account.account_id

    # -- demand and claims ------------------------------------------------------

    def request_book(self, caller_id: str, title: str, author: str) -> int:
        caller = self._require_role(caller_id, Role.IMPAIRED)
        title, author = title.strip(), author.strip()
        if not title or not author:
            raise ValidationFailed("title and author are required")
        identity = domain.book_identity(title, author)
        existing = self.records.find_unique("book", identity)
        if existing is not None:
            raise DuplicateDemand(
                f"already requested as book {existing[1]['book_code']}",
                book_code=existing[1]["book_code"],
            )
        with self.locks.aggregate("counter", "book_code"):
            book_code = self._next_book_code()
            book = Book(
                book_code=book_code,
                title=title,
                author=author,
                requested_by=caller["account_id"],
                status=BookStatus.REQUESTED,
                created_at=self.clock(),
            )
            try:
                self.records.commit(
                    [Put("book", str(book_code), asdict(book))],
                    scope_id=f"request-book:{book_code}",
                )
            except IntegrityViolation as exc:
                if exc.data.get("column") == "unique_key":
                    other = self.records.find_unique("book", identity)
                    code = other[1]["book_code"] if other else None
                    raise DuplicateDemand(
                        f"already requested as book {code}", book_code=code
                    ) from exc
                raise
        return book_code

    def claim_recording(self, caller_id: str, book_code: int) -> str:
        caller = self._require_role(caller_id, Role.VOLUNTEER)
        with self.locks.aggregate("book", book_code):
            version, book = self._get_book(book_code)
            status = BookStatus(book["status"])
            if status in (BookStatus.CLAIM_PENDING, BookStatus.IN_RECORDING):
                raise ClaimConflict(f"book {book_code} already has a live claim")
            if status is not BookStatus.REQUESTED:
                raise WrongState(f"book {book_code} is {status.value}")
            claim = RecordingClaim(
                claim_id=uuid.uuid4().hex,
                book_code=book_code,
                volunteer=caller["account_id"],
                created_at=self.clock(),
            )
            book["status"] = domain.next_book_status(
                status, BookEvent.CLAIM_FILED
            ).value
            try:
                self.records.commit(
                    [
                        Put("claim", claim.claim_id, asdict(claim)),
                        Put("book", str(book_code), book, version),
                    ],
                    scope_id=f"claim:{claim.claim_id}",
                )
            except IntegrityViolation as exc:
                if exc.data.get("column") == "live_key":
                    raise ClaimConflict(str(exc)) from exc
                raise
            self._log("claim", claim.claim_id, "Filed", None,
                      ClaimStatus.PENDING.value, book_code=book_code)
            self._log("book", book_code, BookEvent.CLAIM_FILED.value,
                      status.value, book["status"])
        return claim.claim_id

    def review_claim(self, admin_id: str, claim_id: str,
                     decision: Decision | str) -> dict:
        admin = self._require_role(admin_id, Role.ADMIN)
        decision = Decision(decision)
        found = self.records.get("claim", claim_id)
        if found is None:
            raise NotFound(f"claim {claim_id}")
        book_code = found[1]["book_code"]
        with self.locks.aggregate("book", book_code):
            claim_version, claim = self.records.get("claim", claim_id)
            if claim["status"] != ClaimStatus.PENDING.value:
                raise AlreadyDecided(f"claim is {claim['status']}")
            book_version, book = self._get_book(book_code)
            old_book_status = BookStatus(book["status"])
            if decision is Decision.APPROVE:
                event = BookEvent.CLAIM_APPROVED
                claim["status"] = ClaimStatus.APPROVED.value
                book["assigned_reader"] = claim["volunteer"]
            else:
                event = BookEvent.CLAIM_REJECTED
                claim["status"] = ClaimStatus.REJECTED.value
                book["assigned_reader"] = None
            claim["decided_by"] = admin["account_id"]
            claim["decided_at"] = self.clock()
            book["status"] = domain.next_book_status(old_book_status, event).value
            self.records.commit(
                [
                    Put("claim", claim_id, claim, claim_version),
                    Put("book", str(book_code), book, book_version),
                ],
                scope_id=f"review-claim:{claim_id}",
            )
            self._log("claim", claim_id, decision.value,
                      ClaimStatus.PENDING.value, claim["status"],
                      book_code=book_code)
            self._log("book", book_code, event.value,
                      old_book_status.value, book["status"])
        volunteer = self.records.get("account", claim["volunteer"])
        if volunteer is not None:
            self.sink.emit(NotificationEvent(
                kind="ClaimDecided",
                recipient_email=volunteer[1]["email"],
                payload={"claim_id": claim_id, "book_code": book_code,
                         "decision": decision.value},
            ))
        return {"claim_id": claim_id, "status": claim["status"],
                "book_status": book["status"]}

    # -- parts ---------------------------------------------------------------------

    def submit_part(self, caller_id: str, book_code: int, part_name: str,
                    session_id: str) -> int:
        caller = self._require_role(caller_id, Role.VOLUNTEER)
        with self.locks.aggregate("book", book_code):
            book_version, book = self._get_book(book_code)
            if BookStatus(book["status"]) is not BookStatus.IN_RECORDING:
                raise WrongState(f"book {book_code} is {book['status']}")
            if book["assigned_reader"] != caller["account_id"]:
                raise NotAssigned(f"book {book_code} is assigned to another reader")
            blob = self.media.take_completed_blob(session_id, caller["account_id"])
            seq = self._next_part_seq(book_code)
            part_code = domain.derive_part_code(book_code, seq)
            try:
                probe = self.media.probe_blob(blob.key)
                duration = probe.duration_seconds
            except NotAudio:
                duration = None
            published_key = self.media.blobs.promote(blob.key, book_code, part_code)
            part = Part(
                book_code=book_code,
                part_code=part_code,
                part_name=part_name.strip() or f"Part {seq}",
                duration_seconds=duration,
                added_at=self.clock(),
                submitted_by=caller["account_id"],
                blob=published_key,
            )
            self.records.commit(
                [Put("part", str(part_code), asdict(part))],
                scope_id=f"submit-part:{part_code}",
            )
            self.media.drop_session(session_id)
            self._log("part", part_code, "Submitted", None,
                      PartStatus.PENDING_APPROVAL.value, book_code=book_code)
        return part_code

    def review_part(self, admin_id: str, part_code: int,
                    decision: Decision | str) -> dict:
        admin = self._require_role(admin_id, Role.ADMIN)
        decision = Decision(decision)
        with self.locks.aggregate("part", part_code):
            found = self.records.get("part", part_code)
            if found is None:
                raise NotFound(f"part {part_code}")
            version, part = found
            old_status = PartStatus(part["status"])
            if old_status is not PartStatus.PENDING_APPROVAL:
                raise AlreadyDecided(f"part is {old_status.value}")
            new_status = domain.next_part_status(old_status, decision)
            part["status"] = new_status.value
            part["decided_by"] = admin["account_id"]
            part["decided_at"] = self.clock()
            self.records.commit(
                [Put("part", str(part_code), part, version)],
                scope_id=f"review-part:{part_code}",
            )
            self._log("part", part_code, decision.value,
                      old_status.value, new_status.value,
                      book_code=part["book_code"])
        volunteer = self.records.get("account", part["submitted_by"])
        if volunteer is not None:
            self.sink.emit(NotificationEvent(
                kind="PartDecided",
                recipient_email=volunteer[1]["email"],
                payload={"part_code": part_code, "decision": decision.value},
            ))
        return {"part_code": part_code, "status": part["status"]}

    def mark_book_complete(self, admin_id: str, book_code: int) -> dict:
        self._require_role(admin_id, Role.ADMIN)
        with self.locks.aggregate("book", book_code):
            version, book = self._get_book(book_code)
            status = BookStatus(book["status"])
            if status is not BookStatus.IN_RECORDING:
                raise WrongState(f"book {book_code} is {status.value}")
            approved = [
                p for p in self.records.list_kind("part")
                if p["book_code"] == book_code
                and p["status"] == PartStatus.APPROVED.value
            ]
            if not approved:
                raise NoApprovedParts(f"book {book_code} has no approved parts")
            book["status"] = domain.next_book_status(
                status, BookEvent.MARKED_COMPLETE
            ).value
            self.records.commit(
                [Put("book", str(book_code), book, version)],
                scope_id=f"complete:{book_code}",
            )
            self._log("book", book_code, BookEvent.MARKED_COMPLETE.value,
                      status.value, book["status"])
        return {"book_code": book_code, "status": book["status"]}

    # -- moderation queue -------------------------------------------------------

    def list_pending_reviews(self, admin_id: str) -> dict:
        self._require_role(admin_id, Role.ADMIN)
        applications = sorted(
            (a for a in self.records.list_kind("application")
             if a["status"] == ApplicationStatus.SUBMITTED.value),
            key=lambda a: (a["created_at"], a["application_id"]),
        )
        claims = sorted(
            (c for c in self.records.list_kind("claim")
             if c["status"] == ClaimStatus.PENDING.value),
            key=lambda c: (c["created_at"], c["claim_id"]),
        )
        parts = sorted(
            (p for p in self.records.list_kind("part")
             if p["status"] == PartStatus.PENDING_APPROVAL.value),
            key=lambda p: (p["added_at"], p["part_code"]),
        )
        return {"applications": applications, "claims": claims, "parts": parts}

    # -- internals -----------------------------------------------------------------

    def account(self, account_id: str) -> dict | None:
        found = self.records.get("account", account_id)
        return found[1] if found else None

    def _require_role(self, account_id: str, role: Role) -> dict:
        account = self.account(account_id)
        if account is None or account["status"] != AccountStatus.ACTIVE.value:
            raise Forbidden("caller is not an active account")
        if account["role"] != role.value:
            raise Forbidden(f"requires role {role.value}")
        return account

    def _get_book(self, book_code: int) -> tuple[int, dict]:
        found = self.records.get("book", book_code)
        if found is None:
            raise NotFound(f"book {book_code}")
        return found

    def _next_book_code(self) -> int:
        found = self.records.get("counter", "book_code")
        if found is None:
            self.records.commit(
                [Put("counter", "book_code", {"value": FIRST_BOOK_CODE})],
                scope_id="counter-init",
            )
            return FIRST_BOOK_CODE
        version, counter = found
        counter["value"] += 1
        self.records.commit(
            [Put("counter", "book_code", counter, version)],
            scope_id=f"counter:{counter['value']}",
        )
        return counter["value"]

    def _next_part_seq(self, book_code: int) -> int:
        seqs = [
            domain.decode_part_code(p["part_code"])[1]
            for p in self.records.list_kind("part")
            if p["book_code"] == book_code
        ]
        return max(seqs, default=0) + 1

    def _log(self, kind: str, ref, event: str, src, dst, book_code=None) -> None:
        with self._log_lock:
            self.transition_log.append({
                "seq": len(self.transition_log),
                "kind": kind,
                "ref": ref,
                "event": event,
                "from": src,
                "to": dst,
                "book_code": book_code,
            })

"""Pure domain types, identifier scheme, and lifecycle transition functions.

Nothing in this module touches storage or transport; everything is a value
or a pure function, safe to call from any thread.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from .errors import IllegalTransition, InvalidSequence


class Role(str, Enum):
    VOLUNTEER = "Volunteer"
    IMPAIRED = "Impaired"
    ADMIN = "Admin"


class AccountStatus(str, Enum):
    ACTIVE = "Active"
    DISABLED = "Disabled"


class ApplicationStatus(str, Enum):
    SUBMITTED = "Submitted"
    APPROVED = "Approved"
    REJECTED = "Rejected"


class BookStatus(str, Enum):
    REQUESTED = "Requested"
    CLAIM_PENDING = "ClaimPending"
    IN_RECORDING = "InRecording"
    COMPLETED = "Completed"


class BookEvent(str, Enum):
    CLAIM_FILED = "ClaimFiled"
    CLAIM_APPROVED = "ClaimApproved"
    CLAIM_REJECTED = "ClaimRejected"
    MARKED_COMPLETE = "MarkedComplete"


class ClaimStatus(str, Enum):
    PENDING = "Pending"
    APPROVED = "Approved"
    REJECTED = "Rejected"


class PartStatus(str, Enum):
    PENDING_APPROVAL = "PendingApproval"
    APPROVED = "Approved"
    REJECTED = "Rejected"


class Decision(str, Enum):
    APPROVE = "Approve"
    REJECT = "Reject"


@dataclass
class UserAccount:
    account_id: str
    username: str
    password_digest: str
    email: str
    role: Role
    status: AccountStatus = AccountStatus.ACTIVE
    created_at: float = 0.0


@dataclass
class ApplicationForm:
    name: str
    email: str
    username: str


@dataclass
class MembershipApplication:
    application_id: str
    desired_role: Role
    form: ApplicationForm
    trial_blob: str | None = None
    status: ApplicationStatus = ApplicationStatus.SUBMITTED
    decided_by: str | None = None
    created_at: float = 0.0
    decided_at: float | None = None


@dataclass
class Book:
    book_code: int
    title: str
    author: str
    requested_by: str | None = None
    assigned_reader: str | None = None
    status: BookStatus = BookStatus.REQUESTED
    created_at: float = 0.0


@dataclass
class RecordingClaim:
    claim_id: str
    book_code: int
    volunteer: str
    status: ClaimStatus = ClaimStatus.PENDING
    created_at: float = 0.0
    decided_by: str | None = None
    decided_at: float | None = None


@dataclass
class Part:
    book_code: int
    part_code: int
    part_name: str
    duration_seconds: float | None
    added_at: float
    submitted_by: str
    blob: str
    status: PartStatus = PartStatus.PENDING_APPROVAL
    decided_by: str | None = None
    decided_at: float | None = None


@dataclass(frozen=True)
class Verdict:
    """Outcome of a validity check; never raised, always returned."""

    ok: bool
    reasons: tuple[str, ...] = field(default=())

    def __bool__(self) -> bool:
        return self.ok


MAX_PARTS_PER_BOOK = 90

# part codes append two digits to the book code; digit pairs 10..99 keep the
# encoding decodable, which caps a book at 90 parts
_SEQ_OFFSET = 9


def derive_part_code(book_code: int, seq: int) -> int:
    """Encode (book, sequence) into the site's single part identifier."""
    if book_code <= 0:
        raise InvalidSequence(f"book_code must be positive, got {book_code}")
    if not 1 <= seq <= MAX_PARTS_PER_BOOK:
        raise InvalidSequence(
            f"part sequence {seq} outside [1, {MAX_PARTS_PER_BOOK}]"
        )
    return book_code * 100 + _SEQ_OFFSET + seq


def decode_part_code(part_code: int) -> tuple[int, int]:
    """Invert derive_part_code; raises InvalidSequence for malformed codes."""
    book_code, digits = divmod(part_code, 100)
    seq = digits - _SEQ_OFFSET
    if book_code <= 0 or not 1 <= seq <= MAX_PARTS_PER_BOOK:
        raise InvalidSequence(f"{part_code} is not a valid part code")
    return book_code, seq


_BOOK_TRANSITIONS = {
    (BookStatus.REQUESTED, BookEvent.CLAIM_FILED): BookStatus.CLAIM_PENDING,
    (BookStatus.CLAIM_PENDING, BookEvent.CLAIM_APPROVED): BookStatus.IN_RECORDING,
    (BookStatus.CLAIM_PENDING, BookEvent.CLAIM_REJECTED): BookStatus.REQUESTED,
    (BookStatus.IN_RECORDING, BookEvent.MARKED_COMPLETE): BookStatus.COMPLETED,
}


def next_book_status(current: BookStatus, event: BookEvent) -> BookStatus:
    """Total transition function for book lifecycle; illegal pairs raise."""
    try:
        return _BOOK_TRANSITIONS[(BookStatus(current), BookEvent(event))]
    except KeyError:
        raise IllegalTransition(f"book cannot take {event} while {current}") from None


def next_part_status(current: PartStatus, decision: Decision) -> PartStatus:
    """Part moderation admits exactly one decision, ever."""
    if PartStatus(current) is PartStatus.PENDING_APPROVAL:
        return (
            PartStatus.APPROVED
            if Decision(decision) is Decision.APPROVE
            else PartStatus.REJECTED
        )
    raise IllegalTransition(f"part already decided ({current})")


def validate_application(
    desired_role: Role,
    form: ApplicationForm,
    has_trial_recording: bool,
) -> Verdict:
    """Check an application before it is accepted into the vetting queue."""
    reasons = []
    if not form.name.strip():
        reasons.append("NameRequired")
    if not form.email.strip():
        reasons.append("EmailRequired")
    if not form.username.strip():
        reasons.append("UsernameRequired")
    if Role(desired_role) is Role.VOLUNTEER and not has_trial_recording:
        reasons.append("TrialRecordingRequired")
    if Role(desired_role) is Role.ADMIN:
        reasons.append("RoleNotApplicable")
    return Verdict(ok=not reasons, reasons=tuple(reasons))


_WS = re.compile(r"\s+")


def normalize_text(value: str) -> str:
    """Case-fold and collapse whitespace; the matching key for titles/authors.

    Turkish dotted/dotless i pairs (İ/i and I/ı) all fold to plain "i" so
    ASCII and Turkish keyboards agree on the same key.
    """
    folded = _WS.sub(" ", value.strip()).casefold()
    return folded.replace("̇", "").replace("ı", "i")


def book_identity(title: str, author: str) -> str:
    """Uniqueness key implementing the one-recording-per-book rule."""
    return normalize_text(title) + "\x1f" + normalize_text(author)

"""Error taxonomy shared by all modules.

Every failure a caller can act on is a DomainError subclass with a stable
``code`` (what the API returns on the wire) and a default HTTP status.
"""

from __future__ import annotations


class DomainError(Exception):
    code = "DomainError"
    http_status = 400

    def __init__(self, detail: str = "", **data):
        super().__init__(detail or self.code)
        self.detail = detail or self.code
        self.data = data


# --- pure domain ---------------------------------------------------------

class InvalidSequence(DomainError):
    code = "InvalidSequence"


class IllegalTransition(DomainError):
    code = "IllegalTransition"
    http_status = 409


class ValidationFailed(DomainError):
    code = "ValidationFailed"


# --- accounts / vetting --------------------------------------------------

class UsernameTaken(DomainError):
    code = "UsernameTaken"
    http_status = 409


class Forbidden(DomainError):
    code = "Forbidden"
    http_status = 403


class AuthRequired(DomainError):
    code = "AuthRequired"
    http_status = 401


class AuthFailed(DomainError):
    code = "AuthFailed"
    http_status = 401


class AccountDisabled(DomainError):
    code = "AccountDisabled"
    http_status = 403


class SessionExpired(DomainError):
    code = "SessionExpired"
    http_status = 401


class WeakPassword(DomainError):
    code = "WeakPassword"


class AlreadyDecided(DomainError):
    code = "AlreadyDecided"
    http_status = 409


# --- books / claims / parts ----------------------------------------------

class DuplicateDemand(DomainError):
    code = "DuplicateDemand"
    http_status = 409


class WrongState(DomainError):
    code = "WrongState"
    http_status = 409


class ClaimConflict(DomainError):
    code = "ClaimConflict"
    http_status = 409


class NotAssigned(DomainError):
    code = "NotAssigned"
    http_status = 403


class NoApprovedParts(DomainError):
    code = "NoApprovedParts"
    http_status = 409


class NotFound(DomainError):
    code = "NotFound"
    http_status = 404


# --- uploads / media ------------------------------------------------------

class SizeRejected(DomainError):
    code = "SizeRejected"
    http_status = 413


class BadChecksumFormat(DomainError):
    code = "BadChecksumFormat"


class NoSuchSession(DomainError):
    code = "NoSuchSession"
    http_status = 404


class RangeRejected(DomainError):
    code = "RangeRejected"
    http_status = 416


class ChunkConflict(DomainError):
    code = "ChunkConflict"
    http_status = 409


class UploadIncomplete(DomainError):
    code = "UploadIncomplete"
    http_status = 409


class ChecksumMismatch(DomainError):
    code = "ChecksumMismatch"
    http_status = 409


class BlobMissing(DomainError):
    code = "BlobMissing"
    http_status = 404


class NotAudio(DomainError):
    code = "NotAudio"
    http_status = 422


class NotPublished(DomainError):
    code = "NotPublished"
    http_status = 404


# --- community ------------------------------------------------------------

class NoSuchUser(DomainError):
    code = "NoSuchUser"
    http_status = 404


class SelfMessage(DomainError):
    code = "SelfMessage"


class BodyTooLarge(DomainError):
    code = "BodyTooLarge"
    http_status = 413


class Duplicate(DomainError):
    code = "Duplicate"
    http_status = 409


class SelfFriend(DomainError):
    code = "SelfFriend"


class BadUrl(DomainError):
    code = "BadUrl"


class EmptyQuery(DomainError):
    code = "EmptyQuery"


class RateLimited(DomainError):
    code = "RateLimited"
    http_status = 429


# --- persistence -----------------------------------------------------------

class VersionConflict(DomainError):
    code = "VersionConflict"
    http_status = 409


class IntegrityViolation(DomainError):
    code = "IntegrityViolation"
    http_status = 409

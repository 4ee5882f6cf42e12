"""Password digests and bearer-token sessions."""

from __future__ import annotations

import hashlib
import hmac
import secrets
import string
import threading
import time
from dataclasses import dataclass

from .errors import SessionExpired

_PBKDF2_ITERATIONS = 60_000
_PASSWORD_ALPHABET = string.ascii_letters + string.digits
MIN_PASSWORD_LENGTH = 8


def hash_password(password: str) -> str:
    salt = secrets.token_hex(16)
    digest = hashlib.pbkdf2_hmac(
        "sha256", password.encode(), bytes.fromhex(salt), _PBKDF2_ITERATIONS
    ).hex()
    return f"pbkdf2-sha256${_PBKDF2_ITERATIONS}${salt}${digest}"


def verify_password(password: str, stored: str) -> bool:
    try:
        _, iterations, salt, digest = stored.split("$")
        computed = hashlib.pbkdf2_hmac(
            "sha256", password.encode(), bytes.fromhex(salt), int(iterations)
        ).hex()
    except (ValueError, TypeError):
        return False
    return hmac.compare_digest(computed, digest)


def generate_password(length: int = 12) -> str:
    return "".join(secrets.choice(_PASSWORD_ALPHABET) for _ in range(length))


@dataclass
class Session:
    token: str
    account_id: str
    role: str
    created_at: float
    expires_at: float


class SessionStore:
    """In-memory bearer tokens; one logout invalidates exactly one token."""

    def __init__(self, ttl_hours: float = 24.0, clock=time.time):
        self.ttl_seconds = ttl_hours * 3600.0
        self.clock = clock
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def create(self, account_id: str, role: str) -> Session:
        now = self.clock()
        session = Session(
            token=secrets.token_urlsafe(16),  # 128 bits
            account_id=account_id,
            role=role,
            created_at=now,
            expires_at=now + self.ttl_seconds,
        )
        with self._lock:
            self._sessions[session.token] = session
        return session

    def resolve(self, token: str) -> Session | None:
        """The live session for a token; expired tokens raise, unknown → None."""
        with self._lock:
            session = self._sessions.get(token)
            if session is None:
                return None
            if session.expires_at <= self.clock():
                del self._sessions[token]
                raise SessionExpired("session expired")
            return session

    def invalidate(self, token: str) -> bool:
        with self._lock:
            return self._sessions.pop(token, None) is not None

    def invalidate_account(self, account_id: str, keep_token: str | None = None) -> int:
        """Drop every session of an account except, optionally, the caller's."""
        with self._lock:
            doomed = [
                t for t, s in self._sessions.items()
                if s.account_id == account_id and t != keep_token
            ]
            for t in doomed:
                del self._sessions[t]
            return len(doomed)

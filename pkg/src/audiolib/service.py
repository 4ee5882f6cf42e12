"""Composition root: wires storage, services, sessions, and account self-service."""

from __future__ import annotations

import time
import uuid
from pathlib import Path

from . import auth
from .auth import SessionStore
from .catalog import CatalogService
from .community import CommunityService
from .config import ServiceConfig
from .domain import AccountStatus, Role
from .errors import (
    AccountDisabled,
    AuthFailed,
    NotFound,
    UsernameTaken,
    ValidationFailed,
    WeakPassword,
)
from .media import MediaStore
from .store import BlobStore, Put, RecordStore
from .workflow import NotificationEvent, OutboxSink, WorkflowService

RESET_TOKEN_TTL = 3600.0


class AppContext:
    """Everything one running service instance needs, built from config."""

    def __init__(self, config: ServiceConfig, clock=time.time):
        self.config = config
        self.clock = clock
        data_dir = Path(config.data_dir)
        data_dir.mkdir(parents=True, exist_ok=True)
        self.records = RecordStore(data_dir / "records.db")
        self.blobs = BlobStore(data_dir / "blobs")
        self.outbox = OutboxSink(config.resolved_outbox())
        self.media = MediaStore(self.blobs, self.records,
                                config.max_upload_bytes, clock=clock)
        self.workflow = WorkflowService(self.records, self.media, self.outbox,
                                        clock=clock)
        self.catalog = CatalogService(self.records, self.media)
        self.community = CommunityService(self.records, clock=clock)
        self.sessions = SessionStore(config.session_ttl_hours, clock=clock)
        self.seeded_admin_password: str | None = None
        self._bootstrap_admin()

    def _bootstrap_admin(self) -> None:
        has_admin = any(
            a["role"] == Role.ADMIN.value
            for a in self.records.list_kind("account")
        )
        if has_admin:
            return
        password = self.config.seed_admin_password or auth.generate_password()
        self.workflow.create_account(
            username=self.config.seed_admin_username,
            password=password,
            email="admin@localhost",
            role=Role.ADMIN,
        )
        self.seeded_admin_password = password
        self.outbox.emit(NotificationEvent(
            kind="CredentialsIssued",
            recipient_email="admin@localhost",
            payload={"username": self.config.seed_admin_username,
                     "password": password},
        ))

    # -- credential operations --------------------------------------------------

    def login(self, username: str, password: str) -> auth.Session:
        found = self.records.find_unique("account", str(username))
        if found is None or not auth.verify_password(
                str(password), found[1]["password_digest"]):
            raise AuthFailed("invalid credentials")  # uniform: no enumeration
        account = found[1]
        if account["status"] != AccountStatus.ACTIVE.value:
            raise AccountDisabled("account is disabled")
        return self.sessions.create(account["account_id"], account["role"])

    def logout(self, token: str) -> bool:
        return self.sessions.invalidate(token)

    def change_credentials(self, session: auth.Session,
                           new_username: str | None = None,
                           new_password: str | None = None) -> dict:
        if new_username is None and new_password is None:
            raise ValidationFailed("nothing to change")
        found = self.records.get("account", session.account_id)
        if found is None:
            raise NotFound("account vanished")
        version, account = found
        if new_username is not None:
            new_username = new_username.strip()
            if not new_username:
                raise ValidationFailed("username is empty")
            other = self.records.find_unique("account", new_username)
            if other is not None and other[1]["account_id"] != session.account_id:
                raise UsernameTaken(new_username)
            account["username"] = new_username
        if new_password is not None:
            if len(new_password) < auth.MIN_PASSWORD_LENGTH:
                raise WeakPassword(
                    f"password must be at least {auth.MIN_PASSWORD_LENGTH} characters"
                )
            account["password_digest"] = auth.hash_password(new_password)
        self.records.commit(
            [Put("account", session.account_id, account, version)],
            scope_id=f"credentials:{session.account_id}",
        )
        dropped = self.sessions.invalidate_account(
            session.account_id, keep_token=session.token
        )
        return {"username": account["username"], "sessions_invalidated": dropped}

    def request_password_reset(self, username_or_email: str) -> None:
        """Single-use reset token to the outbox; silent for unknown names."""
        account = None
        found = self.records.find_unique("account", username_or_email)
        if found is not None:
            account = found[1]
        else:
            for a in self.records.list_kind("account"):
                if a["email"] == username_or_email:
                    account = a
                    break
        if account is None or account["status"] != AccountStatus.ACTIVE.value:
            return
        token = uuid.uuid4().hex
        self.records.commit([
            Put("reset", token, {
                "token": token,
                "account_id": account["account_id"],
                "created_at": self.clock(),
                "used": False,
            }),
        ], scope_id=f"reset:{token}")
        self.outbox.emit(NotificationEvent(
            kind="PasswordReset",
            recipient_email=account["email"],
            payload={"username": account["username"], "reset_token": token},
        ))

    def confirm_password_reset(self, token: str, new_password: str) -> None:
        found = self.records.get("reset", token)
        if found is None:
            raise AuthFailed("invalid reset token")
        version, reset = found
        if reset["used"] or self.clock() - reset["created_at"] > RESET_TOKEN_TTL:
            raise AuthFailed("invalid reset token")
        if len(new_password) < auth.MIN_PASSWORD_LENGTH:
            raise WeakPassword(
                f"password must be at least {auth.MIN_PASSWORD_LENGTH} characters"
            )
        account_found = self.records.get("account", reset["account_id"])
        if account_found is None:
            raise AuthFailed("invalid reset token")
        account_version, account = account_found
        account["password_digest"] = auth.hash_password(new_password)
        reset["used"] = True
        self.records.commit(
            [
                Put("account", reset["account_id"], account, account_version),
                Put("reset", token, reset, version),
            ],
            scope_id=f"reset-confirm:{token}",
        )
        self.sessions.invalidate_account(reset["account_id"])

    def close(self) -> None:
        self.records.close()

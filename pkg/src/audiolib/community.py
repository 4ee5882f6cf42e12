"""Messaging, friend lists, the visitors' guestbook, and published items."""

from __future__ import annotations

import time
import uuid
from urllib.parse import urlparse

from .domain import AccountStatus, Role
from .errors import (
    BadUrl,
    BodyTooLarge,
    Duplicate,
    EmptyQuery,
    Forbidden,
    NoSuchUser,
    NotFound,
    RateLimited,
    SelfFriend,
    SelfMessage,
    ValidationFailed,
)
from .store import Delete, Put, RecordStore

MESSAGE_BODY_LIMIT = 4096
GUESTBOOK_BODY_LIMIT = 2000
GUESTBOOK_MIN_INTERVAL = 60.0
ITEM_KINDS = ("News", "Announcement", "Link")


class CommunityService:
    def __init__(self, records: RecordStore, clock=time.time):
        self.records = records
        self.clock = clock

    # -- messages -------------------------------------------------------------

    def send_message(self, from_id: str, to_id: str, body: str) -> str:
        sender = self._active_account(from_id)
        recipient = self._active_account(to_id)
        if sender["account_id"] == recipient["account_id"]:
            raise SelfMessage("cannot message yourself")
        if not body.strip():
            raise ValidationFailed("message body is empty")
        if len(body) > MESSAGE_BODY_LIMIT:
            raise BodyTooLarge(f"body exceeds {MESSAGE_BODY_LIMIT} characters")
        message_id = uuid.uuid4().hex
        self.records.commit([
            Put("message", message_id, {
                "message_id": message_id,
                "from_id": sender["account_id"],
                "to_id": recipient["account_id"],
                "body": body,
                "sent_at": self.clock(),
                "read": False,
            }),
        ], scope_id=f"message:{message_id}")
        return message_id

    def list_inbox(self, caller_id: str, mark_read: bool = False) -> dict:
        messages = [
            m for m in self.records.list_kind("message")
            if m["to_id"] == caller_id
        ]
        messages.sort(key=lambda m: (-m["sent_at"], m["message_id"]))
        unread = sum(1 for m in messages if not m["read"])
        if mark_read:
            for m in messages:
                if m["read"]:
                    continue
                found = self.records.get("message", m["message_id"])
                if found is None:
                    continue
                version, data = found
                data["read"] = True
                self.records.commit(
                    [Put("message", m["message_id"], data, version)],
                    scope_id=f"read:{m['message_id']}",
                )
                m["read"] = True
        return {"messages": messages, "unread": unread}

    def resolve_username(self, username: str) -> dict:
        found = self.records.find_unique("account", username)
        if found is None:
            raise NoSuchUser(username)
        return found[1]

    # -- friends ---------------------------------------------------------------

    def add_friend(self, owner_id: str, friend_id: str) -> dict:
        owner = self._active_account(owner_id)
        friend = self._active_account(friend_id)
        if owner["account_id"] == friend["account_id"]:
            raise SelfFriend("cannot befriend yourself")
        link_id = f"{owner['account_id']}:{friend['account_id']}"
        if self.records.get("friend", link_id) is not None:
            raise Duplicate("already on the friend list")
        link = {
            "owner": owner["account_id"],
            "friend": friend["account_id"],
            "added_at": self.clock(),
        }
        self.records.commit([Put("friend", link_id, link)],
                            scope_id=f"friend:{link_id}")
        return link

    def list_friends(self, owner_id: str) -> list[dict]:
        accounts = {
            a["account_id"]: a["username"]
            for a in self.records.list_kind("account")
        }
        links = [
            {**f, "friend_username": accounts.get(f["friend"], "?")}
            for f in self.records.list_kind("friend")
            if f["owner"] == owner_id
        ]
        links.sort(key=lambda f: f["added_at"])
        return links

    # -- guestbook ----------------------------------------------------------------

    def sign_guestbook(self, author_name: str, body: str, source: str = "") -> str:
        if not author_name.strip() or not body.strip():
            raise ValidationFailed("name and body are required")
        if len(body) > GUESTBOOK_BODY_LIMIT:
            raise BodyTooLarge(f"body exceeds {GUESTBOOK_BODY_LIMIT} characters")
        now = self.clock()
        if source:
            recent = [
                e for e in self.records.list_kind("guestbook")
                if e.get("source") == source
                and now - e["posted_at"] < GUESTBOOK_MIN_INTERVAL
            ]
            if recent:
                raise RateLimited("one guestbook post per minute")
        entry_id = uuid.uuid4().hex
        self.records.commit([
            Put("guestbook", entry_id, {
                "entry_id": entry_id,
                "author_name": author_name.strip(),
                "body": body,
                "posted_at": now,
                "visible": True,
                "source": source,
            }),
        ], scope_id=f"guestbook:{entry_id}")
        return entry_id

    def moderate_guestbook(self, admin: dict, entry_id: str, visible: bool) -> dict:
        self._require_admin(admin)
        found = self.records.get("guestbook", entry_id)
        if found is None:
            raise NotFound(f"guestbook entry {entry_id}")
        version, entry = found
        entry["visible"] = bool(visible)
        self.records.commit([Put("guestbook", entry_id, entry, version)],
                            scope_id=f"moderate:{entry_id}")
        return entry

    def list_guestbook(self, include_hidden: bool = False) -> list[dict]:
        entries = [
            {k: v for k, v in e.items() if k != "source"}
            for e in self.records.list_kind("guestbook")
            if include_hidden or e["visible"]
        ]
        entries.sort(key=lambda e: (-e["posted_at"], e["entry_id"]))
        return entries

    # -- published items -------------------------------------------------------------

    def publish_item(self, admin: dict, kind: str, title: str,
                     body_or_url: str) -> str:
        self._require_admin(admin)
        if kind not in ITEM_KINDS:
            raise ValidationFailed(f"kind must be one of {ITEM_KINDS}")
        if not title.strip():
            raise ValidationFailed("title is required")
        if kind == "Link":
            parsed = urlparse(body_or_url)
            if parsed.scheme not in ("http", "https") or not parsed.netloc:
                raise BadUrl(f"not an absolute URL: {body_or_url!r}")
        item_id = uuid.uuid4().hex
        self.records.commit([
            Put("item", item_id, {
                "item_id": item_id,
                "kind": kind,
                "title": title.strip(),
                "body_or_url": body_or_url,
                "published_at": self.clock(),
                "author": admin["account_id"],
            }),
        ], scope_id=f"publish:{item_id}")
        return item_id

    def retract_item(self, admin: dict, item_id: str) -> None:
        self._require_admin(admin)
        if self.records.get("item", item_id) is None:
            raise NotFound(f"item {item_id}")
        self.records.commit([Delete("item", item_id)],
                            scope_id=f"retract:{item_id}")

    def list_items(self, kind: str | None = None) -> list[dict]:
        if kind is not None and kind not in ITEM_KINDS:
            raise EmptyQuery(f"unknown item kind {kind!r}")
        items = [
            i for i in self.records.list_kind("item")
            if kind is None or i["kind"] == kind
        ]
        items.sort(key=lambda i: (-i["published_at"], i["item_id"]))
        return items

    # -- internals ----------------------------------------------------------------------

    def _active_account(self, account_id: str) -> dict:
        found = self.records.get("account", account_id)
        if found is None or found[1]["status"] != AccountStatus.ACTIVE.value:
            raise NoSuchUser(account_id)
        return found[1]

    def _require_admin(self, account: dict) -> None:
        if Role(account["role"]) is not Role.ADMIN:
            raise Forbidden("admin only")

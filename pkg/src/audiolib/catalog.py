"""Role-aware listing and search over books and parts.

Every operation reads a consistent snapshot and filters it; impaired members
only ever see books carrying at least one approved part, plus their own
requests.
"""

from __future__ import annotations

from .domain import BookStatus, PartStatus, Role, normalize_text
from .errors import EmptyQuery, Forbidden, NotFound
from .media import MediaStore
from .store import RecordStore


class CatalogService:
    def __init__(self, records: RecordStore, media: MediaStore):
        self.records = records
        self.media = media

    def list_demanded_books(self, caller: dict) -> list[dict]:
        if Role(caller["role"]) not in (Role.VOLUNTEER, Role.ADMIN):
            raise Forbidden("demand list is for volunteers and admins")
        books = [
            b for b in self.records.list_kind("book")
            if b["status"] == BookStatus.REQUESTED.value
        ]
        books.sort(key=lambda b: (b["created_at"], b["book_code"]))
        return books

    def list_my_requests(self, caller: dict) -> list[dict]:
        if Role(caller["role"]) is not Role.IMPAIRED:
            raise Forbidden("request history is for impaired members")
        books = [
            b for b in self.records.list_kind("book")
            if b["requested_by"] == caller["account_id"]
        ]
        books.sort(key=lambda b: (b["created_at"], b["book_code"]))
        return books

    def list_recently_added(self, caller: dict, limit: int) -> list[dict]:
        parts = [
            p for p in self.records.list_kind("part")
            if p["status"] == PartStatus.APPROVED.value
        ]
        parts.sort(key=lambda p: (-p["added_at"], -p["part_code"]))
        titles = self._book_titles()
        rows = []
        for p in parts[:max(limit, 0)]:
            row = dict(p)
            row["title"] = titles.get(p["book_code"], "")
            rows.append(row)
        return rows

    def list_mostly_read(self, caller: dict, limit: int) -> list[dict]:
        stats = self.media.playback_stats()
        books = {b["book_code"]: b for b in self.records.list_kind("book")}
        ranked = sorted(
            stats.items(),
            key=lambda item: (-item[1][0], -item[1][1], item[0]),
        )
        rows = []
        for book_code, (count, _last) in ranked[:max(limit, 0)]:
            book = books.get(book_code)
            if book is None:
                continue
            row = dict(book)
            row["play_count"] = count
            rows.append(row)
        return rows

    def search_books(self, caller: dict, query: str) -> list[dict]:
        needle = normalize_text(query)
        if not needle:
            raise EmptyQuery("search query is empty")
        approved_counts = self._approved_part_counts()
        impaired = Role(caller["role"]) is Role.IMPAIRED
        rows = []
        for book in self.records.list_kind("book"):
            if needle not in normalize_text(book["title"]) \
                    and needle not in normalize_text(book["author"]):
                continue
            count = approved_counts.get(book["book_code"], 0)
            if impaired and count == 0:
                continue
            row = dict(book)
            row["approved_parts"] = count
            rows.append(row)
        rows.sort(key=lambda b: b["book_code"])
        return rows

    def list_book_parts(self, caller: dict, book_code: int) -> list[dict]:
        """Parts of one book, filtered to what the caller may know about."""
        if self.records.get("book", book_code) is None:
            raise NotFound(f"book {book_code}")
        role = Role(caller["role"])
        rows = []
        for p in self.records.list_kind("part"):
            if p["book_code"] != book_code:
                continue
            approved = p["status"] == PartStatus.APPROVED.value
            mine = p["submitted_by"] == caller["account_id"]
            if role is Role.ADMIN or approved or (role is Role.VOLUNTEER and mine):
                rows.append(p)
        rows.sort(key=lambda p: p["part_code"])
        return rows

    def _approved_part_counts(self) -> dict[int, int]:
        counts: dict[int, int] = {}
        for p in self.records.list_kind("part"):
            if p["status"] == PartStatus.APPROVED.value:
                counts[p["book_code"]] = counts.get(p["book_code"], 0) + 1
        return counts

    def _book_titles(self) -> dict[int, str]:
        return {b["book_code"]: b["title"] for b in self.records.list_kind("book")}

"""The HTTP surface: sessions, role gates, the upload wire protocol, streaming.

Authorization is driven by ACCESS_MATRIX, declared as data so tests can sweep
every endpoint × role cell.  Handlers parse their own JSON after the gate has
passed, which keeps deny decisions ahead of body validation.
"""

from __future__ import annotations

import json
import re
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .auth import Session
from .config import CHUNK_BODY_LIMIT
from .domain import Role
from .errors import (
    AuthRequired,
    ChecksumMismatch,
    DomainError,
    Forbidden,
    NoSuchSession,
    NotFound,
    RangeRejected,
    SizeRejected,
    ValidationFailed,
)
from .service import AppContext

V, I, A = Role.VOLUNTEER.value, Role.IMPAIRED.value, Role.ADMIN.value
PUBLIC = frozenset({"*"})
VIA = frozenset({V, I, A})

# The declared endpoint → allowed-roles matrix. "*" = public (anonymous ok).
ACCESS_MATRIX: dict[str, frozenset[str]] = {
    "POST /api/login": PUBLIC,
    "POST /api/logout": VIA,
    "POST /api/applications": PUBLIC,
    "POST /api/applications/{id}/decision": frozenset({A}),
    "POST /api/books": frozenset({I}),
    "GET /api/books/demanded": frozenset({V, A}),
    "GET /api/books/mine": frozenset({I}),
    "POST /api/books/{code}/claims": frozenset({V}),
    "POST /api/claims/{id}/decision": frozenset({A}),
    "POST /api/uploads": frozenset({V}),
    "PUT /api/uploads/{id}/chunks": frozenset({V}),
    "POST /api/uploads/{id}/commit": frozenset({V}),
    "POST /api/books/{code}/parts": frozenset({V}),
    "POST /api/parts/{code}/decision": frozenset({A}),
    "POST /api/books/{code}/complete": frozenset({A}),
    "GET /api/parts/{code}/audio": VIA,  # owning-volunteer rule applied per part
    "GET /api/catalog/recent": VIA,
    "GET /api/catalog/mostly-read": VIA,
    "GET /api/catalog/search": VIA,
    "POST /api/messages": VIA,
    "GET /api/messages": VIA,
    "POST /api/friends": VIA,
    "POST /api/guestbook": PUBLIC,
    "GET /api/guestbook": PUBLIC,
    "POST /api/items": frozenset({A}),
    "DELETE /api/items/{id}": frozenset({A}),
    "GET /api/items": PUBLIC,
    "PATCH /api/account": VIA,
}

# Support surface used by the CLI, the admin screens, and password reset.
# Role-gated the same way but not part of the declared matrix above.
EXTRA_MATRIX: dict[str, frozenset[str]] = {
    "GET /api/ping": PUBLIC,
    "GET /api/account": VIA,
    "GET /api/friends": VIA,
    "GET /api/reviews": frozenset({A}),
    "GET /api/applications/{id}/trial": frozenset({A}),
    "GET /api/uploads/{id}": frozenset({V}),
    "GET /api/books/assigned": frozenset({V}),
    "GET /api/books/{code}/parts": VIA,
    "POST /api/guestbook/{id}/visibility": frozenset({A}),
    "POST /api/password-reset": PUBLIC,
    "POST /api/password-reset/confirm": PUBLIC,
}

_FULL_MATRIX = {**ACCESS_MATRIX, **EXTRA_MATRIX}
_RANGE_HEADER = re.compile(r"^bytes=(\d*)-(\d*)$")


def create_app(ctx: AppContext) -> FastAPI:
    app = FastAPI(title="audiolib", docs_url=None, redoc_url=None)

    @app.exception_handler(DomainError)
    async def domain_error_handler(request: Request, exc: DomainError):
        body = {"error": exc.code, "detail": exc.detail}
        if exc.data:
            body["data"] = {k: v for k, v in exc.data.items()}
        return JSONResponse(body, status_code=exc.http_status)

    def bearer_session(request: Request,
                       allow_query_token: bool = False) -> Session | None:
        header = request.headers.get("authorization", "")
        if header.lower().startswith("bearer "):
            token = header[7:].strip()
        elif allow_query_token:
            # media elements (<audio>, download links) cannot set headers
            token = request.query_params.get("access_token", "")
        else:
            token = ""
        if not token:
            return None
        return ctx.sessions.resolve(token)  # raises SessionExpired

    def gate(request: Request, key: str,
             allow_query_token: bool = False) -> dict | None:
        """Account dict for the caller, or None on public endpoints."""
        roles = _FULL_MATRIX[key]
        session = bearer_session(request, allow_query_token)
        if session is None:
            if "*" in roles:
                return None
            raise AuthRequired("authentication required")
        account = ctx.workflow.account(session.account_id)
        if account is None or account["status"] != "Active":
            ctx.sessions.invalidate(session.token)
            raise AuthRequired("account no longer active")
        if "*" not in roles and account["role"] not in roles:
            raise Forbidden("role not allowed on this endpoint")
        request.state.session = session
        return account

    async def read_json(request: Request) -> dict:
        raw = await request.body()
        if not raw:
            return {}
        try:
            parsed = json.loads(raw)
        except ValueError:
            raise ValidationFailed("request body is not valid JSON") from None
        if not isinstance(parsed, dict):
            raise ValidationFailed("request body must be a JSON object")
        return parsed

    # -- sessions -----------------------------------------------------------

    @app.post("/api/login")
    async def login(request: Request):
        gate(request, "POST /api/login")
        body = await read_json(request)
        session = ctx.login(str(body.get("username", "")),
                            str(body.get("password", "")))
        account = ctx.workflow.account(session.account_id)
        return {
            "token": session.token,
            "role": session.role,
            "account_id": session.account_id,
            "username": account["username"],
            "expires_at": session.expires_at,
        }

    @app.post("/api/logout")
    async def logout(request: Request):
        gate(request, "POST /api/logout")
        ctx.logout(request.state.session.token)
        return {"status": "ok"}

    @app.get("/api/ping")
    async def ping(request: Request):
        gate(request, "GET /api/ping")
        return {"status": "ok"}

    @app.get("/api/account")
    async def account_info(request: Request):
        account = gate(request, "GET /api/account")
        return {k: account[k] for k in
                ("account_id", "username", "email", "role", "status")}

    @app.patch("/api/account")
    async def account_patch(request: Request):
        gate(request, "PATCH /api/account")
        body = await read_json(request)
        username = body.get("username")
        password = body.get("password")
        result = ctx.change_credentials(
            request.state.session,
            new_username=None if username is None else str(username),
            new_password=None if password is None else str(password),
        )
        return result

    @app.post("/api/password-reset")
    async def password_reset(request: Request):
        gate(request, "POST /api/password-reset")
        body = await read_json(request)
        ctx.request_password_reset(str(body.get("username_or_email", "")))
        return {"status": "ok"}

    @app.post("/api/password-reset/confirm")
    async def password_reset_confirm(request: Request):
        gate(request, "POST /api/password-reset/confirm")
        body = await read_json(request)
        ctx.confirm_password_reset(str(body.get("token", "")),
                                   str(body.get("new_password", "")))
        return {"status": "ok"}

    # -- membership vetting ----------------------------------------------------

    @app.post("/api/applications")
    async def submit_application(request: Request):
        gate(request, "POST /api/applications")
        content_type = request.headers.get("content-type", "")
        trial: bytes | None = None
        if content_type.startswith("multipart/form-data"):
            form = await request.form()
            fields = {k: v for k, v in form.items() if isinstance(v, str)}
            upload = form.get("trial")
            if upload is not None and not isinstance(upload, str):
                trial = await upload.read()
        else:
            fields = {k: str(v) for k, v in (await read_json(request)).items()}
        application_id = ctx.workflow.apply_for_membership(
            fields.get("desired_role", ""),
            {
                "name": fields.get("name", ""),
                "email": fields.get("email", ""),
                "username": fields.get("username", ""),
            },
            trial,
        )
        return {"application_id": application_id, "status": "Submitted"}

    @app.post("/api/applications/{application_id}/decision")
    async def decide_application(request: Request, application_id: str):
        admin = gate(request, "POST /api/applications/{id}/decision")
        body = await read_json(request)
        return ctx.workflow.review_application(
            admin["account_id"], application_id, _decision(body)
        )

    @app.get("/api/applications/{application_id}/trial")
    async def application_trial(request: Request, application_id: str):
        gate(request, "GET /api/applications/{id}/trial",
             allow_query_token=True)
        found = ctx.records.get("application", application_id)
        if found is None or not found[1].get("trial_blob"):
            raise NotFound("no trial recording")
        data = ctx.blobs.read(found[1]["trial_blob"])
        return Response(content=data, media_type="audio/mpeg")

    @app.get("/api/reviews")
    async def pending_reviews(request: Request):
        admin = gate(request, "GET /api/reviews")
        return ctx.workflow.list_pending_reviews(admin["account_id"])

    # -- books and claims ---------------------------------------------------------

    @app.post("/api/books")
    async def request_book(request: Request):
        caller = gate(request, "POST /api/books")
        body = await read_json(request)
        code = ctx.workflow.request_book(
            caller["account_id"],
            str(body.get("title", "")),
            str(body.get("author", "")),
        )
        return {"book_code": code, "status": "Requested"}

    @app.get("/api/books/demanded")
    async def demanded_books(request: Request):
        caller = gate(request, "GET /api/books/demanded")
        return {"books": ctx.catalog.list_demanded_books(caller)}

    @app.get("/api/books/mine")
    async def my_books(request: Request):
        caller = gate(request, "GET /api/books/mine")
        return {"books": ctx.catalog.list_my_requests(caller)}

    @app.get("/api/books/assigned")
    async def assigned_books(request: Request):
        caller = gate(request, "GET /api/books/assigned")
        books = [
            b for b in ctx.records.list_kind("book")
            if b["assigned_reader"] == caller["account_id"]
        ]
        books.sort(key=lambda b: b["book_code"])
        return {"books": books}

    @app.get("/api/books/{code}/parts")
    async def book_parts(request: Request, code: int):
        caller = gate(request, "GET /api/books/{code}/parts")
        return {"parts": ctx.catalog.list_book_parts(caller, code)}

    @app.post("/api/books/{code}/claims")
    async def claim_book(request: Request, code: int):
        caller = gate(request, "POST /api/books/{code}/claims")
        claim_id = ctx.workflow.claim_recording(caller["account_id"], code)
        return {"claim_id": claim_id, "status": "Pending"}

    @app.post("/api/claims/{claim_id}/decision")
    async def decide_claim(request: Request, claim_id: str):
        admin = gate(request, "POST /api/claims/{id}/decision")
        body = await read_json(request)
        return ctx.workflow.review_claim(
            admin["account_id"], claim_id, _decision(body)
        )

    @app.post("/api/books/{code}/complete")
    async def complete_book(request: Request, code: int):
        admin = gate(request, "POST /api/books/{code}/complete")
        return ctx.workflow.mark_book_complete(admin["account_id"], code)

    # -- upload wire protocol -------------------------------------------------------

    @app.post("/api/uploads")
    async def begin_upload(request: Request):
        caller = gate(request, "POST /api/uploads")
        body = await read_json(request)
        size = body.get("size")
        if not isinstance(size, int):
            raise SizeRejected("size must be an integer byte count")
        session_id = ctx.media.begin_upload(
            caller["account_id"], size, str(body.get("checksum", ""))
        )
        return {"session_id": session_id}

    @app.put("/api/uploads/{session_id}/chunks")
    async def put_chunk(request: Request, session_id: str):
        caller = gate(request, "PUT /api/uploads/{id}/chunks")
        try:
            offset = int(request.query_params.get("offset", ""))
        except ValueError:
            raise RangeRejected("offset query parameter required") from None
        declared = request.headers.get("content-length")
        if declared is not None and int(declared) > CHUNK_BODY_LIMIT:
            raise SizeRejected(f"chunk exceeds {CHUNK_BODY_LIMIT} bytes")
        data = await request.body()
        if len(data) > CHUNK_BODY_LIMIT:
            raise SizeRejected(f"chunk exceeds {CHUNK_BODY_LIMIT} bytes")
        _check_session_owner(ctx, session_id, caller)
        result = ctx.media.put_chunk(session_id, offset, data)
        return {"received_bytes": result.received_bytes,
                "complete": result.complete}

    @app.get("/api/uploads/{session_id}")
    async def upload_state(request: Request, session_id: str):
        caller = gate(request, "GET /api/uploads/{id}")
        _check_session_owner(ctx, session_id, caller)
        session = ctx.media.received_state(session_id)
        return {
            "session_id": session.session_id,
            "state": session.state,
            "declared_size": session.declared_size,
            "received": session.received,
            "missing": session.missing_ranges(),
            "received_bytes": session.covered_bytes,
            "complete": session.covered_bytes == session.declared_size,
        }

    @app.post("/api/uploads/{session_id}/commit")
    async def commit_upload(request: Request, session_id: str):
        caller = gate(request, "POST /api/uploads/{id}/commit")
        body = await read_json(request)
        _check_session_owner(ctx, session_id, caller)
        declared = ctx.media.received_state(session_id).declared_checksum
        offered = str(body.get("checksum", "")).lower()
        if offered != declared:
            raise ChecksumMismatch(
                "commit checksum does not match the declared checksum"
            )
        blob = ctx.media.finish_upload(session_id)
        try:
            probe = ctx.media.probe_blob(blob.key)
            duration = probe.duration_seconds
        except DomainError:
            duration = None
        return {"blob": blob.key, "duration_seconds": duration}

    @app.post("/api/books/{code}/parts")
    async def register_part(request: Request, code: int):
        caller = gate(request, "POST /api/books/{code}/parts")
        body = await read_json(request)
        part_code = ctx.workflow.submit_part(
            caller["account_id"], code,
            str(body.get("part_name", "")),
            str(body.get("session_id", "")),
        )
        found = ctx.records.get("part", part_code)
        return {"part_code": part_code, "status": found[1]["status"],
                "duration_seconds": found[1]["duration_seconds"]}

    @app.post("/api/parts/{code}/decision")
    async def decide_part(request: Request, code: int):
        admin = gate(request, "POST /api/parts/{code}/decision")
        body = await read_json(request)
        return ctx.workflow.review_part(admin["account_id"], code, _decision(body))

    # -- streaming --------------------------------------------------------------------

    @app.get("/api/parts/{code}/audio")
    async def part_audio(request: Request, code: int):
        caller = gate(request, "GET /api/parts/{code}/audio",
                      allow_query_token=True)
        byte_range = _parse_range(request.headers.get("range"))
        result = ctx.media.stream_range(caller, code, byte_range)
        headers = {"Accept-Ranges": "bytes"}
        if byte_range is None:
            return Response(content=result.payload, media_type="audio/mpeg",
                            headers=headers)
        headers["Content-Range"] = \
            f"bytes {result.start}-{result.end - 1}/{result.total}"
        return Response(content=result.payload, media_type="audio/mpeg",
                        headers=headers, status_code=206)

    # -- catalog ------------------------------------------------------------------------

    @app.get("/api/catalog/recent")
    async def catalog_recent(request: Request):
        caller = gate(request, "GET /api/catalog/recent")
        limit = _int_param(request, "limit", 20)
        return {"parts": ctx.catalog.list_recently_added(caller, limit)}

    @app.get("/api/catalog/mostly-read")
    async def catalog_mostly_read(request: Request):
        caller = gate(request, "GET /api/catalog/mostly-read")
        limit = _int_param(request, "limit", 20)
        return {"books": ctx.catalog.list_mostly_read(caller, limit)}

    @app.get("/api/catalog/search")
    async def catalog_search(request: Request):
        caller = gate(request, "GET /api/catalog/search")
        query = request.query_params.get("q", "")
        return {"books": ctx.catalog.search_books(caller, query)}

    # -- community ------------------------------------------------------------------------

    @app.post("/api/messages")
    async def send_message(request: Request):
        caller = gate(request, "POST /api/messages")
        body = await read_json(request)
        recipient = ctx.community.resolve_username(str(body.get("to", "")))
        message_id = ctx.community.send_message(
            caller["account_id"], recipient["account_id"],
            str(body.get("body", "")),
        )
        return {"message_id": message_id}

    @app.get("/api/messages")
    async def inbox(request: Request):
        caller = gate(request, "GET /api/messages")
        mark = request.query_params.get("mark_read", "") in ("1", "true", "yes")
        return ctx.community.list_inbox(caller["account_id"], mark_read=mark)

    @app.post("/api/friends")
    async def add_friend(request: Request):
        caller = gate(request, "POST /api/friends")
        body = await read_json(request)
        friend = ctx.community.resolve_username(str(body.get("username", "")))
        link = ctx.community.add_friend(caller["account_id"],
                                        friend["account_id"])
        return {**link, "friend_username": friend["username"]}

    @app.get("/api/friends")
    async def list_friends(request: Request):
        caller = gate(request, "GET /api/friends")
        return {"friends": ctx.community.list_friends(caller["account_id"])}

    @app.post("/api/guestbook")
    async def sign_guestbook(request: Request):
        gate(request, "POST /api/guestbook")
        body = await read_json(request)
        # rate-cap key: the account when signed in, the client address otherwise
        session = bearer_session(request)
        if session is not None:
            source = f"account:{session.account_id}"
        else:
            source = request.client.host if request.client else "unknown"
        entry_id = ctx.community.sign_guestbook(
            str(body.get("name", "")), str(body.get("body", "")), source
        )
        return {"entry_id": entry_id}

    @app.get("/api/guestbook")
    async def list_guestbook(request: Request):
        gate(request, "GET /api/guestbook")
        include_hidden = False
        if request.query_params.get("include_hidden") in ("1", "true"):
            session = bearer_session(request)
            account = session and ctx.workflow.account(session.account_id)
            include_hidden = bool(account) and account["role"] == A
        return {"entries": ctx.community.list_guestbook(include_hidden)}

    @app.post("/api/guestbook/{entry_id}/visibility")
    async def moderate_guestbook(request: Request, entry_id: str):
        admin = gate(request, "POST /api/guestbook/{id}/visibility")
        body = await read_json(request)
        entry = ctx.community.moderate_guestbook(
            admin, entry_id, bool(body.get("visible", False))
        )
        return {"entry_id": entry_id, "visible": entry["visible"]}

    @app.post("/api/items")
    async def publish_item(request: Request):
        admin = gate(request, "POST /api/items")
        body = await read_json(request)
        item_id = ctx.community.publish_item(
            admin, str(body.get("kind", "")), str(body.get("title", "")),
            str(body.get("body_or_url", "")),
        )
        return {"item_id": item_id}

    @app.delete("/api/items/{item_id}")
    async def retract_item(request: Request, item_id: str):
        admin = gate(request, "DELETE /api/items/{id}")
        ctx.community.retract_item(admin, item_id)
        return {"status": "retracted"}

    @app.get("/api/items")
    async def list_items(request: Request):
        gate(request, "GET /api/items")
        kind = request.query_params.get("kind")
        return {"items": ctx.community.list_items(kind)}

    static_dir = Path(ctx.config.static_dir)
    if static_dir.is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True),
                  name="frontend")

    return app


def _decision(body: dict) -> str:
    decision = str(body.get("decision", ""))
    if decision not in ("Approve", "Reject"):
        raise ValidationFailed('decision must be "Approve" or "Reject"')
    return decision


def _int_param(request: Request, name: str, default: int) -> int:
    raw = request.query_params.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ValidationFailed(f"{name} must be an integer") from None


def _parse_range(header: str | None) -> tuple[int | None, int | None] | None:
    """HTTP Range header → half-open byte interval markers for the media layer."""
    if header is None:
        return None
    match = _RANGE_HEADER.match(header.strip())
    if not match:
        raise RangeRejected(f"unsupported Range header {header!r}")
    start_raw, end_raw = match.groups()
    if start_raw == "" and end_raw == "":
        raise RangeRejected(f"unsupported Range header {header!r}")
    if start_raw == "":
        return (None, int(end_raw))  # suffix of n bytes
    start = int(start_raw)
    if end_raw == "":
        return (start, None)
    end = int(end_raw) + 1
    if end <= start:
        raise RangeRejected(f"empty range {header!r}")
    return (start, end)


def _check_session_owner(ctx: AppContext, session_id: str, caller: dict) -> None:
    session = ctx.media.received_state(session_id)  # raises NoSuchSession
    if session.owner != caller["account_id"]:
        raise NoSuchSession(f"session {session_id} not found")

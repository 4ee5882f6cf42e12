"""Shared fixtures: an in-process engine stack and a live HTTP server factory."""

from __future__ import annotations

import socket
import threading
import time

import pytest

from audiolib.catalog import CatalogService
from audiolib.community import CommunityService
from audiolib.domain import Role
from audiolib.media import MediaStore, sha256_hex
from audiolib.store import BlobStore, RecordStore
from audiolib.workflow import ListSink, WorkflowService


class FakeClock:
    def __init__(self, start: float = 1_700_000_000.0):
        self.now = start

    def __call__(self) -> float:
        return self.now

    def advance(self, seconds: float) -> float:
        self.now += seconds
        return self.now


class Engine:
    """The full service stack minus HTTP, over an in-memory record store."""

    def __init__(self, tmp_path, clock: FakeClock):
        self.clock = clock
        self.records = RecordStore()
        self.blobs = BlobStore(tmp_path / "blobs")
        self.sink = ListSink()
        self.media = MediaStore(self.blobs, self.records,
                                max_upload_bytes=64 * 1024 * 1024, clock=clock)
        self.workflow = WorkflowService(self.records, self.media, self.sink,
                                        clock=clock)
        self.catalog = CatalogService(self.records, self.media)
        self.community = CommunityService(self.records, clock=clock)

    def add_account(self, username: str, role: Role,
                    password: str = "pw-123456789") -> dict:
        account_id = self.workflow.create_account(
            username, password, f"{username}@example.org", role
        )
        return self.records.get("account", account_id)[1]

    def upload_session(self, owner_id: str, payload: bytes,
                       chunk_size: int = 4096) -> str:
        """Complete upload of payload; returns the Complete session id."""
        session_id = self.media.begin_upload(
            owner_id, len(payload), sha256_hex(payload)
        )
        for offset in range(0, len(payload), chunk_size):
            self.media.put_chunk(session_id, offset,
                                 payload[offset:offset + chunk_size])
        self.media.finish_upload(session_id)
        return session_id

    def published_part(self, *, admin: dict, volunteer: dict, impaired: dict,
                       payload: bytes, title: str = "Fixture Book",
                       author: str = "Fixture Author") -> tuple[int, int]:
        """Drive the whole pipeline to one Approved part; (book, part) codes."""
        book_code = self.workflow.request_book(
            impaired["account_id"], title, author
        )
        claim_id = self.workflow.claim_recording(
            volunteer["account_id"], book_code
        )
        self.workflow.review_claim(admin["account_id"], claim_id, "Approve")
        session_id = self.upload_session(volunteer["account_id"], payload)
        part_code = self.workflow.submit_part(
            volunteer["account_id"], book_code, f"{title} part", session_id
        )
        self.workflow.review_part(admin["account_id"], part_code, "Approve")
        return book_code, part_code


@pytest.fixture
def clock() -> FakeClock:
    return FakeClock()


@pytest.fixture
def engine(tmp_path, clock) -> Engine:
    e = Engine(tmp_path, clock)
    yield e
    e.records.close()


@pytest.fixture
def roles(engine):
    """One active account per role."""
    return {
        "admin": engine.add_account("admin-0", Role.ADMIN),
        "volunteer": engine.add_account("vol-0", Role.VOLUNTEER),
        "impaired": engine.add_account("imp-0", Role.IMPAIRED),
    }


ADMIN_PASSWORD = "acceptance-admin-pw"


def make_app_context(tmp_path, clock=None):
    from audiolib.config import ServiceConfig
    from audiolib.service import AppContext

    config = ServiceConfig(
        data_dir=str(tmp_path / "data"),
        seed_admin_password=ADMIN_PASSWORD,
        max_upload_bytes=64 * 1024 * 1024,
    )
    kwargs = {} if clock is None else {"clock": clock}
    return AppContext(config, **kwargs)


@pytest.fixture
def app_ctx(tmp_path):
    ctx = make_app_context(tmp_path)
    yield ctx
    ctx.close()


@pytest.fixture
def client(app_ctx):
    from fastapi.testclient import TestClient

    from audiolib.api import create_app

    with TestClient(create_app(app_ctx)) as test_client:
        test_client.ctx = app_ctx
        yield test_client


class LiveServer:
    def __init__(self, url: str, ctx, shutdown):
        self.url = url
        self.ctx = ctx
        self.admin_username = "admin"
        self.admin_password = ADMIN_PASSWORD
        self._shutdown = shutdown

    def stop(self):
        self._shutdown()


def spawn_live_server(tmp_path) -> LiveServer:
    import uvicorn

    from audiolib.api import create_app

    ctx = make_app_context(tmp_path)
    app = create_app(ctx)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 15
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("test server failed to start")
        time.sleep(0.02)

    def shutdown():
        server.should_exit = True
        thread.join(timeout=10)
        ctx.close()

    return LiveServer(f"http://127.0.0.1:{port}", ctx, shutdown)


@pytest.fixture
def live_server(tmp_path):
    server = spawn_live_server(tmp_path)
    yield server
    server.stop()

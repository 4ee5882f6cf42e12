"""`audiolib`: terminal client for volunteers (uploads) and admins (moderation).

Exit codes: 0 success, 1 domain error, 2 usage, 3 network failure.
"""

from __future__ import annotations

import hashlib
import json
import os
import stat
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path

import click
import httpx

DEFAULT_CHUNK_SIZE = 1024 * 1024
MAX_IN_FLIGHT = 4
_ABORT_ENV = "AUDIOLIB_ABORT_AFTER_CHUNKS"


class DomainFailure(click.ClickException):
    exit_code = 1


class ConnectFailed(click.ClickException):
    exit_code = 3


def default_profile_path() -> Path:
    base = os.environ.get("XDG_CONFIG_HOME", str(Path.home() / ".config"))
    return Path(base) / "audiolib" / "profile.json"


class ClientState:
    def __init__(self, server: str | None, profile_path: Path, as_json: bool):
        self.profile_path = profile_path
        self.as_json = as_json
        self.profile = self._load_profile()
        self.server = (server or self.profile.get("server", "")).rstrip("/")
        self._http = httpx.Client(timeout=60.0)

    def _load_profile(self) -> dict:
        try:
            return json.loads(self.profile_path.read_text())
        except (OSError, ValueError):
            return {}

    def save_profile(self) -> None:
        self.profile_path.parent.mkdir(parents=True, exist_ok=True)
        self.profile_path.write_text(json.dumps(self.profile, indent=2))
        self.profile_path.chmod(stat.S_IRUSR | stat.S_IWUSR)

    def request(self, method: str, path: str, *, authed: bool = True,
                **kwargs) -> httpx.Response:
        if not self.server:
            raise click.UsageError("no server configured; pass --server or log in")
        headers = dict(kwargs.pop("headers", {}))
        if authed:
            token = self.profile.get("token")
            if not token:
                raise DomainFailure("not logged in (run: audiolib login)")
            headers["Authorization"] = f"Bearer {token}"
        try:
            return self._http.request(
                method, self.server + path, headers=headers, **kwargs
            )
        except httpx.TransportError as exc:
            raise ConnectFailed(f"ConnectFailed: {exc}") from exc

    def call(self, method: str, path: str, **kwargs) -> dict:
        response = self.request(method, path, **kwargs)
        return self.parse(response)

    def parse(self, response: httpx.Response) -> dict:
        try:
            body = response.json()
        except ValueError:
            body = {}
        if response.status_code >= 400:
            code = body.get("error", f"HTTP{response.status_code}")
            detail = body.get("detail", "")
            raise DomainFailure(f"{code}: {detail}" if detail else code)
        return body

    def emit(self, payload: dict, human: str) -> None:
        click.echo(json.dumps(payload, ensure_ascii=False) if self.as_json
                   else human)


pass_state = click.make_pass_decorator(ClientState)


@click.group()
@click.option("--server", help="service base URL, e.g. http://127.0.0.1:8470")
@click.option("--profile", "profile_path", type=click.Path(path_type=Path),
              default=None, help="profile file (default: ~/.config/audiolib)")
@click.option("--json", "as_json", is_flag=True, help="machine-readable output")
@click.pass_context
def cli(ctx, server, profile_path, as_json):
    """Terminal client for the audio-library service."""
    ctx.obj = ClientState(server, profile_path or default_profile_path(), as_json)


@cli.command()
@click.argument("username")
@click.option("--password", prompt=True, hide_input=True)
@pass_state
def login(state: ClientState, username, password):
    """Log in and cache the session token in the profile file."""
    body = state.call("POST", "/api/login", authed=False,
                      json={"username": username, "password": password})
    state.profile.update({
        "server": state.server,
        "token": body["token"],
        "username": body["username"],
        "role": body["role"],
        "account_id": body["account_id"],
    })
    state.save_profile()
    state.emit(body, f"logged in as {body['username']} ({body['role']})")


@cli.command()
@pass_state
def whoami(state: ClientState):
    """Show the logged-in account."""
    body = state.call("GET", "/api/account")
    state.emit(body, f"{body['username']}\t{body['role']}\t{body['email']}")


@cli.command()
@pass_state
def assignments(state: ClientState):
    """Books currently assigned to you for recording."""
    body = state.call("GET", "/api/books/assigned")
    rows = [
        f"{b['book_code']}\t{b['status']}\t{b['title']}\t{b['author']}"
        for b in body["books"]
    ]
    state.emit(body, "\n".join(rows) if rows else "no assigned books")


@cli.command(name="demand-list")
@pass_state
def demand_list(state: ClientState):
    """Books the impaired members want recorded."""
    body = state.call("GET", "/api/books/demanded")
    rows = [
        f"{b['book_code']}\t{b['title']}\t{b['author']}"
        for b in body["books"]
    ]
    state.emit(body, "\n".join(rows) if rows else "no demanded books")


@cli.command()
@click.argument("kind", type=click.Choice(["applications", "claims", "parts"]))
@pass_state
def queue(state: ClientState, kind):
    """Pending moderation queue (admins)."""
    body = state.call("GET", "/api/reviews")
    rows = []
    for entry in body[kind]:
        if kind == "applications":
            rows.append(f"{entry['application_id']}\t{entry['desired_role']}"
                        f"\t{entry['form']['username']}\t{entry['form']['email']}")
        elif kind == "claims":
            rows.append(f"{entry['claim_id']}\t{entry['book_code']}"
                        f"\t{entry['volunteer']}")
        else:
            rows.append(f"{entry['part_code']}\t{entry['book_code']}"
                        f"\t{entry['part_name']}")
    state.emit({kind: body[kind]}, "\n".join(rows) if rows else "queue empty")


_DECISION_PATHS = {
    "applications": "/api/applications/{}/decision",
    "claims": "/api/claims/{}/decision",
    "parts": "/api/parts/{}/decision",
}


@cli.command()
@click.argument("kind", type=click.Choice(["applications", "claims", "parts"]))
@click.argument("item_id")
@click.argument("decision", type=click.Choice(["approve", "reject"]))
@pass_state
def decide(state: ClientState, kind, item_id, decision):
    """Apply a moderation decision (admins)."""
    body = state.call("POST", _DECISION_PATHS[kind].format(item_id),
                      json={"decision": decision.capitalize()})
    state.emit(body, f"{kind[:-1]} {item_id}: {body.get('status', 'decided')}")


@cli.command()
@click.argument("book_code", type=int)
@click.argument("part_name")
@click.argument("file_path", type=click.Path(exists=True, dir_okay=False,
                                             path_type=Path))
@click.option("--chunk-size", type=int, default=DEFAULT_CHUNK_SIZE,
              show_default=True)
@pass_state
def upload(state: ClientState, book_code, part_name, file_path, chunk_size):
    """Resumable upload of a recorded part; prints the new part code."""
    if chunk_size <= 0:
        raise click.UsageError("--chunk-size must be positive")
    size = file_path.stat().st_size
    digest = _sha256_file(file_path)
    cache_key = f"{state.server}|{book_code}|{digest}"
    session_id = _resume_session(state, cache_key, size)
    if session_id is None:
        body = state.call("POST", "/api/uploads",
                          json={"size": size, "checksum": digest})
        session_id = body["session_id"]
        _remember_session(state, cache_key, session_id)
        missing = [[0, size]]
    else:
        click.echo(f"resuming session {session_id}", err=True)
        session = state.call("GET", f"/api/uploads/{session_id}")
        missing = session["missing"] if session["state"] == "Open" else []
    _send_chunks(state, session_id, file_path, missing, chunk_size)
    try:
        commit = state.call("POST", f"/api/uploads/{session_id}/commit",
                            json={"checksum": digest})
    except DomainFailure as exc:
        if "ChecksumMismatch" in exc.message:
            _forget_session(state, cache_key)
            exc.message += ("\nhint: the file changed after the upload began;"
                            " rerun to upload the current file from scratch")
        raise
    _forget_session(state, cache_key)
    body = state.call("POST", f"/api/books/{book_code}/parts",
                      json={"part_name": part_name, "session_id": session_id})
    state.emit(
        {**body, "blob": commit["blob"]},
        str(body["part_code"]),
    )


def _send_chunks(state: ClientState, session_id: str, file_path: Path,
                 missing: list, chunk_size: int) -> None:
    jobs = []
    for start, end in missing:
        cursor = start
        while cursor < end:
            jobs.append((cursor, min(cursor + chunk_size, end)))
            cursor += chunk_size
    if not jobs:
        return
    abort_after = int(os.environ.get(_ABORT_ENV, "0") or "0")
    done = 0
    with ThreadPoolExecutor(max_workers=MAX_IN_FLIGHT) as pool:
        def send(job):
            start, end = job
            with open(file_path, "rb") as handle:
                handle.seek(start)
                data = handle.read(end - start)
            response = state.request(
                "PUT", f"/api/uploads/{session_id}/chunks?offset={start}",
                content=data,
                headers={"Content-Type": "application/octet-stream"},
            )
            state.parse(response)
            return end - start

        pending = [pool.submit(send, job) for job in jobs[:MAX_IN_FLIGHT]]
        queued = len(pending)
        while pending:
            for future in as_completed(pending):
                future.result()
                done += 1
                if abort_after and done >= abort_after:
                    for f in pending:
                        f.cancel()
                    click.echo("aborting upload (test hook)", err=True)
                    sys.exit(3)
                break
            pending = [f for f in pending if not f.done()]
            if queued < len(jobs):
                pending.append(pool.submit(send, jobs[queued]))
                queued += 1
        click.echo(f"uploaded {done} chunk(s)", err=True)


def _sessions_path(state: ClientState) -> Path:
    return state.profile_path.with_name("uploads.json")


def _load_sessions(state: ClientState) -> dict:
    try:
        return json.loads(_sessions_path(state).read_text())
    except (OSError, ValueError):
        return {}


def _resume_session(state: ClientState, cache_key: str, size: int) -> str | None:
    session_id = _load_sessions(state).get(cache_key)
    if session_id is None:
        return None
    response = state.request("GET", f"/api/uploads/{session_id}")
    if response.status_code >= 400:
        _forget_session(state, cache_key)
        return None
    body = response.json()
    if body.get("declared_size") != size or body.get("state") == "Aborted":
        _forget_session(state, cache_key)
        return None
    return session_id


def _remember_session(state: ClientState, cache_key: str, session_id: str) -> None:
    sessions = _load_sessions(state)
    sessions[cache_key] = session_id
    path = _sessions_path(state)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(sessions))


def _forget_session(state: ClientState, cache_key: str) -> None:
    sessions = _load_sessions(state)
    if cache_key in sessions:
        del sessions[cache_key]
        _sessions_path(state).write_text(json.dumps(sessions))


def _sha256_file(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        while True:
            block = fh.read(1 << 20)
            if not block:
                break
            digest.update(block)
    return digest.hexdigest()


def main():
    cli(prog_name="audiolib")


if __name__ == "__main__":
    main()

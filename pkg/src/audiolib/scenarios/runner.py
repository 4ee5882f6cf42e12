"""Executes the profile scripts against a live service instance."""

from __future__ import annotations

import re
import secrets
import string
import threading
import time
from concurrent.futures import ThreadPoolExecutor

import httpx

from .. import mp3
from ..media import sha256_hex
from . import (
    ActorResult,
    ProfileResult,
    RunReport,
    ScenarioTask,
    TaskResult,
    load_all_scripts,
)

ACTOR_LABELS = string.ascii_uppercase
_PLACEHOLDER = re.compile(r"\{[^{}]*\}")
_PEER_VARS = ("book_code", "part_code", "entry_id", "username", "new_username")
_TRIAL_FRAMES = 40  # small synthesized clip attached to volunteer applications


class ConnectFailed(RuntimeError):
    """The target server could not be reached."""


class StepFailed(RuntimeError):
    pass


def normalize_endpoint(key: str) -> str:
    """'POST /api/books/{code}/claims' → placeholder-insensitive form."""
    return _PLACEHOLDER.sub("{}", key)


class ScenarioRunner:
    def __init__(self, server_url: str, actors_per_profile: int = 5,
                 admin_username: str = "admin", admin_password: str = "",
                 timeout: float = 60.0):
        if not admin_password:
            raise ValueError("admin_password is required (seeded admin account)")
        self.server_url = server_url.rstrip("/")
        self.actors = actors_per_profile
        self.admin_username = admin_username
        self.admin_password = admin_password
        self.run_id = secrets.token_hex(3)
        self._http = httpx.Client(timeout=timeout)
        self._endpoints: set[str] = set()
        self._endpoint_lock = threading.Lock()
        self._glue_tokens: dict[str, str] = {}

    # -- public entry ----------------------------------------------------------

    def run(self) -> RunReport:
        started = time.perf_counter()
        scripts = load_all_scripts()
        self._bootstrap_glue()
        profile_vars: dict[str, list[dict]] = {}
        results = []
        for profile in ("Volunteer", "Admin", "Impaired"):
            script = scripts[profile]
            peers = profile_vars.get("Volunteer", [])
            with ThreadPoolExecutor(max_workers=self.actors) as pool:
                futures = [
                    pool.submit(self._run_actor, script, index, peers)
                    for index in range(self.actors)
                ]
                outcomes = [f.result() for f in futures]
            results.append(ProfileResult(
                profile=profile,
                actors=[outcome[0] for outcome in outcomes],
            ))
            profile_vars[profile] = [outcome[1] for outcome in outcomes]
        return RunReport(
            server_url=self.server_url,
            run_id=self.run_id,
            actors_per_profile=self.actors,
            profiles=results,
            endpoints_hit=sorted(self._endpoints),
            elapsed_seconds=time.perf_counter() - started,
        )

    # -- glue identities ----------------------------------------------------------

    def _bootstrap_glue(self) -> None:
        try:
            response = self._http.get(self.server_url + "/api/ping")
        except httpx.TransportError as exc:
            raise ConnectFailed(f"cannot reach {self.server_url}: {exc}") from exc
        if response.status_code != 200:
            raise ConnectFailed(f"ping returned HTTP {response.status_code}")
        self._glue_tokens["glue_admin"] = self._login(
            self.admin_username, self.admin_password
        )
        self._glue_tokens["glue_volunteer"] = self._make_glue_member(
            "Volunteer", f"gluevol-{self.run_id}"
        )
        self._glue_tokens["glue_impaired"] = self._make_glue_member(
            "Impaired", f"glueimp-{self.run_id}"
        )

    def _login(self, username: str, password: str) -> str:
        body = self._request(
            None, "POST", "/api/login",
            json={"username": username, "password": password},
        ).json()
        return body["token"]

    def _make_glue_member(self, role: str, username: str) -> str:
        fields = {
            "desired_role": role,
            "name": f"Glue {role}",
            "email": f"{username}@example.org",
            "username": username,
        }
        if role == "Volunteer":
            trial = mp3.build_cbr(_TRIAL_FRAMES, 64, 44100)
            response = self._request(
                None, "POST", "/api/applications", data=fields,
                files={"trial": ("trial.mp3", trial, "audio/mpeg")},
            )
        else:
            response = self._request(None, "POST", "/api/applications",
                                     json=fields)
        application_id = response.json()["application_id"]
        decision = self._request(
            self._glue_tokens["glue_admin"], "POST",
            "/api/applications/{id}/decision",
            path=f"/api/applications/{application_id}/decision",
            json={"decision": "Approve"},
        ).json()
        return self._login(username, decision["password"])

    # -- actor execution --------------------------------------------------------------

    def _run_actor(self, script, index: int,
                   peers: list[dict]) -> tuple[ActorResult, dict]:
        label = ACTOR_LABELS[index % len(ACTOR_LABELS)]
        prefix = script.profile[:3].lower()
        username = f"{prefix}{index}-{self.run_id}"
        variables: dict = {
            "index": index,
            "actor": label,
            "run_id": self.run_id,
            "username": username,
            "new_username": f"{username}x",
            "new_password": f"pw-{self.run_id}-{index}-{secrets.token_hex(4)}",
            "name": f"{script.profile} Actor {label}",
            "email": f"{username}@example.org",
            "admin_username": self.admin_username,
            "admin_password": self.admin_password,
        }
        if peers and index < len(peers):
            for key in _PEER_VARS:
                if key in peers[index]:
                    variables[f"peer_{key}"] = peers[index][key]
        sessions: dict[str, str | None] = {"actor": None}
        tasks = [self._run_task(task, variables, sessions)
                 for task in script.tasks]
        return ActorResult(actor=label, tasks=tasks), variables

    def _run_task(self, task: ScenarioTask, variables: dict,
                  sessions: dict) -> TaskResult:
        elapsed = 0.0
        try:
            for step in task.setup:
                self._run_step(step, variables, sessions)
            for step in task.steps:
                elapsed += self._run_step(step, variables, sessions)
            for step in task.verify:
                self._run_step(step, variables, sessions)
            for step in task.teardown:
                self._run_step(step, variables, sessions)
        except StepFailed as exc:
            return TaskResult(task.name, False, int(elapsed * 1000), str(exc))
        except httpx.TransportError as exc:
            raise ConnectFailed(str(exc)) from exc
        return TaskResult(task.name, True, int(elapsed * 1000))

    def _run_step(self, step: dict, variables: dict, sessions: dict) -> float:
        if step.get("op") == "upload":
            return self._run_upload(step, variables, sessions)
        return self._run_http(step, variables, sessions)

    def _run_http(self, step: dict, variables: dict, sessions: dict) -> float:
        method = step.get("method", "GET").upper()
        template = step["path"]
        path = _render(template, variables)
        token = self._token_for(step.get("as", "anonymous"), sessions)
        kwargs: dict = {}
        if "params" in step:
            kwargs["params"] = _render_tree(step["params"], variables)
        if "json" in step:
            kwargs["json"] = _render_tree(step["json"], variables)
        if "headers" in step:
            kwargs["headers"] = _render_tree(step["headers"], variables)
        if "multipart" in step:
            fields = _render_tree(step["multipart"], variables)
            attach_trial = bool(fields.pop("trial", False))
            kwargs["data"] = fields
            if attach_trial:
                clip = mp3.build_cbr(_TRIAL_FRAMES, 64, 44100)
                kwargs["files"] = {"trial": ("trial.mp3", clip, "audio/mpeg")}
        start = time.perf_counter()
        response = self._request(token, method, template, path=path, **kwargs)
        elapsed = time.perf_counter() - start
        self._check(step, response, variables)
        self._save(step, response, variables, sessions)
        return elapsed

    def _run_upload(self, step: dict, variables: dict, sessions: dict) -> float:
        token = self._token_for(step.get("as", "actor"), sessions)
        book_code = int(_render(str(step["book_code"]), variables))
        part_name = _render(step.get("part_name", "Part"), variables)
        frames = int(step.get("frames", 120))
        bitrate = int(step.get("bitrate", 128))
        sample_rate = int(step.get("sample_rate", 44100))
        chunk_size = int(step.get("chunk_size", 65536))
        payload = mp3.build_cbr(frames, bitrate, sample_rate)
        digest = sha256_hex(payload)

        # Transfer (init/chunks/commit) stays outside the task timing.
        body = self._expect_json(self._request(
            token, "POST", "/api/uploads",
            json={"size": len(payload), "checksum": digest},
        ))
        session_id = body["session_id"]
        for offset in range(0, len(payload), chunk_size):
            chunk = payload[offset:offset + chunk_size]
            self._expect_json(self._request(
                token, "PUT", "PUT /api/uploads/{id}/chunks",
                path=f"/api/uploads/{session_id}/chunks?offset={offset}",
                content=chunk,
                headers={"Content-Type": "application/octet-stream"},
            ))
        self._expect_json(self._request(
            token, "POST", "POST /api/uploads/{id}/commit",
            path=f"/api/uploads/{session_id}/commit",
            json={"checksum": digest},
        ))

        start = time.perf_counter()
        response = self._request(
            token, "POST", "POST /api/books/{code}/parts",
            path=f"/api/books/{book_code}/parts",
            json={"part_name": part_name, "session_id": session_id},
        )
        elapsed = time.perf_counter() - start
        self._check(step, response, variables)
        self._save(step, response, variables, sessions)
        return elapsed

    # -- plumbing -----------------------------------------------------------------------

    def _request(self, token: str | None, method: str, template: str,
                 path: str | None = None, **kwargs) -> httpx.Response:
        path = path if path is not None else template
        endpoint = template if " " in template else f"{method} {template}"
        with self._endpoint_lock:
            self._endpoints.add(normalize_endpoint(endpoint))
        headers = dict(kwargs.pop("headers", {}))
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return self._http.request(method, self.server_url + path,
                                  headers=headers, **kwargs)

    def _token_for(self, alias: str, sessions: dict) -> str | None:
        if alias == "anonymous":
            return None
        if alias == "actor":
            return sessions.get("actor")
        token = self._glue_tokens.get(alias)
        if token is None:
            raise StepFailed(f"unknown session alias {alias!r}")
        return token

    def _expect_json(self, response: httpx.Response) -> dict:
        if response.status_code >= 400:
            raise StepFailed(
                f"{response.request.method} {response.request.url.path} "
                f"→ HTTP {response.status_code}: {response.text[:200]}"
            )
        return response.json()

    def _check(self, step: dict, response: httpx.Response,
               variables: dict) -> None:
        expected = step.get("expect_status")
        if expected is not None:
            if response.status_code != int(expected):
                raise StepFailed(
                    f"{response.request.method} {response.request.url.path} "
                    f"→ HTTP {response.status_code}, expected {expected}: "
                    f"{response.text[:200]}"
                )
        elif response.status_code >= 300:
            raise StepFailed(
                f"{response.request.method} {response.request.url.path} "
                f"→ HTTP {response.status_code}: {response.text[:200]}"
            )
        if step.get("raw"):
            return
        checks = step.get("expect", {})
        nonempty = step.get("expect_nonempty", [])
        if not checks and not nonempty:
            return
        body = response.json()
        for path, want in checks.items():
            got = _dig(body, path)
            want = _render(str(want), variables)
            if str(got) != want:
                raise StepFailed(f"expected {path}={want!r}, got {got!r}")
        for path in nonempty:
            got = _dig(body, path)
            if not got:
                raise StepFailed(f"expected non-empty {path}, got {got!r}")

    def _save(self, step: dict, response: httpx.Response, variables: dict,
              sessions: dict) -> None:
        if step.get("raw"):
            return
        saves = step.get("save", {})
        bind = step.get("save_token")
        if not saves and not bind:
            return
        body = response.json()
        for var, path in saves.items():
            variables[var] = _dig(body, path)
        if bind:
            sessions[bind] = body["token"]


def _render(template: str, variables: dict) -> str:
    try:
        return template.format_map(variables)
    except KeyError as exc:
        raise StepFailed(f"unset scenario variable {exc} in {template!r}") from exc


def _render_tree(value, variables):
    if isinstance(value, str):
        return _render(value, variables)
    if isinstance(value, dict):
        return {k: _render_tree(v, variables) for k, v in value.items()}
    if isinstance(value, list):
        return [_render_tree(v, variables) for v in value]
    return value


def _dig(body, path: str):
    current = body
    for piece in str(path).split("."):
        if isinstance(current, list):
            current = current[int(piece)]
        elif isinstance(current, dict):
            if piece not in current:
                raise StepFailed(f"response has no field {path!r}")
            current = current[piece]
        else:
            raise StepFailed(f"response has no field {path!r}")
    return current

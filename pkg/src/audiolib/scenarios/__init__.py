"""Scripted end-to-end scenarios: the usability task lists, machine-run.

Each profile (Volunteer, Admin, Impaired) has a declarative YAML script in
``scripts/``.  A task is an ordered list of HTTP steps:

    name: task label (one row of the profile's task list)
    setup:    untimed staging steps, usually as a glue session
    steps:    the timed actions the actor performs
    verify:   untimed post-state checks
    teardown: untimed cleanup

Step fields: ``as`` (actor | anonymous | glue_admin | glue_volunteer |
glue_impaired), ``method``/``path``/``params``/``json``/``headers``/
``multipart``, ``expect_status``, ``expect_nonempty`` (dotted response
paths), ``save`` (var ← dotted path), ``save_token`` (bind the response
token as a session), and ``op: upload`` for the resumable-upload client
(whose transfer time is excluded from task timing).

String values are templated against the actor's variables with ``{name}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources

import yaml

PROFILES = ("Volunteer", "Admin", "Impaired")


@dataclass
class ScenarioTask:
    name: str
    setup: list[dict] = field(default_factory=list)
    steps: list[dict] = field(default_factory=list)
    verify: list[dict] = field(default_factory=list)
    teardown: list[dict] = field(default_factory=list)


@dataclass
class ScenarioScript:
    profile: str
    tasks: list[ScenarioTask]


@dataclass
class TaskResult:
    name: str
    ok: bool
    elapsed_ms: int
    error: str | None = None


@dataclass
class ActorResult:
    actor: str  # "A".."E"
    tasks: list[TaskResult]


@dataclass
class ProfileResult:
    profile: str
    actors: list[ActorResult]

    def task_names(self) -> list[str]:
        return [t.name for t in self.actors[0].tasks] if self.actors else []


@dataclass
class RunReport:
    server_url: str
    run_id: str
    actors_per_profile: int
    profiles: list[ProfileResult]
    endpoints_hit: list[str]
    elapsed_seconds: float

    def total_tasks(self) -> int:
        return sum(len(p.actors[0].tasks) for p in self.profiles if p.actors)

    def all_completed(self) -> bool:
        return all(
            t.ok
            for p in self.profiles
            for a in p.actors
            for t in a.tasks
        )


def load_script(profile: str) -> ScenarioScript:
    name = profile.lower()
    raw = resources.files(__package__).joinpath(
        f"scripts/{name}.yaml").read_text(encoding="utf-8")
    doc = yaml.safe_load(raw)
    if doc.get("profile") != profile:
        raise ValueError(f"script {name}.yaml declares {doc.get('profile')!r}")
    tasks = [
        ScenarioTask(
            name=str(t["name"]),
            setup=t.get("setup", []) or [],
            steps=t.get("steps", []) or [],
            verify=t.get("verify", []) or [],
            teardown=t.get("teardown", []) or [],
        )
        for t in doc["tasks"]
    ]
    return ScenarioScript(profile=profile, tasks=tasks)


def load_all_scripts() -> dict[str, ScenarioScript]:
    return {profile: load_script(profile) for profile in PROFILES}

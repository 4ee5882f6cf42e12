"""Scenario scripts and report rendering."""

import json

import pytest

from audiolib.scenarios import (
    ActorResult,
    ProfileResult,
    RunReport,
    TaskResult,
    load_all_scripts,
    load_script,
)
from audiolib.scenarios.report import (
    render_figures,
    render_json,
    render_text,
    task_rows,
    to_document,
)
from audiolib.scenarios.runner import ScenarioRunner, normalize_endpoint


class TestScripts:
    def test_task_counts_match_profiles(self):
        scripts = load_all_scripts()
        assert len(scripts["Volunteer"].tasks) == 12
        assert len(scripts["Admin"].tasks) == 10
        assert len(scripts["Impaired"].tasks) == 8

    def test_task_names_unique_within_profile(self):
        for script in load_all_scripts().values():
            names = [t.name for t in script.tasks]
            assert len(names) == len(set(names))

    def test_every_step_names_a_session(self):
        aliases = {"actor", "anonymous", "glue_admin", "glue_volunteer",
                   "glue_impaired"}
        for script in load_all_scripts().values():
            for task in script.tasks:
                for step in task.setup + task.steps + task.verify + task.teardown:
                    assert step.get("as", "actor") in aliases

    def test_loader_rejects_mislabeled_profile(self):
        with pytest.raises(ValueError):
            load_script("volunteer")  # profile labels are capitalized


def fake_report(status_grid, times=None):
    """Build a RunReport with one profile and the given per-actor statuses."""
    actors = []
    n_tasks = len(status_grid[0])
    for i, row in enumerate(status_grid):
        tasks = [
            TaskResult(
                name=f"Task {t}",
                ok=ok,
                elapsed_ms=(times or {}).get((i, t), 10 * (t + 1)),
                error=None if ok else "induced failure",
            )
            for t, ok in enumerate(row)
        ]
        actors.append(ActorResult(actor="ABCDE"[i], tasks=tasks))
    profile = ProfileResult(profile="Volunteer", actors=actors)
    return RunReport(
        server_url="http://test", run_id="r1",
        actors_per_profile=len(status_grid),
        profiles=[profile],
        endpoints_hit=["GET /api/ping"],
        elapsed_seconds=1.5,
    )


class TestReport:
    def test_full_success_is_100(self):
        report = fake_report([[True] * 3] * 5)
        rows = task_rows(report.profiles[0])
        assert all(r["completion_pct"] == 100 for r in rows)
        assert report.all_completed()

    def test_four_of_five_is_80(self):
        grid = [[True], [True], [True], [True], [False]]
        report = fake_report(grid)
        row = task_rows(report.profiles[0])[0]
        assert row["completion_pct"] == 80
        assert row["status"] == ["+", "+", "+", "+", "-"]
        assert not report.all_completed()

    def test_text_and_json_carry_identical_numbers(self):
        report = fake_report([[True, False], [True, True]])
        doc = json.loads(render_json(report))
        text = render_text(report)
        for profile in doc["profiles"]:
            for row in profile["tasks"]:
                line = next(l for l in text.splitlines()
                            if l.startswith(row["task"] + "\t"))
                cells = line.split("\t")
                assert cells[1:3] == [str(t) for t in row["times_ms"]]
                assert cells[3] == str(row["average_ms"])
                assert cells[4:6] == row["status"]
                assert cells[6] == str(row["completion_pct"])

    def test_average_time(self):
        times = {(0, 0): 10, (1, 0): 30}
        report = fake_report([[True], [True]], times)
        assert task_rows(report.profiles[0])[0]["average_ms"] == 20

    def test_failures_section_lists_errors(self):
        report = fake_report([[False]])
        text = render_text(report)
        assert "## failures" in text
        assert "induced failure" in text

    def test_figures_written(self, tmp_path):
        report = fake_report([[True, True], [True, False]])
        paths = render_figures(report, tmp_path / "figs")
        assert [p.name for p in paths] == ["scenario_volunteer.png"]
        assert all(p.stat().st_size > 1000 for p in paths)

    def test_document_totals(self):
        report = fake_report([[True] * 4] * 2)
        doc = to_document(report)
        assert doc["total_tasks"] == 4
        assert doc["all_completed"] is True


class TestRunnerHelpers:
    def test_normalize_endpoint(self):
        assert normalize_endpoint("POST /api/books/{code}/claims") == \
            "POST /api/books/{}/claims"
        assert normalize_endpoint("GET /api/items") == "GET /api/items"

    def test_requires_admin_password(self):
        with pytest.raises(ValueError):
            ScenarioRunner("http://x", admin_password="")

    def test_unreachable_server_aborts(self):
        from audiolib.scenarios.runner import ConnectFailed
        runner = ScenarioRunner("http://127.0.0.1:1", 1,
                                admin_password="pw-whatever")
        with pytest.raises(ConnectFailed):
            runner.run()


class TestLiveRun:
    def test_two_actor_run_completes_every_task(self, live_server):
        runner = ScenarioRunner(live_server.url, 2,
                                live_server.admin_username,
                                live_server.admin_password)
        report = runner.run()
        failures = [
            (p.profile, t.name, t.error)
            for p in report.profiles
            for a in p.actors
            for t in a.tasks if not t.ok
        ]
        assert failures == []
        assert report.total_tasks() == 30

    def test_disabled_endpoint_marks_task_failed(self, live_server):
        # simulate a broken build: part decisions start failing server-side
        ctx = live_server.ctx
        original = ctx.workflow.review_part
        from audiolib.errors import WrongState

        def broken(*args, **kwargs):
            raise WrongState("moderation disabled for this drill")

        ctx.workflow.review_part = broken
        try:
            runner = ScenarioRunner(live_server.url, 1,
                                    live_server.admin_username,
                                    live_server.admin_password)
            report = runner.run()
        finally:
            ctx.workflow.review_part = original
        by_name = {
            (p.profile, t.name): t
            for p in report.profiles
            for a in p.actors
            for t in a.tasks
        }
        broken_task = by_name[("Admin",
                               "The procedures for the approval of the recorded books.")]
        assert not broken_task.ok
        # the run continued: later tasks still executed
        assert ("Impaired", "Submitting a demand for a book to be recorded.") \
            in by_name


class TestHarnessInvariants:
    def test_endpoint_coverage_superset_of_matrix(self, live_server):
        from audiolib.api import ACCESS_MATRIX

        runner = ScenarioRunner(live_server.url, 1,
                                live_server.admin_username,
                                live_server.admin_password)
        report = runner.run()
        covered = set(report.endpoints_hit)
        required = {normalize_endpoint(key) for key in ACCESS_MATRIX}
        missing = required - covered
        assert missing == set(), missing

    def test_completion_grids_deterministic_across_fresh_servers(
            self, tmp_path):
        from tests.conftest import spawn_live_server

        grids = []
        for name in ("one", "two"):
            server = spawn_live_server(tmp_path / name)
            try:
                runner = ScenarioRunner(server.url, 2,
                                        server.admin_username,
                                        server.admin_password)
                report = runner.run()
            finally:
                server.stop()
            grids.append([
                (p.profile, t.name, t.ok)
                for p in report.profiles
                for a in p.actors
                for t in a.tasks
            ])
        assert grids[0] == grids[1]

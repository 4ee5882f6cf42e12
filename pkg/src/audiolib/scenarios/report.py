"""Render scenario results: delimited text, JSON, and figure files.

Both renderings carry identical numbers; the text grid mirrors the usability
tables (per-actor times, average, per-actor status, completion percentage).
"""

from __future__ import annotations

import json
from pathlib import Path

from . import ProfileResult, RunReport


def task_rows(profile: ProfileResult) -> list[dict]:
    rows = []
    actor_count = len(profile.actors)
    for task_index, name in enumerate(profile.task_names()):
        times = [a.tasks[task_index].elapsed_ms for a in profile.actors]
        status = [a.tasks[task_index].ok for a in profile.actors]
        errors = [
            {"actor": a.actor, "error": a.tasks[task_index].error}
            for a in profile.actors
            if a.tasks[task_index].error
        ]
        rows.append({
            "task": name,
            "times_ms": times,
            "average_ms": round(sum(times) / actor_count) if actor_count else 0,
            "status": ["+" if ok else "-" for ok in status],
            "completion_pct": round(100 * sum(status) / actor_count)
            if actor_count else 0,
            "errors": errors,
        })
    return rows


def to_document(report: RunReport) -> dict:
    return {
        "server_url": report.server_url,
        "run_id": report.run_id,
        "actors_per_profile": report.actors_per_profile,
        "elapsed_seconds": round(report.elapsed_seconds, 3),
        "all_completed": report.all_completed(),
        "total_tasks": report.total_tasks(),
        "profiles": [
            {
                "profile": p.profile,
                "actors": [a.actor for a in p.actors],
                "tasks": task_rows(p),
            }
            for p in report.profiles
        ],
        "endpoints_hit": report.endpoints_hit,
    }


def render_json(report: RunReport) -> str:
    return json.dumps(to_document(report), indent=2, ensure_ascii=False)


def render_text(report: RunReport) -> str:
    doc = to_document(report)
    lines = [
        f"# scenario run {doc['run_id']} against {doc['server_url']}",
        f"# actors per profile: {doc['actors_per_profile']}   "
        f"tasks: {doc['total_tasks']}   "
        f"elapsed: {doc['elapsed_seconds']}s   "
        f"all completed: {'yes' if doc['all_completed'] else 'NO'}",
    ]
    for profile in doc["profiles"]:
        labels = profile["actors"]
        lines.append("")
        lines.append(f"## {profile['profile']}")
        header = ["task"]
        header += [f"{label}_ms" for label in labels]
        header += ["avg_ms"]
        header += labels
        header += ["pct"]
        lines.append("\t".join(header))
        for row in profile["tasks"]:
            cells = [row["task"]]
            cells += [str(t) for t in row["times_ms"]]
            cells += [str(row["average_ms"])]
            cells += row["status"]
            cells += [str(row["completion_pct"])]
            lines.append("\t".join(cells))
    failures = [
        (profile["profile"], row["task"], err["actor"], err["error"])
        for profile in doc["profiles"]
        for row in profile["tasks"]
        for err in row["errors"]
    ]
    if failures:
        lines.append("")
        lines.append("## failures")
        for profile, task, actor, error in failures:
            lines.append(f"{profile}\t{task}\t{actor}\t{error}")
    lines.append("")
    lines.append(f"# endpoints exercised: {len(doc['endpoints_hit'])}")
    for endpoint in doc["endpoints_hit"]:
        lines.append(f"# {endpoint}")
    return "\n".join(lines) + "\n"


def render_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """One PNG per profile: average task time bars annotated with completion."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for profile in report.profiles:
        rows = task_rows(profile)
        if not rows:
            continue
        names = [r["task"] for r in rows]
        averages = [r["average_ms"] for r in rows]
        completion = [r["completion_pct"] for r in rows]
        colors = ["#2a9d8f" if pct == 100 else "#e76f51" for pct in completion]
        fig, ax = plt.subplots(figsize=(9, 0.45 * len(rows) + 1.8))
        positions = range(len(rows))
        ax.barh(positions, averages, color=colors)
        ax.set_yticks(list(positions))
        ax.set_yticklabels(names, fontsize=8)
        ax.invert_yaxis()
        ax.set_xlabel("average time (ms)")
        ax.set_title(
            f"{profile.profile} tasks — {report.actors_per_profile} actors"
        )
        for pos, (avg, pct) in enumerate(zip(averages, completion)):
            ax.text(avg, pos, f"  {pct}%", va="center", fontsize=8)
        fig.tight_layout()
        path = out_dir / f"scenario_{profile.profile.lower()}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written

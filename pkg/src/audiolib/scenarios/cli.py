"""`audiolib-scenarios`: run the usability task lists against a server."""

from __future__ import annotations

import argparse
import socket
import sys
import tempfile
import threading
import time
from pathlib import Path

from .report import render_figures, render_json, render_text
from .runner import ConnectFailed, ScenarioRunner


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="audiolib-scenarios",
        description="Run the three usability task lists as machine scenarios",
    )
    parser.add_argument("server_url", nargs="?", default="",
                        help="base URL of a running service")
    parser.add_argument("--self-host", action="store_true",
                        help="spin up a throwaway server in-process")
    parser.add_argument("--actors", type=int, default=5,
                        help="actors per profile (default 5)")
    parser.add_argument("--admin-user", default="admin")
    parser.add_argument("--admin-pass", default="",
                        help="password of the seeded admin account")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    parser.add_argument("--out", type=Path, help="write the report to a file")
    parser.add_argument("--figures", type=Path, metavar="DIR",
                        help="also render per-profile charts into DIR")
    args = parser.parse_args(argv)

    if args.self_host:
        server_url, admin_user, admin_pass, shutdown = _spawn_server()
    else:
        if not args.server_url:
            parser.error("server_url required unless --self-host is given")
        if not args.admin_pass:
            parser.error("--admin-pass required (seeded admin credentials)")
        server_url = args.server_url
        admin_user, admin_pass = args.admin_user, args.admin_pass
        shutdown = None

    try:
        runner = ScenarioRunner(server_url, args.actors,
                                admin_user, admin_pass)
        report = runner.run()
    except ConnectFailed as exc:
        print(f"ConnectFailed: {exc}", file=sys.stderr)
        return 3
    finally:
        if shutdown:
            shutdown()

    rendered = render_json(report) if args.format == "json" \
        else render_text(report)
    if args.out:
        args.out.write_text(rendered, encoding="utf-8")
        print(f"report written to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(rendered)
    if args.figures:
        for path in render_figures(report, args.figures):
            print(f"figure written to {path}", file=sys.stderr)
    return 0 if report.all_completed() else 1


def _spawn_server():
    """Throwaway uvicorn instance over a temp data directory."""
    import uvicorn

    from ..api import create_app
    from ..config import ServiceConfig
    from ..service import AppContext

    tmp = tempfile.mkdtemp(prefix="audiolib-scenarios-")
    password = "scenario-admin-pw"
    config = ServiceConfig(data_dir=tmp, seed_admin_password=password)
    ctx = AppContext(config)
    app = create_app(ctx)
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        port = probe.getsockname()[1]
    server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=port,
                                           log_level="error"))
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("self-hosted server failed to start")
        time.sleep(0.05)

    def shutdown():
        server.should_exit = True
        thread.join(timeout=5)

    return f"http://127.0.0.1:{port}", "admin", password, shutdown


if __name__ == "__main__":
    raise SystemExit(main())

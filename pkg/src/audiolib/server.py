"""`audiolib-server`: run the HTTP service from a config file."""

from __future__ import annotations

import argparse

import uvicorn

from .api import create_app
from .config import load_config
from .service import AppContext


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="audiolib-server",
        description="Self-hostable audio-library automation service",
    )
    parser.add_argument("--config", help="key=value config file")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, help="override listen_port")
    args = parser.parse_args(argv)

    config = load_config(args.config)
    ctx = AppContext(config)
    if ctx.seeded_admin_password is not None:
        print(
            f"seeded admin account {config.seed_admin_username!r} "
            f"with password: {ctx.seeded_admin_password}"
        )
    app = create_app(ctx)
    port = args.port if args.port is not None else config.listen_port
    uvicorn.run(app, host=args.host, port=port, log_level="warning")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

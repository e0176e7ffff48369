"""`classifier-server` entry point."""

from __future__ import annotations

import argparse
import sys

from .app import ServerConfig, create_app


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(
        prog="classifier-server",
        description="Serve an image classifier over the base64-PNG prediction protocol.")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8500)
    p.add_argument("--model", default="tiny",
                   help="tiny | torchvision:<name> | torchvision:<name>@untrained")
    p.add_argument("--top-class-only", action="store_true",
                   help="answer 2-entry rows [top probability, remainder] "
                        "instead of the full class vector")
    args = p.parse_args(argv)

    config = ServerConfig(host=args.host, port=args.port, model=args.model,
                          top_class_only=args.top_class_only)

    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port)
    return 0


if __name__ == "__main__":
    sys.exit(main())

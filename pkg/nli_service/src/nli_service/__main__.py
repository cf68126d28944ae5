"""Run the sidecar: python -m nli_service (or the nli-service script)."""

import argparse

import uvicorn

from .app import create_app
from .config import DEFAULT_CHECKPOINT, ServiceConfig


def main(argv=None):
    parser = argparse.ArgumentParser(prog="nli-service", description=__doc__)
    parser.add_argument("--checkpoint", default=DEFAULT_CHECKPOINT)
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8090)
    parser.add_argument("--max-batch-size", type=int, default=64)
    parser.add_argument("--device", default="cpu")
    args = parser.parse_args(argv)
    config = ServiceConfig(
        checkpoint=args.checkpoint,
        host=args.host,
        port=args.port,
        max_batch_size=args.max_batch_size,
        device=args.device,
    )
    uvicorn.run(create_app(config), host=config.host, port=config.port)


if __name__ == "__main__":
    main()

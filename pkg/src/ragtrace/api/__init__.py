"""HTTP service facade: FastAPI app factory plus a threaded serve/shutdown pair."""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field

import uvicorn
from fastapi import FastAPI

from .app import create_app

logger = logging.getLogger(__name__)

__all__ = ["create_app", "serve", "shutdown", "ServiceHandle"]


@dataclass
class ServiceHandle:
    """A running service; stop it with :func:`shutdown`."""

    server: uvicorn.Server
    thread: threading.Thread
    host: str
    port: int
    _stopped: bool = field(default=False)


def serve(app: FastAPI, host: str = "127.0.0.1", port: int = 8008) -> ServiceHandle:
    """Run the app on a background thread; returns once the server is accepting."""
    config = uvicorn.Config(app, host=host, port=port, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True, name="ragtrace-api")
    thread.start()
    deadline = time.monotonic() + 10.0
    while not server.started:
        if not thread.is_alive():
            raise RuntimeError(f"service failed to start on {host}:{port}")
        if time.monotonic() > deadline:
            raise RuntimeError("service startup timed out")
        time.sleep(0.01)
    return ServiceHandle(server=server, thread=thread, host=host, port=port)


def shutdown(handle: ServiceHandle, timeout: float = 10.0) -> None:
    """Finish in-flight requests, then stop; idempotent; forces exit on timeout."""
    if handle._stopped:
        return
    handle.server.should_exit = True
    handle.thread.join(timeout=timeout)
    if handle.thread.is_alive():
        logger.warning("graceful shutdown timed out; forcing exit")
        handle.server.force_exit = True
        handle.thread.join(timeout=5.0)
    handle._stopped = True

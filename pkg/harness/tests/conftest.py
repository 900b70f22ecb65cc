"""Shared fixtures: toy checkpoints, synthetic pairs, a threaded server."""

from __future__ import annotations

import threading
import time
from pathlib import Path

import pytest
import uvicorn

from pairgen import synthetic_pairs, write_pairs
from finetune_harness.toy import build_toy_model
from finetune_harness.train import TrainSettings, train


@pytest.fixture(scope="session")
def toy_pairs_path(tmp_path_factory) -> Path:
    return write_pairs(
        tmp_path_factory.mktemp("pairs") / "pairs.jsonl", synthetic_pairs(50)
    )


@pytest.fixture(scope="session")
def toy_model_dir(tmp_path_factory) -> Path:
    return build_toy_model(tmp_path_factory.mktemp("toy") / "checkpoint")


@pytest.fixture(scope="session")
def trained_model_dir(tmp_path_factory, toy_model_dir, toy_pairs_path) -> Path:
    output = tmp_path_factory.mktemp("trained") / "checkpoint"
    train(
        TrainSettings(
            model_dir=str(toy_model_dir),
            pairs_path=str(toy_pairs_path),
            output_dir=str(output),
        )
    )
    return output


class ServerHandle:
    """A uvicorn server on an ephemeral port, running in a daemon thread."""

    def __init__(self, app) -> None:
        self._server = uvicorn.Server(
            uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
        )
        self._thread = threading.Thread(target=self._server.run, daemon=True)
        self.url = ""

    def start(self) -> "ServerHandle":
        self._thread.start()
        deadline = time.monotonic() + 30.0
        while not self._server.started:
            if time.monotonic() > deadline:
                raise RuntimeError("server did not start within 30s")
            if not self._thread.is_alive():
                raise RuntimeError("server thread died during startup")
            time.sleep(0.01)
        port = self._server.servers[0].sockets[0].getsockname()[1]
        self.url = f"http://127.0.0.1:{port}"
        return self

    def stop(self) -> None:
        self._server.should_exit = True
        self._thread.join(timeout=10.0)


@pytest.fixture
def serve_app():
    """Factory: serve_app(app) -> base URL; servers stop on teardown."""
    handles: list[ServerHandle] = []

    def start(app) -> str:
        handle = ServerHandle(app).start()
        handles.append(handle)
        return handle.url

    yield start
    for handle in handles:
        handle.stop()

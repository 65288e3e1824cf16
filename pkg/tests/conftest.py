"""Shared fixtures: tiny corpora, a stub model server, network denial."""

from __future__ import annotations

import http.server
import json
import socket
import threading

import pytest

from pragya.corpus import Corpus, VerseRecord


def make_corpus(rows: list[tuple[str, list[str]]]) -> Corpus:
    """Corpus from (english, tags) pairs; Devanagari fields are placeholders."""
    verses = [
        VerseRecord(
            id=i,
            devanagari="धर्मः" if i % 2 == 0 else "विद्या",
            marathi="",
            english=english,
            tags=tuple(tags),
        )
        for i, (english, tags) in enumerate(rows)
    ]
    return Corpus.from_verses(verses)


class _StubHandler(http.server.BaseHTTPRequestHandler):
    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        payload = json.loads(self.rfile.read(length) or b"{}")
        self.server.requests.append((self.path, payload))
        status, body = self.server.behavior(self.path, payload)
        data = json.dumps(body).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    """Start local HTTP stubs; yields start(behavior) -> (base_url, server).

    ``behavior(path, payload)`` returns (status, body). Requests are logged
    on ``server.requests``.
    """
    servers = []

    def start(behavior):
        server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), _StubHandler)
        server.behavior = behavior
        server.requests = []
        threading.Thread(target=server.serve_forever, daemon=True).start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_port}", server

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()


@pytest.fixture
def closed_port_url() -> str:
    """URL of a port that refuses connections."""
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return f"http://127.0.0.1:{port}"


@pytest.fixture
def deny_network(monkeypatch):
    """Make any outbound socket connect fail the test."""

    def blocked(self, address):
        raise AssertionError(f"network connect attempted to {address!r}")

    monkeypatch.setattr(socket.socket, "connect", blocked)

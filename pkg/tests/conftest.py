"""Shared fixtures: record builders, deterministic mock backends."""

import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import pytest

from capsforge.backend import TransportError
from capsforge.digest import digest64
from capsforge.records import ImageTextRecord


def make_record(i: int, **overrides) -> ImageTextRecord:
    fields = {
        "id": f"rec-{i:06d}",
        "image_ref": f"https://img.example.org/{i:06d}.jpg",
        "raw_caption": f"Landmark no. {i} photo tour DVD 1987 stock image",
        "synthetic_caption": f"a person standing near building number {i}",
    }
    fields.update(overrides)
    return ImageTextRecord(**fields)


def extract_pair(prompt: str) -> tuple[str, str]:
    """Recover the two captions from a rendered fusion prompt (mock use only)."""
    head, _, sentence2 = prompt.rpartition("\nSentence 2: ")
    _, _, sentence1 = head.partition("\nSentence 1: ")
    return sentence1, sentence2


def mock_fusion_reply(prompt: str) -> str:
    """Deterministic fusion-like reply for a rendered prompt.

    Interleaves halves of both captions so the reply shares their words
    without being a concatenation (no long contiguous run of either).
    """
    raw, synthetic = extract_pair(prompt)
    raw_words = raw.split()
    syn_words = synthetic.split()
    syn_head, syn_tail = syn_words[: len(syn_words) // 2], syn_words[len(syn_words) // 2 :]
    raw_head, raw_tail = raw_words[: len(raw_words) // 2], raw_words[len(raw_words) // 2 :]
    parts = ["Refined", "view:"] + syn_head + raw_head + ["alongside"] + syn_tail + raw_tail
    return " ".join(parts)


def fusion_transport(body: dict) -> str:
    return mock_fusion_reply(body["messages"][0]["content"])


class FlakyTransport:
    """Fails each distinct prompt with 429 a fixed number of times, then succeeds."""

    def __init__(self, failures_before_success: int = 2):
        self.failures_before_success = failures_before_success
        self.calls: dict[int, int] = {}
        self.total_calls = 0

    def __call__(self, body: dict) -> str:
        prompt = body["messages"][0]["content"]
        key = digest64(prompt)
        self.total_calls += 1
        seen = self.calls.get(key, 0)
        self.calls[key] = seen + 1
        if seen < self.failures_before_success:
            raise TransportError(429, "rate limited")
        return mock_fusion_reply(prompt)


class _MockBackendHandler(BaseHTTPRequestHandler):
    fail_modulo = 0  # every Nth prompt (by digest) fails permanently

    def log_message(self, fmt, *args):
        pass

    def do_POST(self):
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length).decode("utf-8"))
        prompt = body["messages"][0]["content"]
        if self.fail_modulo and digest64(prompt) % self.fail_modulo == 0:
            self.send_response(500)
            self.send_header("Content-Length", "0")
            self.end_headers()
            return
        reply = json.dumps(
            {"choices": [{"message": {"content": mock_fusion_reply(prompt)}}]}
        ).encode("utf-8")
        self.send_response(200)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(reply)))
        self.end_headers()
        self.wfile.write(reply)


@pytest.fixture
def mock_backend_server():
    """Local chat-completion mock; yields a factory(fail_modulo) -> base URL."""
    servers = []

    def start(fail_modulo: int = 0) -> str:
        handler = type("Handler", (_MockBackendHandler,), {"fail_modulo": fail_modulo})
        server = ThreadingHTTPServer(("127.0.0.1", 0), handler)
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_address[1]}/v1/chat/completions"

    yield start
    for server in servers:
        server.shutdown()
        server.server_close()

"""HTTP service speaking the normalization wire protocol.

Endpoints:

    GET  /v1/health     -> 200 {"model": ..., "status": "ok" | "loading"}
    POST /v1/normalize  {"lang": ..., "sentences": [...]}
                        -> 200 {"model": ..., "normalized": [...]}

Schema violations get 400 with {"error": ...}; /v1/normalize returns 503
until the model has finished loading.  The health endpoint never touches
the engine, so it stays responsive while a request is being decoded.
Responses are serialized canonically (sorted keys, fixed separators) so
recorded transcripts can be compared byte-for-byte.

One engine instance serves all requests: handler threads take turns on
an engine lock, and each request's sentences are run through the engine
in slices of at most max_batch.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .engine import make_engine

log = logging.getLogger("modelshim.service")

_NOT_FOUND = "no such endpoint"
_LOADING = "model is loading"


def canonical_json(obj) -> bytes:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


@dataclass
class Faults:
    """Deliberate misbehaviour, for exercising client error handling.

    These exist so a client's retry and protocol-error paths can be
    tested against the real server instead of a hand-rolled stub; they
    are never enabled by the command line.  slow_first stalls the first
    N normalize calls for slow_seconds while holding the engine (a cold
    cache, in effect); drop_count_first violates the length contract on
    the first N responses.
    """

    slow_first: int = 0
    slow_seconds: float = 0.0
    drop_count_first: int = 0


class _State:
    def __init__(self, cfg, faults: Faults | None):
        self.cfg = cfg
        self.faults = faults or Faults()
        self.engine = None
        self.ready = threading.Event()
        self.engine_lock = threading.Lock()
        self.fault_lock = threading.Lock()

    def model_id(self):
        return self.engine.model_id if self.engine is not None else None


def _schema_error(payload):
    """Error string for a bad normalize body, or None if it is valid."""
    if not isinstance(payload, dict):
        return "request body must be a JSON object"
    if "lang" not in payload:
        return "request is missing 'lang'"
    if not isinstance(payload["lang"], str) or not payload["lang"]:
        return "'lang' must be a non-empty string"
    if "sentences" not in payload:
        return "request is missing 'sentences'"
    sentences = payload["sentences"]
    if not isinstance(sentences, list) or not all(
        isinstance(s, str) for s in sentences
    ):
        return "'sentences' must be an array of strings"
    return None


def handle_normalize(state: _State, payload) -> tuple[int, dict]:
    """Status and response body for one normalize request."""
    if not state.ready.is_set():
        return 503, {"error": _LOADING}
    error = _schema_error(payload)
    if error is not None:
        return 400, {"error": error}
    lang = payload["lang"]
    sentences = payload["sentences"]
    cfg = state.cfg
    if not cfg.echo_mode and lang not in cfg.lang_map:
        return 400, {"error": f"no model language code configured for '{lang}'"}

    stall = 0.0
    with state.fault_lock:
        if state.faults.slow_first > 0:
            state.faults.slow_first -= 1
            stall = state.faults.slow_seconds
        drop = state.faults.drop_count_first > 0
        if drop:
            state.faults.drop_count_first -= 1

    outputs: list[str] = []
    with state.engine_lock:
        if stall:
            time.sleep(stall)
        for start in range(0, len(sentences), cfg.max_batch):
            outputs.extend(
                state.engine.normalize(lang, sentences[start : start + cfg.max_batch])
            )
    if drop and outputs:
        outputs = outputs[:-1]
    return 200, {"model": state.model_id(), "normalized": outputs}


class _Handler(BaseHTTPRequestHandler):
    server_version = "modelshim/0.1"
    protocol_version = "HTTP/1.1"

    @property
    def state(self) -> _State:
        return self.server.state

    def log_message(self, fmt, *args):
        log.debug("%s %s", self.address_string(), fmt % args)

    def _reply(self, status: int, obj) -> None:
        body = canonical_json(obj)
        try:
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)
        except (BrokenPipeError, ConnectionResetError):
            # client gave up (e.g. timed out) before the reply was
            # written; nothing sensible to do but drop it
            log.debug("client closed connection before reply")

    def do_GET(self):
        if self.path != "/v1/health":
            self._reply(404, {"error": _NOT_FOUND})
            return
        state = self.state
        status = "ok" if state.ready.is_set() else "loading"
        self._reply(200, {"model": state.model_id(), "status": status})

    def do_POST(self):
        if self.path != "/v1/normalize":
            self._reply(404, {"error": _NOT_FOUND})
            return
        length = int(self.headers.get("Content-Length", 0))
        raw = self.rfile.read(length)
        try:
            payload = json.loads(raw)
        except ValueError:
            self._reply(400, {"error": "request body is not valid JSON"})
            return
        status, obj = handle_normalize(self.state, payload)
        self._reply(status, obj)


class _Server(ThreadingHTTPServer):
    daemon_threads = True
    # handler threads may linger in a deliberate stall; don't block exit
    allow_reuse_address = True


class ShimServer:
    """A running service; use as a context manager or call close()."""

    def __init__(self, cfg, host="127.0.0.1", port=0, warmup_seconds=0.0,
                 faults: Faults | None = None):
        self.state = _State(cfg, faults)
        self._httpd = _Server((host, port), _Handler)
        self._httpd.state = self.state
        self._thread = threading.Thread(
            target=self._httpd.serve_forever, name="modelshim-http", daemon=True
        )
        self._thread.start()
        self._loader = threading.Thread(
            target=self._load, args=(warmup_seconds,), name="modelshim-load",
            daemon=True,
        )
        self._loader.start()

    def _load(self, warmup_seconds: float) -> None:
        started = time.monotonic()
        engine = make_engine(self.state.cfg)
        remaining = warmup_seconds - (time.monotonic() - started)
        if remaining > 0:
            time.sleep(remaining)
        self.state.engine = engine
        self.state.ready.set()
        log.info("serving model %s on %s", engine.model_id, self.base_url)

    @property
    def base_url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}"

    def wait_ready(self, timeout: float = 300.0) -> None:
        if not self.state.ready.wait(timeout):
            raise TimeoutError("model did not finish loading in time")

    def close(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False


def serve(cfg, host="127.0.0.1", port=0, warmup_seconds=0.0,
          faults: Faults | None = None) -> ShimServer:
    """Start serving cfg; returns the running server."""
    return ShimServer(cfg, host=host, port=port, warmup_seconds=warmup_seconds,
                      faults=faults)

"""Fill-mask HTTP endpoint implementing the cs-probe wire protocol.

    POST /fill  {"masked_text": "... <mask> ...", "top_k": int}
    -> 200 {"model_name": str, "candidates": [{"word", "p"}, ...]}

Responses carry cleaned candidates sorted by descending probability.
Malformed requests get a 400 with an error body; model failures a 500.
A bounded semaphore caps concurrent model invocations; correctness does
not depend on request ordering.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from cs_probe_extractor.fillmask import MASK, FillMaskModel

logger = logging.getLogger(__name__)


def _error_body(message: str) -> bytes:
    return json.dumps({"error": message}).encode("utf-8")


class FillMaskHandler(BaseHTTPRequestHandler):
    model: FillMaskModel = None  # set by make_server
    gate: threading.BoundedSemaphore = None

    def _send(self, status: int, body: bytes) -> None:
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_POST(self):
        if self.path != "/fill":
            self._send(404, _error_body("unknown path; POST /fill"))
            return
        try:
            length = int(self.headers.get("Content-Length", 0))
            payload = json.loads(self.rfile.read(length))
        except (ValueError, json.JSONDecodeError):
            self._send(400, _error_body("body must be a JSON object"))
            return
        masked_text = payload.get("masked_text")
        top_k = payload.get("top_k")
        if not isinstance(masked_text, str) or masked_text.count(MASK) != 1:
            self._send(400, _error_body(f"masked_text must contain exactly one {MASK!r}"))
            return
        if not isinstance(top_k, int) or isinstance(top_k, bool) or top_k < 1:
            self._send(400, _error_body("top_k must be a positive integer"))
            return
        try:
            with self.gate:
                candidates = self.model.propose_clean(masked_text, top_k)
        except Exception as exc:
            logger.exception("fill-mask failed")
            self._send(500, _error_body(f"model failure: {exc}"))
            return
        body = json.dumps(
            {
                "model_name": self.model.model_name,
                "candidates": [{"word": w, "p": p} for w, p in candidates],
            },
            sort_keys=True,
        ).encode("utf-8")
        self._send(200, body)

    def log_message(self, fmt, *args):
        logger.debug("%s " + fmt, self.address_string(), *args)


def make_server(
    model: FillMaskModel, host: str = "127.0.0.1", port: int = 8000,
    max_in_flight: int = 4,
) -> ThreadingHTTPServer:
    handler = type(
        "BoundFillMaskHandler",
        (FillMaskHandler,),
        {"model": model, "gate": threading.BoundedSemaphore(max_in_flight)},
    )
    return ThreadingHTTPServer((host, port), handler)


def serve(model_name_or_path: str, host: str, port: int,
          device: str | int = -1, max_in_flight: int = 4) -> None:
    model = FillMaskModel(model_name_or_path, device=device)
    server = make_server(model, host, port, max_in_flight)
    logger.info("serving %s on %s:%d", model.model_name, host, server.server_address[1])
    try:
        server.serve_forever()
    finally:
        server.server_close()

"""HTTP serve mode: the pipeline behind POST /v1/answer.

Requests are handled concurrently; each runs the same code path as the
``pipeline`` subcommand, so responses are byte-identical to CLI output for
the same inputs and configuration.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from .corpus import Passage
from .jsonio import canonical_dumps
from .pipeline import PipelineConfig, build_provider, package_to_dict, run_pipeline
from .providers import ProviderError

logger = logging.getLogger(__name__)


def make_server(host: str, port: int, config: PipelineConfig) -> ThreadingHTTPServer:
    provider = build_provider(config)

    class Handler(BaseHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # route through logging, not stderr
            logger.info("%s - %s", self.address_string(), fmt % args)

        def _reply(self, status: int, payload: dict) -> None:
            body = (canonical_dumps(payload) + "\n").encode("utf-8")
            self.send_response(status)
            self.send_header("Content-Type", "application/json; charset=utf-8")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == "/v1/health":
                self._reply(200, {"status": "ok", "mode": config.provider.mode.value})
            else:
                self._reply(404, {"error": f"no such path: {self.path}"})

        def do_POST(self):
            if self.path != "/v1/answer":
                self._reply(404, {"error": f"no such path: {self.path}"})
                return
            try:
                length = int(self.headers.get("Content-Length", "0"))
                raw = self.rfile.read(length)
                data = json.loads(raw.decode("utf-8"))
                if not isinstance(data, dict) or not isinstance(data.get("query"), str):
                    raise ValueError("body must be an object with a string 'query'")
                passages = _parse_passages(data.get("passages", []))
            except (ValueError, UnicodeDecodeError) as exc:
                self._reply(400, {"error": str(exc)})
                return
            try:
                package = run_pipeline(data["query"], passages, config, provider=provider)
            except ProviderError as exc:
                self._reply(502, {"error": f"provider error: {exc}"})
                return
            except Exception as exc:  # noqa: BLE001 - request boundary
                logger.exception("answer failed")
                self._reply(500, {"error": f"internal error: {exc}"})
                return
            self._reply(200, package_to_dict(package))

    return ThreadingHTTPServer((host, port), Handler)


def _parse_passages(data) -> list[Passage]:
    if not isinstance(data, list):
        raise ValueError("'passages' must be a list")
    passages = []
    for i, item in enumerate(data, start=1):
        if isinstance(item, str):
            item = {"text": item}
        if not isinstance(item, dict) or "text" not in item:
            raise ValueError(f"passage {i} must be an object with a 'text' field")
        passages.append(
            Passage(
                id=str(item.get("id", f"p{i}")),
                rank=int(item.get("rank", i)),
                text=item["text"],
                url=item.get("url", ""),
            )
        )
    return passages


def serve_forever(host: str, port: int, config: PipelineConfig) -> None:
    server = make_server(host, port, config)
    logger.info("serving on %s:%s", host, port)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.shutdown()


def start_in_thread(host: str, port: int, config: PipelineConfig) -> tuple[ThreadingHTTPServer, threading.Thread]:
    """Start the server on a background thread (used by tests and demos)."""
    server = make_server(host, port, config)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return server, thread


__all__ = ["make_server", "serve_forever", "start_in_thread"]

"""HTTP/1.1 JSON front ends for the off-chain services, and their clients.

Routes::

    GET  /credit/{tax_id}  -> {"tax_id", "name", "creditworthy", "score"} | 404
    POST /erp/messages     {"tx_hash", "log_index", "record": {...}} -> {"stored": bool} | 400
    GET  /erp/messages     -> [{"tx_hash", "log_index", "record", "received_at"}, ...]

During a credit outage the server drops the connection without answering,
so clients see a connection error rather than an HTTP status.
"""

from __future__ import annotations

import json
import logging
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from urllib.parse import quote, unquote

import requests

from .credit import CreditProfile, CreditService, NotFound, ServiceUnavailable
from .erp import ErpSink, parse_delivery
from .scans import ScanRecord

logger = logging.getLogger(__name__)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    # Headers and body go out in separate writes; Nagle would stall the body.
    disable_nagle_algorithm = True
    credit: CreditService | None = None
    erp: ErpSink | None = None

    def log_message(self, format, *args):
        logger.debug("%s %s", self.address_string(), format % args)

    def _send(self, status: int, body) -> None:
        raw = json.dumps(body).encode()
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(raw)))
        self.end_headers()
        self.wfile.write(raw)

    def do_GET(self):
        if self.credit is not None and self.path.startswith("/credit/"):
            tax_id = unquote(self.path[len("/credit/"):])
            try:
                profile = self.credit.lookup(tax_id)
            except ServiceUnavailable:
                self.close_connection = True
                return
            except NotFound:
                self._send(404, {"error": f"unknown tax_id {tax_id}"})
                return
            self._send(200, profile.to_json())
        elif self.erp is not None and self.path == "/erp/messages":
            self._send(200, [m.to_json() for m in self.erp.dump()])
        else:
            self._send(404, {"error": "no such route"})

    def do_POST(self):
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length)
        if self.erp is None or self.path != "/erp/messages":
            self._send(404, {"error": "no such route"})
            return
        try:
            source, record = parse_delivery(json.loads(raw))
        except (ValueError, UnicodeDecodeError) as exc:
            self._send(400, {"error": str(exc)})
            return
        self._send(200, {"stored": self.erp.receive(source, record)})


class ServiceServer:
    """Runs one service on a background thread. Port 0 picks a free port."""

    def __init__(self, *, credit: CreditService | None = None, erp: ErpSink | None = None,
                 host: str = "127.0.0.1", port: int = 0):
        handler = type("Handler", (_Handler,), {"credit": credit, "erp": erp})
        self.httpd = ThreadingHTTPServer((host, port), handler)
        self.httpd.daemon_threads = True
        self._thread = threading.Thread(target=self.httpd.serve_forever, kwargs={"poll_interval": 0.05},
                                        daemon=True)

    @property
    def url(self) -> str:
        host, port = self.httpd.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> ServiceServer:
        self._thread.start()
        return self

    def stop(self) -> None:
        self.httpd.shutdown()
        self.httpd.server_close()

    def __enter__(self):
        return self.start()

    def __exit__(self, *exc):
        self.stop()


class CreditClient:
    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = requests.Session()

    def lookup(self, tax_id: str) -> CreditProfile | None:
        try:
            resp = self.session.get(f"{self.base_url}/credit/{quote(tax_id, safe='')}", timeout=self.timeout)
        except requests.ConnectionError as exc:
            raise ServiceUnavailable(str(exc)) from exc
        if resp.status_code == 404:
            return None
        if resp.status_code >= 500:
            raise ServiceUnavailable(f"credit service answered {resp.status_code}")
        resp.raise_for_status()
        return CreditProfile.from_json(resp.json())


class LocalCreditClient:
    """Same contract as ``CreditClient`` without the socket."""

    def __init__(self, service: CreditService):
        self.service = service

    def lookup(self, tax_id: str) -> CreditProfile | None:
        try:
            return self.service.lookup(tax_id)
        except NotFound:
            return None


class ErpClient:
    def __init__(self, base_url: str, timeout: float = 5.0):
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self.session = requests.Session()

    def deliver(self, source: tuple[str, int], record: ScanRecord) -> bool:
        body = {"tx_hash": source[0], "log_index": source[1], "record": record.to_json()}
        try:
            resp = self.session.post(f"{self.base_url}/erp/messages", json=body, timeout=self.timeout)
        except requests.ConnectionError as exc:
            raise ServiceUnavailable(str(exc)) from exc
        if resp.status_code >= 500:
            raise ServiceUnavailable(f"erp answered {resp.status_code}")
        resp.raise_for_status()
        return bool(resp.json()["stored"])

    def dump(self) -> list[dict]:
        resp = self.session.get(f"{self.base_url}/erp/messages", timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()


class LocalErpClient:
    def __init__(self, sink: ErpSink):
        self.sink = sink

    def deliver(self, source: tuple[str, int], record: ScanRecord) -> bool:
        return self.sink.receive(source, record)

    def dump(self) -> list[dict]:
        return [m.to_json() for m in self.sink.dump()]

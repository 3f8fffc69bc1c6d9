"""The quantum cloud: runs a circuit on a basis/superposition input, returns probabilities.

``CloudCore`` holds the logic and the request log and can be used in
process. ``CloudServer`` puts it behind HTTP/1.1 + JSON:

    GET  /v1/health  -> {"version": ..., "max_qubits": ...}
    POST /v1/run     -> {"probs": [...], "shots_used": ..., "request_id": ...}
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from .. import __version__
from ..errors import ServiceError, ServiceStartupError
from ..simulator import run_exact, sample_probabilities
from .wire import canonical_json, input_to_wire, make_run_request, observable_to_wire, parse_run_request

log = logging.getLogger(__name__)

DEFAULT_MAX_QUBITS = 12


@dataclass
class ServiceConfig:
    max_qubits: int = DEFAULT_MAX_QUBITS
    rng_seed: int | None = None
    log_path: str | os.PathLike | None = None


@dataclass(frozen=True)
class RequestLogEntry:
    """One served run. Carries circuit structure and indices only."""

    timestamp: str
    request_id: str
    seq: int
    n: int
    reps: int
    entanglement: str
    thetas: list
    observable: dict
    input: dict
    shots: int | None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "RequestLogEntry":
        return cls(**obj)


class CloudCore:
    def __init__(self, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig()
        seed = self.config.rng_seed
        # entropy-seeded unless pinned; per-request streams derive from this root
        self._root_entropy = (
            np.random.SeedSequence().entropy if seed is None else int(seed)
        )
        self._lock = threading.Lock()
        self._log: list[RequestLogEntry] = []
        self._occurrences: dict[str, int] = {}
        self._log_path = Path(self.config.log_path) if self.config.log_path else None

    def health(self) -> dict:
        return {"version": __version__, "max_qubits": self.config.max_qubits}

    def handle_run(self, payload) -> dict:
        n = payload.get("n") if isinstance(payload, dict) else None
        if isinstance(n, int) and not isinstance(n, bool) and n > self.config.max_qubits:
            raise ServiceError(
                "qubit_limit_exceeded",
                f"n={n} exceeds this service's limit of {self.config.max_qubits} qubits",
                status=422,
            )
        ansatz, observable, input_state, shots = parse_run_request(payload)
        normalized = make_run_request(ansatz, observable, input_state, shots)
        digest = hashlib.sha256(canonical_json(normalized).encode()).hexdigest()
        request_id = digest[:24]

        with self._lock:
            occurrence = self._occurrences.get(digest, 0)
            self._occurrences[digest] = occurrence + 1

        probs = run_exact(ansatz, observable, input_state)
        if shots is not None:
            # keyed by request content, so concurrent arrival order cannot change the draw
            rng = np.random.default_rng([self._root_entropy, int(digest[:16], 16), occurrence])
            probs = sample_probabilities(probs, shots, rng)

        self._append(
            RequestLogEntry(
                timestamp=datetime.now(timezone.utc).isoformat(),
                request_id=request_id,
                seq=-1,
                n=ansatz.n,
                reps=ansatz.reps,
                entanglement=ansatz.entanglement,
                thetas=list(ansatz.thetas),
                observable=observable_to_wire(observable),
                input=input_to_wire(input_state),
                shots=shots,
            )
        )
        return {"probs": probs.tolist(), "shots_used": shots, "request_id": request_id}

    def _append(self, entry: RequestLogEntry) -> None:
        with self._lock:
            entry = RequestLogEntry(**{**entry.to_dict(), "seq": len(self._log)})
            self._log.append(entry)
            if self._log_path is not None:
                with self._log_path.open("a") as fh:
                    fh.write(json.dumps(entry.to_dict()) + "\n")

    def audit_log(self) -> list[RequestLogEntry]:
        with self._lock:
            return list(self._log)


def read_audit_log(path) -> list[RequestLogEntry]:
    entries = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                entries.append(RequestLogEntry.from_dict(json.loads(line)))
    return entries


def _make_handler(core: CloudCore):
    class Handler(BaseHTTPRequestHandler):
        server_version = f"vqcloud/{__version__}"

        def log_message(self, fmt, *args):
            log.debug("%s - " + fmt, self.address_string(), *args)

        def _send(self, status: int, body: dict) -> None:
            data = canonical_json(body).encode()
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(data)))
            self.end_headers()
            self.wfile.write(data)

        def do_GET(self):
            if self.path == "/v1/health":
                self._send(200, core.health())
            else:
                self._send(404, {"error": {"code": "not_found", "message": self.path}})

        def do_POST(self):
            if self.path != "/v1/run":
                self._send(404, {"error": {"code": "not_found", "message": self.path}})
                return
            length = int(self.headers.get("Content-Length") or 0)
            raw = self.rfile.read(length)
            try:
                payload = json.loads(raw)
            except (json.JSONDecodeError, UnicodeDecodeError) as exc:
                self._send(400, {"error": {"code": "malformed_json", "message": str(exc)}})
                return
            try:
                self._send(200, core.handle_run(payload))
            except ServiceError as exc:
                self._send(exc.status, exc.to_dict())

    return Handler


class CloudServer:
    """A running HTTP front end for a ``CloudCore``."""

    def __init__(self, host: str = "127.0.0.1", port: int = 0, config: ServiceConfig | None = None):
        self.core = CloudCore(config)
        try:
            self._httpd = ThreadingHTTPServer((host, port), _make_handler(self.core))
        except OSError as exc:
            raise ServiceStartupError(f"cannot bind {host}:{port}: {exc}") from exc
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def address(self) -> tuple[str, int]:
        return self._httpd.server_address[:2]

    @property
    def url(self) -> str:
        host, port = self.address
        return f"http://{host}:{port}"

    def start(self) -> "CloudServer":
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def serve_forever(self) -> None:
        self._httpd.serve_forever()

    def shutdown(self) -> None:
        if self._thread is not None:
            self._httpd.shutdown()
            self._thread.join()
            self._thread = None
        self._httpd.server_close()

    def audit_log(self) -> list[RequestLogEntry]:
        return self.core.audit_log()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.shutdown()


def serve(host: str = "127.0.0.1", port: int = 0, config: ServiceConfig | None = None) -> CloudServer:
    """Bind and start serving in a background thread; ``port=0`` picks a free port."""
    return CloudServer(host, port, config).start()


def audit_log(handle) -> list[RequestLogEntry]:
    """Request log of a server, an in-process core, or an NDJSON log file."""
    if isinstance(handle, (CloudServer, CloudCore)):
        return handle.audit_log()
    return read_audit_log(handle)

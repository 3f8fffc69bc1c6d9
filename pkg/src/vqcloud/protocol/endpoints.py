"""Client-side transports for the cloud wire protocol."""

from __future__ import annotations

import json
import urllib.error
import urllib.request

import numpy as np

from ..cloud.service import CloudCore, CloudServer
from ..cloud.wire import make_run_request
from ..errors import ProtocolError, ServiceError, TransportError


class HttpEndpoint:
    def __init__(self, url: str, timeout: float = 60.0):
        self.url = url.rstrip("/")
        self.timeout = timeout

    def _call(self, path: str, body: dict | None = None) -> dict:
        data = None if body is None else json.dumps(body).encode()
        req = urllib.request.Request(
            self.url + path, data=data, headers={"Content-Type": "application/json"}
        )
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return json.loads(resp.read())
        except urllib.error.HTTPError as exc:
            try:
                err = json.loads(exc.read())["error"]
            except Exception:
                raise TransportError(f"{self.url}{path}: HTTP {exc.code}") from exc
            raise ServiceError(err["code"], err["message"], status=exc.code) from None
        except (urllib.error.URLError, OSError) as exc:
            raise TransportError(f"cannot reach {self.url}{path}: {exc}") from exc

    def health(self) -> dict:
        return self._call("/v1/health")

    def run(self, request: dict) -> dict:
        return self._call("/v1/run", request)

    def __repr__(self):
        return f"HttpEndpoint({self.url!r})"


class LocalEndpoint:
    """Talks to an in-process ``CloudCore`` through the same JSON payloads."""

    def __init__(self, core: CloudCore | None = None):
        self.core = core if core is not None else CloudCore()

    def health(self) -> dict:
        return self.core.health()

    def run(self, request: dict) -> dict:
        return self.core.handle_run(json.loads(json.dumps(request)))


def connect(endpoint):
    """Accept a URL, a running server, a core, or anything with a ``run`` method."""
    if isinstance(endpoint, str):
        return HttpEndpoint(endpoint)
    if isinstance(endpoint, CloudServer):
        return HttpEndpoint(endpoint.url)
    if isinstance(endpoint, CloudCore):
        return LocalEndpoint(endpoint)
    if hasattr(endpoint, "run"):
        return endpoint
    raise TypeError(f"cannot use {endpoint!r} as a cloud endpoint")


def request_probabilities(endpoint, ansatz, observable, input_state, shots=None) -> np.ndarray:
    response = endpoint.run(make_run_request(ansatz, observable, input_state, shots))
    probs = np.asarray(response.get("probs"), dtype=float)
    if probs.shape != (1 << ansatz.n,):
        raise ProtocolError(
            f"expected {1 << ansatz.n} probabilities for {input_state}, got shape {probs.shape}"
        )
    return probs

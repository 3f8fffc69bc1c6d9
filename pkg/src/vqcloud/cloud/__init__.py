from .service import (
    CloudCore,
    CloudServer,
    RequestLogEntry,
    ServiceConfig,
    audit_log,
    read_audit_log,
    serve,
)
from .wire import RUN_REQUEST_SCHEMA, canonical_json, make_run_request, parse_run_request

__all__ = [
    "CloudCore",
    "CloudServer",
    "RequestLogEntry",
    "ServiceConfig",
    "audit_log",
    "read_audit_log",
    "serve",
    "RUN_REQUEST_SCHEMA",
    "canonical_json",
    "make_run_request",
    "parse_run_request",
]

"""JSON wire format between the data owner's client and the cloud.

The request schema is closed (``additionalProperties: false`` everywhere)
and its ``input`` member can only name a basis state or a superposition of
two basis states by index. There is no field through which amplitudes or
feature values could travel.
"""

from __future__ import annotations

import json

import jsonschema

from ..errors import InvalidGateError, InvalidInputError, ServiceError, ConfigurationError
from ..simulator import (
    AnsatzSpec,
    Basis,
    Gate,
    InputState,
    ObservableRotation,
    Superposition,
    num_parameters,
)

_INDEX = {"type": "integer", "minimum": 0}

GATE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"kind": {"const": "ry"}, "qubit": _INDEX, "theta": {"type": "number"}},
            "required": ["kind", "qubit", "theta"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "cx"}, "control": _INDEX, "qubit": _INDEX},
            "required": ["kind", "control", "qubit"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"kind": {"const": "x"}, "qubit": _INDEX},
            "required": ["kind", "qubit"],
            "additionalProperties": False,
        },
    ]
}

INPUT_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "properties": {"type": {"const": "basis"}, "i": _INDEX},
            "required": ["type", "i"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {"type": {"const": "superposition"}, "r": _INDEX, "i": _INDEX},
            "required": ["type", "r", "i"],
            "additionalProperties": False,
        },
    ]
}

RUN_REQUEST_SCHEMA = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "ansatz": {
            "type": "object",
            "properties": {
                "reps": {"type": "integer", "minimum": 1},
                "entanglement": {"enum": ["full", "linear"]},
                "thetas": {"type": "array", "items": {"type": "number"}},
            },
            "required": ["reps", "entanglement", "thetas"],
            "additionalProperties": False,
        },
        "observable": {
            "type": "object",
            "properties": {"gates": {"type": "array", "items": GATE_SCHEMA}},
            "required": ["gates"],
            "additionalProperties": False,
        },
        "input": INPUT_SCHEMA,
        "shots": {"type": ["integer", "null"], "minimum": 1},
    },
    "required": ["n", "ansatz", "input"],
    "additionalProperties": False,
}

_validator = jsonschema.Draft202012Validator(RUN_REQUEST_SCHEMA)


def gate_to_wire(gate: Gate) -> dict:
    if gate.kind == "ry":
        return {"kind": "ry", "qubit": gate.qubit, "theta": gate.theta}
    if gate.kind == "cx":
        return {"kind": "cx", "control": gate.control, "qubit": gate.qubit}
    return {"kind": "x", "qubit": gate.qubit}


def gate_from_wire(obj: dict) -> Gate:
    return Gate(obj["kind"], obj["qubit"], control=obj.get("control"), theta=obj.get("theta"))


def input_to_wire(spec: InputState) -> dict:
    if isinstance(spec, Basis):
        return {"type": "basis", "i": spec.i}
    if isinstance(spec, Superposition):
        return {"type": "superposition", "r": spec.r, "i": spec.i}
    raise InvalidInputError(f"only basis and superposition inputs can be sent, got {spec!r}")


def input_from_wire(obj: dict) -> InputState:
    if obj["type"] == "basis":
        return Basis(obj["i"])
    return Superposition(obj["r"], obj["i"])


def ansatz_to_wire(ansatz: AnsatzSpec) -> dict:
    return {"reps": ansatz.reps, "entanglement": ansatz.entanglement, "thetas": list(ansatz.thetas)}


def observable_to_wire(observable: ObservableRotation) -> dict:
    return {"gates": [gate_to_wire(g) for g in observable.gates]}


def make_run_request(
    ansatz: AnsatzSpec,
    observable: ObservableRotation,
    input_state: InputState,
    shots: int | None = None,
) -> dict:
    return {
        "n": ansatz.n,
        "ansatz": ansatz_to_wire(ansatz),
        "observable": observable_to_wire(observable),
        "input": input_to_wire(input_state),
        "shots": shots,
    }


def parse_run_request(payload) -> tuple[AnsatzSpec, ObservableRotation, InputState, int | None]:
    """Validate a decoded request body; raise ``ServiceError`` with a stable code on rejection."""
    errors = sorted(_validator.iter_errors(payload), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise ServiceError("schema_error", f"{where}: {err.message}")

    n = payload["n"]
    spec = payload["ansatz"]
    expected = num_parameters(n, spec["reps"])
    if len(spec["thetas"]) != expected:
        raise ServiceError(
            "invalid_thetas_length",
            f"n={n}, reps={spec['reps']} needs {expected} angles, got {len(spec['thetas'])}",
        )
    try:
        ansatz = AnsatzSpec(n, spec["reps"], spec["entanglement"], tuple(spec["thetas"]))
    except ConfigurationError as exc:
        raise ServiceError("invalid_ansatz", str(exc)) from None

    try:
        gates = [gate_from_wire(g) for g in payload.get("observable", {"gates": []})["gates"]]
        for g in gates:
            g.check(n)
    except InvalidGateError as exc:
        raise ServiceError("invalid_gate", str(exc)) from None

    try:
        input_state = input_from_wire(payload["input"])
    except InvalidInputError as exc:
        raise ServiceError("invalid_input", str(exc)) from None
    if any(idx >= 1 << n for idx in input_state.indices()):
        raise ServiceError("invalid_input", f"basis index out of range for n={n}")

    return ansatz, ObservableRotation(tuple(gates)), input_state, payload.get("shots")


def canonical_json(obj) -> str:
    """Stable serialization: sorted keys, no whitespace, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False)

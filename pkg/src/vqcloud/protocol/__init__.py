from .endpoints import HttpEndpoint, LocalEndpoint, connect, request_probabilities
from .extraction import (
    BMatrix,
    ExtractionOptions,
    ExtractionReport,
    ExtractionState,
    SignTable,
    extract_b,
    fallback_round,
    reconstruct_probabilities,
)
from .privacy import (
    DecoyResult,
    DecoySchedule,
    ExtractionPlan,
    decoy_parameter_sets,
    extract_padded,
    extract_with_decoys,
    pad_dimension,
)
from .signs import Sign, Tolerances, choose_reference, recover_sign, recover_signs

__all__ = [
    "HttpEndpoint",
    "LocalEndpoint",
    "connect",
    "request_probabilities",
    "BMatrix",
    "ExtractionOptions",
    "ExtractionReport",
    "ExtractionState",
    "SignTable",
    "extract_b",
    "fallback_round",
    "reconstruct_probabilities",
    "DecoyResult",
    "DecoySchedule",
    "ExtractionPlan",
    "decoy_parameter_sets",
    "extract_padded",
    "extract_with_decoys",
    "pad_dimension",
    "Sign",
    "Tolerances",
    "choose_reference",
    "recover_sign",
    "recover_signs",
]

"""Train real-amplitude variational classifiers on a remote quantum service without sending data.

The cloud only ever runs basis states and two-basis superpositions. From
the returned probabilities the client reconstructs the signed amplitude
matrix ``B`` of the circuit, and all data-dependent work (encoding, costs,
inference) is done classically as ``p(x) = (B f(x))**2``.
"""

__version__ = "0.1.0"

from .simulator import (  # noqa: E402
    AnsatzSpec,
    Basis,
    Gate,
    ObservableRotation,
    Superposition,
    build_real_amplitudes,
    marginal_g,
    marginals,
    prepare_input,
    run_exact,
    run_sampled,
    run_state,
)
from .cloud import CloudCore, CloudServer, ServiceConfig, audit_log, serve  # noqa: E402
from .protocol import (  # noqa: E402
    BMatrix,
    ExtractionOptions,
    HttpEndpoint,
    LocalEndpoint,
    extract_b,
    recover_sign,
)
from .encoding import AmplitudeEncoder, QubitEncoder, amplitude_encode, qubit_encode  # noqa: E402
from .data import LabeledDataset, make_blobs  # noqa: E402
from .trainer import TrainConfig, TrainedModel, forward, infer, train  # noqa: E402

__all__ = [
    "AnsatzSpec",
    "Basis",
    "Gate",
    "ObservableRotation",
    "Superposition",
    "build_real_amplitudes",
    "marginal_g",
    "marginals",
    "prepare_input",
    "run_exact",
    "run_sampled",
    "run_state",
    "CloudCore",
    "CloudServer",
    "ServiceConfig",
    "audit_log",
    "serve",
    "BMatrix",
    "ExtractionOptions",
    "HttpEndpoint",
    "LocalEndpoint",
    "extract_b",
    "recover_sign",
    "AmplitudeEncoder",
    "QubitEncoder",
    "amplitude_encode",
    "qubit_encode",
    "LabeledDataset",
    "make_blobs",
    "TrainConfig",
    "TrainedModel",
    "forward",
    "infer",
    "train",
]

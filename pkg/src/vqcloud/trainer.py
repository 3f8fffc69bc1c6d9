"""Classical training and inference on top of an extracted B matrix.

The forward pass is ``p = (B f)**2`` followed by per-qubit marginals; no
quantum access is needed once B is known. Each gradient component costs
two B extractions (at shifted angles), which is where the cloud is used.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .data import LabeledDataset
from .encoding import CoefficientVector, encoder_from_dict, pad_features
from .errors import (
    ConfigurationError,
    GradientInterrupted,
    InvalidArgumentError,
    ShapeError,
    TrainingAborted,
    TransportError,
)
from .protocol.extraction import BMatrix, ExtractionOptions, ExtractionReport, extract_b
from .protocol.endpoints import connect
from .simulator import AnsatzSpec, ObservableRotation, marginals, num_parameters, run_state

log = logging.getLogger(__name__)

EPS_LOG = 1e-12
GRADIENT_METHODS = ("parameter-shift", "cost-shift", "finite-difference")


# -- forward pass and costs --------------------------------------------------

def forward_batch(b: BMatrix, coefficients) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and marginals for a batch of normalized coefficient rows."""
    F = np.atleast_2d(np.asarray(coefficients, dtype=float))
    if F.shape[1] != b.d:
        raise ShapeError(f"coefficient length {F.shape[1]} does not match B with d={b.d}")
    P = (F @ b.entries.T) ** 2
    return P, marginals(P)


def forward(b: BMatrix, coef) -> tuple[np.ndarray, np.ndarray]:
    f = coef.normalized if isinstance(coef, CoefficientVector) else coef
    P, G = forward_batch(b, f)
    return P[0], G[0]


def cost_mse(g, label):
    g, label = np.asarray(g, dtype=float), np.asarray(label, dtype=float)
    if g.shape != label.shape:
        raise ShapeError(f"marginals {g.shape} vs label {label.shape}")
    return np.mean((label - g) ** 2, axis=-1)


def cost_ce(g, label, eps_log: float = EPS_LOG):
    """Cross entropy with natural log; marginals are clamped at ``eps_log`` first."""
    g, label = np.asarray(g, dtype=float), np.asarray(label, dtype=float)
    if g.shape != label.shape:
        raise ShapeError(f"marginals {g.shape} vs label {label.shape}")
    return -np.mean(label * np.log(np.maximum(g, eps_log)), axis=-1)


def _cost_grad_g(kind: str, g: np.ndarray, label: np.ndarray) -> np.ndarray:
    n = g.shape[-1]
    if kind == "mse":
        return -2.0 * (label - g) / n
    # the clamp makes the cost flat below eps_log
    return np.where(g > EPS_LOG, -label / (n * np.maximum(g, EPS_LOG)), 0.0)


COSTS = {"mse": cost_mse, "ce": cost_ce}


def encode_dataset(dataset: LabeledDataset, encoder, d: int) -> np.ndarray:
    """Normalized coefficient rows, zero-padded to length ``d``."""
    rows = []
    for x in dataset.features:
        coef = encoder(x)
        if len(coef) > d:
            raise ShapeError(f"encoder produced {len(coef)} coefficients, B has only {d} columns")
        rows.append(pad_features(coef, d).normalized)
    return np.array(rows).reshape(len(rows), d)


def batch_cost(b: BMatrix, dataset: LabeledDataset, encoder, cost: str = "mse") -> float:
    if len(dataset) == 0:
        raise InvalidArgumentError("cannot average a cost over an empty dataset")
    _, G = forward_batch(b, encode_dataset(dataset, encoder, b.d))
    return float(np.mean(COSTS[cost](G, dataset.one_hot(b.n))))


# -- gradients -----------------------------------------------------------------

@dataclass
class TrainConfig:
    epochs: int = 30
    learning_rate: float = 0.5
    cost: str = "mse"
    gradient: str = "parameter-shift"
    fd_step: float = 1e-4
    shots: int | None = None
    seed: int | None = 0
    workers: int = 4

    def __post_init__(self):
        if self.epochs < 1:
            raise InvalidArgumentError("epochs must be >= 1")
        if not self.learning_rate >= 0:
            raise InvalidArgumentError("learning rate must be non-negative")
        if self.cost not in COSTS:
            raise InvalidArgumentError(f"cost must be one of {tuple(COSTS)}")
        if self.gradient not in GRADIENT_METHODS:
            raise InvalidArgumentError(f"gradient must be one of {GRADIENT_METHODS}")


@dataclass
class ExtractionContext:
    """Everything needed to turn an angle vector into a B matrix via the cloud."""

    endpoint: object
    template: AnsatzSpec
    d: int
    observable: ObservableRotation = field(default_factory=ObservableRotation)
    options: ExtractionOptions = field(default_factory=ExtractionOptions)
    reference_hint: Optional[int] = None
    extractions: int = 0

    def __post_init__(self):
        self.endpoint = connect(self.endpoint)

    def extract(self, thetas) -> tuple[BMatrix, ExtractionReport]:
        options = self.options
        if self.reference_hint is not None:
            options = ExtractionOptions(**{**vars(options), "reference": self.reference_hint})
        self.extractions += 1
        return extract_b(self.endpoint, self.template.with_thetas(thetas), self.observable, self.d, options)


def gradient(
    thetas,
    dataset: LabeledDataset,
    encoder,
    config: TrainConfig,
    context: ExtractionContext,
    base: BMatrix | None = None,
) -> np.ndarray:
    """d(mean cost)/d(theta), one pair of shifted extractions per angle.

    ``finite-difference``: central difference with step ``config.fd_step``.
    ``parameter-shift``: each marginal is an expectation value, so the pi/2
    shift rule gives its exact derivative; the cost derivative follows by
    the chain rule at ``base``.
    ``cost-shift``: the shift rule applied to the cost itself. Not exact,
    because the costs are nonlinear in the marginals; kept for comparison.
    """
    thetas = np.asarray(thetas, dtype=float)
    labels = dataset.one_hot(context.template.n)
    F = encode_dataset(dataset, encoder, context.d)
    step = config.fd_step if config.gradient == "finite-difference" else np.pi / 2

    G0 = None
    if config.gradient == "parameter-shift":
        if base is None:
            base, _ = context.extract(thetas)
        G0 = forward_batch(base, F)[1]
        dcost = _cost_grad_g(config.cost, G0, labels)

    partial = {}
    grad = np.zeros_like(thetas)
    for j in range(len(thetas)):
        shifted = {}
        for sign in (+1, -1):
            t = thetas.copy()
            t[j] += sign * step
            try:
                b, _ = context.extract(t)
            except TransportError as exc:
                raise GradientInterrupted(f"gradient stopped at parameter {j}: {exc}", partial) from exc
            shifted[sign] = forward_batch(b, F)[1]
            partial[(j, sign)] = shifted[sign]
        if config.gradient == "parameter-shift":
            dG = (shifted[+1] - shifted[-1]) / 2.0
            grad[j] = np.mean(np.sum(dcost * dG, axis=1))
        else:
            cost = COSTS[config.cost]
            lp = np.mean(cost(shifted[+1], labels))
            lm = np.mean(cost(shifted[-1], labels))
            grad[j] = (lp - lm) / (2 * step) if config.gradient == "finite-difference" else (lp - lm) / 2.0
    return grad


# -- training loop -------------------------------------------------------------

@dataclass
class TrainedModel:
    b: BMatrix
    ansatz: AnsatzSpec  # carries the final angles
    encoder: object
    num_classes: int
    history: list[float]
    final_cost: float | None = None
    report: ExtractionReport | None = None

    @property
    def thetas(self) -> tuple[float, ...]:
        return self.ansatz.thetas

    def to_dict(self) -> dict:
        out = self.b.to_dict(self.ansatz, self.report)
        out.update(
            thetas=list(self.thetas),
            encoder=self.encoder.to_dict(),
            history=list(self.history),
            num_classes=self.num_classes,
            final_cost=self.final_cost,
        )
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "TrainedModel":
        a = obj["ansatz"]
        ansatz = AnsatzSpec(a["n"], a["reps"], a["entanglement"], tuple(obj["thetas"]))
        return cls(
            BMatrix.from_dict(obj),
            ansatz,
            encoder_from_dict(obj["encoder"]),
            int(obj["num_classes"]),
            list(obj["history"]),
            obj.get("final_cost"),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()))

    @classmethod
    def load(cls, path) -> "TrainedModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def init_thetas(n: int, reps: int, seed=None) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.0, 2 * np.pi, num_parameters(n, reps))


def train(
    dataset: LabeledDataset,
    encoder,
    template: AnsatzSpec,
    config: TrainConfig,
    endpoint,
    observable: ObservableRotation | None = None,
    initial_thetas=None,
) -> TrainedModel:
    """Plain gradient descent; every epoch re-extracts B at the current angles.

    ``history[e]`` is the mean cost at the start of epoch ``e``. The returned
    model carries B extracted at the final (post-update) angles.
    """
    if len(dataset) == 0:
        raise InvalidArgumentError("empty dataset")
    n = template.n
    if dataset.num_classes > n:
        raise ConfigurationError(f"{dataset.num_classes} classes need at least that many qubits")
    d = encoder.dimension(dataset.dimension)
    if d > 1 << n:
        raise ConfigurationError(f"encoded dimension {d} exceeds 2**{n}")

    thetas = (
        init_thetas(n, template.reps, config.seed)
        if initial_thetas is None
        else np.asarray(initial_thetas, dtype=float).copy()
    )
    options = ExtractionOptions(shots=config.shots, workers=config.workers)
    context = ExtractionContext(endpoint, template, d, observable or ObservableRotation(), options)

    history: list[float] = []
    for epoch in range(config.epochs):
        context.reference_hint = None
        b, report = context.extract(thetas)
        context.reference_hint = report.references_used[0]
        cost = batch_cost(b, dataset, encoder, config.cost)
        if not math.isfinite(cost):
            raise TrainingAborted(
                f"non-finite cost at epoch {epoch}",
                {"epoch": epoch, "thetas": thetas.tolist(), "history": history, "cost": repr(cost)},
            )
        history.append(cost)
        grad = gradient(thetas, dataset, encoder, config, context, base=b)
        if not np.all(np.isfinite(grad)):
            raise TrainingAborted(
                f"non-finite gradient at epoch {epoch}",
                {"epoch": epoch, "thetas": thetas.tolist(), "history": history, "gradient": grad.tolist()},
            )
        log.info("epoch %d cost %.12g |grad| %.3g", epoch, cost, np.linalg.norm(grad))
        thetas = thetas - config.learning_rate * grad

    context.reference_hint = None
    b, report = context.extract(thetas)
    final_cost = batch_cost(b, dataset, encoder, config.cost)
    return TrainedModel(b, template.with_thetas(thetas), encoder, dataset.num_classes, history, final_cost, report)


# -- inference -------------------------------------------------------------------

def infer(model: TrainedModel, x) -> tuple[int, np.ndarray]:
    """Predicted class (argmax of the first ``num_classes`` marginals, ties to the smaller) and marginals."""
    coef = model.encoder(x)
    if len(coef) > model.b.d:
        raise ShapeError(f"encoded length {len(coef)} exceeds model dimension {model.b.d}")
    _, g = forward(model.b, pad_features(coef, model.b.d))
    return int(np.argmax(g[: model.num_classes])), g


def predict(model: TrainedModel, dataset: LabeledDataset) -> np.ndarray:
    _, G = forward_batch(model.b, encode_dataset(dataset, model.encoder, model.b.d))
    return np.argmax(G[:, : model.num_classes], axis=1)


def accuracy(model: TrainedModel, dataset: LabeledDataset) -> float:
    return float(np.mean(predict(model, dataset) == dataset.labels))


def simulate_marginals(ansatz: AnsatzSpec, encoder, x, observable: ObservableRotation | None = None) -> np.ndarray:
    """Marginals from directly simulating encode-then-run; the route the protocol avoids."""
    coef = encoder(x)
    state = pad_features(coef, 1 << ansatz.n).normalized
    amps = run_state(ansatz, observable or ObservableRotation(), state)
    return marginals(amps**2)

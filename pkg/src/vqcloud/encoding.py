"""Classical feature maps: raw features -> normalized coefficient vector over basis states.

These run on the data owner's machine only. Nothing in the cloud package
imports this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EncodingError, ShapeError


@dataclass(frozen=True)
class CoefficientVector:
    """Unnormalized coefficients ``f`` and their normalization constant ``c``."""

    f: np.ndarray
    c: float

    @property
    def normalized(self) -> np.ndarray:
        return self.f / self.c

    def __len__(self):
        return len(self.f)


def _features(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ShapeError(f"feature vector must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise EncodingError("feature vector has non-finite entries")
    return x


def amplitude_encode(x) -> CoefficientVector:
    x = _features(x)
    norm = float(np.linalg.norm(x))
    if norm == 0.0:
        raise EncodingError("the zero vector has no amplitude encoding")
    return CoefficientVector(x.copy(), norm)


def sum_angle_pair(a: float, b: float) -> tuple[float, float]:
    """Default single-qubit amplitudes for a feature pair: unit norm by construction."""
    return np.cos(a + b), np.sin(a + b)


PairFunction = Callable[[float, float], tuple[float, float]]


def qubit_encode(x, n: int, pair: PairFunction = sum_angle_pair) -> CoefficientVector:
    """Two features per qubit, expanded as a tensor product over all ``n`` qubits.

    Qubit ``j`` (leftmost is 0) takes features ``2j`` and ``2j+1``; a missing
    partner and any unused qubit read zero features.
    """
    x = _features(x)
    if len(x) > 2 * n:
        raise EncodingError(f"{len(x)} features do not fit {n} qubits (at most {2 * n})")
    padded = np.zeros(2 * n)
    padded[: len(x)] = x
    f = np.ones(1)
    c = 1.0
    for j in range(n):
        a, b = pair(padded[2 * j], padded[2 * j + 1])
        f = np.kron(f, np.array([a, b], dtype=float))
        c *= float(np.hypot(a, b))
    if c == 0.0:
        raise EncodingError("pair function produced a zero qubit state")
    return CoefficientVector(f, c)


def pad_features(coef: CoefficientVector, d_target: int) -> CoefficientVector:
    if d_target < len(coef):
        raise ShapeError(f"cannot pad length {len(coef)} down to {d_target}")
    f = np.zeros(d_target)
    f[: len(coef)] = coef.f
    return CoefficientVector(f, coef.c)


@dataclass(frozen=True)
class AmplitudeEncoder:
    kind = "amplitude"

    def __call__(self, x) -> CoefficientVector:
        return amplitude_encode(x)

    def dimension(self, num_features: int) -> int:
        return num_features

    def to_dict(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class QubitEncoder:
    n: int
    kind = "qubit"

    def __call__(self, x) -> CoefficientVector:
        return qubit_encode(x, self.n)

    def dimension(self, num_features: int) -> int:
        return 1 << self.n

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n": self.n}


def encoder_from_dict(obj: dict):
    if obj["kind"] == "amplitude":
        return AmplitudeEncoder()
    if obj["kind"] == "qubit":
        return QubitEncoder(int(obj["n"]))
    raise EncodingError(f"unknown encoder kind {obj['kind']!r}")

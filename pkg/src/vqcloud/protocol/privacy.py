"""Hardening options: hide the data dimension and hide the real parameter set."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, InvalidArgumentError
from ..simulator import AnsatzSpec, ObservableRotation
from .extraction import BMatrix, ExtractionOptions, ExtractionReport, extract_b


@dataclass(frozen=True)
class ExtractionPlan:
    d_true: int
    n_padded: int

    @property
    def d_extract(self) -> int:
        return 1 << self.n_padded

    @property
    def basis_runs(self) -> int:
        return self.d_extract

    @property
    def superposition_runs(self) -> int:
        """Superposition runs when the first reference anchors every row."""
        return self.d_extract - 1

    @property
    def best_case_runs(self) -> int:
        return self.basis_runs + self.superposition_runs


def pad_dimension(d_true: int, n_padded: int) -> ExtractionPlan:
    """Extract over all ``2**n_padded`` basis vectors so the cloud only learns ``n_padded``."""
    if d_true < 1:
        raise InvalidArgumentError(f"d_true must be positive, got {d_true}")
    needed = max(1, math.ceil(math.log2(d_true)))
    if n_padded < needed:
        raise InvalidArgumentError(f"{d_true} features need at least {needed} qubits, got {n_padded}")
    return ExtractionPlan(d_true, n_padded)


def extract_padded(
    endpoint,
    ansatz: AnsatzSpec,
    plan: ExtractionPlan,
    observable: ObservableRotation | None = None,
    options: ExtractionOptions | None = None,
) -> tuple[BMatrix, ExtractionReport]:
    """Full-width extraction, then keep only the first ``d_true`` columns."""
    if ansatz.n != plan.n_padded:
        raise ConfigurationError(f"plan is for {plan.n_padded} qubits, ansatz has {ansatz.n}")
    b, report = extract_b(endpoint, ansatz, observable, plan.d_extract, options)
    return b.truncate(plan.d_true), report


@dataclass(frozen=True)
class DecoySchedule:
    parameter_sets: list[tuple[float, ...]]
    real_index: int  # private to the data owner


def decoy_parameter_sets(real_thetas, k: int, seed=None) -> DecoySchedule:
    """``k`` random angle vectors (uniform in [0, 2*pi)) with the real one hidden among them."""
    if k < 0:
        raise InvalidArgumentError(f"decoy count must be >= 0, got {k}")
    real = tuple(float(t) for t in real_thetas)
    rng = np.random.default_rng(seed)
    decoys = [tuple(row) for row in rng.uniform(0.0, 2 * np.pi, (k, len(real))).tolist()]
    real_index = int(rng.integers(0, k + 1))
    sets = decoys[:real_index] + [real] + decoys[real_index:]
    return DecoySchedule(sets, real_index)


@dataclass
class DecoyResult:
    b: BMatrix
    report: ExtractionReport
    schedule: DecoySchedule
    decoys: list[tuple[BMatrix, ExtractionReport]] = field(default_factory=list)


def extract_with_decoys(
    endpoint,
    ansatz: AnsatzSpec,
    k: int,
    seed=None,
    observable: ObservableRotation | None = None,
    d: int | None = None,
    options: ExtractionOptions | None = None,
    keep_decoys: bool = False,
) -> DecoyResult:
    """Run a full extraction for every set in the schedule; decoy matrices are dropped unless kept."""
    schedule = decoy_parameter_sets(ansatz.thetas, k, seed)
    real = None
    decoys = []
    for idx, thetas in enumerate(schedule.parameter_sets):
        result = extract_b(endpoint, ansatz.with_thetas(thetas), observable, d, options)
        if idx == schedule.real_index:
            real = result
        elif keep_decoys:
            decoys.append(result)
    return DecoyResult(real[0], real[1], schedule, decoys)

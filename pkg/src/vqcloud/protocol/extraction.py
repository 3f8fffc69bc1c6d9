"""Reconstruct the signed amplitude matrix B from probability-only cloud runs.

Column ``i`` of ``B`` is the final state produced by basis input ``|i>``.
Magnitudes come from the basis runs, relative signs from runs on
``(|r> + |i>)/sqrt(2)`` against a reference column ``r``. Rows where the
reference has zero probability are re-anchored on further references.
Each row is known only up to a global sign, which cancels in ``(B f)**2``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..cloud.wire import ansatz_to_wire
from ..errors import ConfigurationError
from ..simulator import AnsatzSpec, Basis, ObservableRotation, Superposition
from .endpoints import connect, request_probabilities
from .signs import (
    Sign,
    Tolerances,
    choose_reference,
    recover_signs,
    DEFAULT_ZERO_C,
)


@dataclass
class BMatrix:
    n: int
    d: int
    entries: np.ndarray

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        if self.entries.shape != (1 << self.n, self.d):
            raise ConfigurationError(
                f"B entries have shape {self.entries.shape}, expected ({1 << self.n}, {self.d})"
            )

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=0)

    def truncate(self, d: int) -> "BMatrix":
        """Keep the first ``d`` columns (used after dimension padding)."""
        return BMatrix(self.n, d, self.entries[:, :d].copy())

    def flip_rows(self, rows) -> "BMatrix":
        entries = self.entries.copy()
        entries[list(rows)] *= -1
        return BMatrix(self.n, self.d, entries)

    def to_dict(self, ansatz: AnsatzSpec | None = None, report: "ExtractionReport | None" = None) -> dict:
        out = {"n": self.n, "d": self.d, "entries": self.entries.tolist()}
        if ansatz is not None:
            out["ansatz"] = {"n": ansatz.n, **ansatz_to_wire(ansatz)}
        if report is not None:
            out["report"] = report.to_dict()
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "BMatrix":
        return cls(obj["n"], obj["d"], np.asarray(obj["entries"], dtype=float))

    def save(self, path, ansatz=None, report=None) -> None:
        Path(path).write_text(json.dumps(self.to_dict(ansatz, report)))

    @classmethod
    def load(cls, path) -> "BMatrix":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class SignTable:
    sigma: np.ndarray  # +1/-1, shape (N, d)
    reference_used: list  # per row: anchoring reference index, or None


@dataclass
class ExtractionReport:
    runs_issued: int
    references_used: list[int]
    zero_rows: list[int]
    eps_zero: float
    shots: int | None
    retries: int = 0
    signs: SignTable | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "runs_issued": self.runs_issued,
            "references_used": list(self.references_used),
            "zero_rows": list(self.zero_rows),
            "eps_zero": self.eps_zero,
            "shots": self.shots,
            "retries": self.retries,
        }


@dataclass
class ExtractionOptions:
    """Knobs for ``extract_b``.

    ``reference`` is the primary reference index, or ``"auto"`` to let
    ``choose_reference`` pick the column with the most nonzero entries
    (which is index 0 whenever 0 is among the best).
    """

    shots: int | None = None
    reference: int | str = "auto"
    zero_c: float = DEFAULT_ZERO_C
    retry_factor: int = 4
    workers: int = 4

    def tolerances(self) -> Tolerances:
        return Tolerances.for_shots(self.shots, self.zero_c, self.retry_factor)


@dataclass
class ExtractionState:
    """What fallback scheduling needs to know mid-extraction."""

    basis_probs: np.ndarray  # (N, d)
    references: list[int]
    anchor: np.ndarray  # (N,) reference index per row, -1 if none yet
    eps_zero: float

    @property
    def d(self) -> int:
        return self.basis_probs.shape[1]

    def rows_needing_anchor(self) -> list[int]:
        """Rows with no nonzero reference entry but some nonzero entry elsewhere."""
        nonzero = self.basis_probs > self.eps_zero
        return [int(m) for m in np.flatnonzero((self.anchor < 0) & nonzero.any(axis=1))]


def fallback_round(state: ExtractionState):
    """Next reference and its superposition inputs, or ``None`` when done.

    Done means every row has an anchor, or ``d - 1`` references are used.
    The new reference maximizes coverage of the unanchored rows and is
    paired with every index that has not served as a reference.
    """
    pending = state.rows_needing_anchor()
    if not pending or len(state.references) >= state.d - 1:
        return None
    ref = choose_reference(state.basis_probs, state.references, state.eps_zero, rows=pending)
    used = set(state.references) | {ref}
    return ref, [Superposition(ref, i) for i in range(state.d) if i not in used]


def _run_many(endpoint, ansatz, observable, inputs, shots, workers) -> dict:
    def one(spec):
        return spec, request_probabilities(endpoint, ansatz, observable, spec, shots)

    if workers <= 1 or len(inputs) <= 1:
        return dict(one(s) for s in inputs)
    with ThreadPoolExecutor(max_workers=min(workers, len(inputs))) as pool:
        return dict(pool.map(one, inputs))


def extract_b(
    endpoint,
    ansatz: AnsatzSpec,
    observable: ObservableRotation | None = None,
    d: int | None = None,
    options: ExtractionOptions | None = None,
) -> tuple[BMatrix, ExtractionReport]:
    """Run the basis and superposition schedule against ``endpoint`` and assemble B.

    ``d`` defaults to ``2**n``. Responses are keyed by input descriptor, so
    the order in which concurrent runs come back does not matter.
    """
    endpoint = connect(endpoint)
    observable = observable or ObservableRotation()
    options = options or ExtractionOptions()
    n, N = ansatz.n, 1 << ansatz.n
    d = N if d is None else d
    if not 1 <= d <= N:
        raise ConfigurationError(f"data dimension d={d} must be in [1, {N}] for {n} qubits")
    tol = options.tolerances()
    run = lambda inputs, shots=options.shots: _run_many(  # noqa: E731
        endpoint, ansatz, observable, inputs, shots, options.workers
    )

    basis = run([Basis(i) for i in range(d)])
    P = np.column_stack([basis[Basis(i)] for i in range(d)])
    runs = d

    if options.reference == "auto":
        primary = choose_reference(P, (), tol.eps_zero)
    else:
        primary = int(options.reference)
        if not 0 <= primary < d:
            raise ConfigurationError(f"reference {primary} outside [0, {d})")

    sigma = np.ones((N, d), dtype=np.int8)
    state = ExtractionState(P, [], np.full(N, -1), tol.eps_zero)
    retries = 0
    ref = primary
    inputs = [Superposition(ref, i) for i in range(d) if i != ref]
    while True:
        state.references.append(ref)
        sup = run(inputs) if inputs else {}
        runs += len(inputs)

        rows = np.flatnonzero((state.anchor < 0) & (P[:, ref] > tol.eps_zero))
        state.anchor[rows] = ref
        ambiguous = []
        for spec in inputs:
            i = spec.i
            signs = recover_signs(P[rows, ref], P[rows, i], sup[spec][rows], tol)
            for m, s in zip(rows, signs):
                if s is Sign.MINUS:
                    sigma[m, i] = -1
                elif s is Sign.AMBIGUOUS:
                    ambiguous.append((m, spec))

        if ambiguous and tol.shots is not None:
            redo = sorted({spec for _, spec in ambiguous}, key=lambda s: s.i)
            again = run(redo, tol.shots * tol.retry_factor)
            retries += len(redo)
            runs += len(redo)
            for m, spec in ambiguous:
                disc = 2.0 * again[spec][m] - (P[m, ref] + P[m, spec.i])
                sigma[m, spec.i] = 1 if disc >= 0 else -1

        nxt = fallback_round(state)
        if nxt is None:
            break
        ref, inputs = nxt

    zero_rows = [int(m) for m in np.flatnonzero(state.anchor < 0)]
    B = BMatrix(n, d, sigma * np.sqrt(np.clip(P, 0.0, None)))
    signs = SignTable(sigma, [None if a < 0 else int(a) for a in state.anchor])
    report = ExtractionReport(runs, list(state.references), zero_rows, tol.eps_zero, options.shots, retries, signs)
    return B, report


def reconstruct_probabilities(b: BMatrix, coefficients) -> np.ndarray:
    """``(B f)**2`` for one normalized coefficient vector or a batch of them (rows)."""
    f = np.asarray(coefficients, dtype=float)
    return (f @ b.entries.T) ** 2

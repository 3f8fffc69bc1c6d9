"""Real-amplitude statevector simulator.

Only RY, CX and X are supported, so a real input state stays real and the
state is stored as a float64 vector of length ``2**n``.

Bit convention: basis index ``m`` is read as a big-endian bitstring. Qubit
``q`` (0-based) is the ``q``-th character from the left, i.e. the bit of
significance ``n - 1 - q``; ``|00001>`` is index 1. In the tensor view
``state.reshape((2,) * n)`` qubit ``q`` is simply axis ``q``.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import (
    ConfigurationError,
    InvalidArgumentError,
    InvalidGateError,
    InvalidInputError,
)

MAX_QUBITS = 24
ENTANGLEMENTS = ("full", "linear")
GATE_KINDS = ("ry", "cx", "x")


@dataclass(frozen=True)
class Gate:
    kind: str
    qubit: int
    control: int | None = None
    theta: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise InvalidGateError(f"unknown gate kind {self.kind!r}")
        if self.kind == "cx":
            if self.control is None:
                raise InvalidGateError("CX needs a control qubit")
            if self.control == self.qubit:
                raise InvalidGateError("CX control and target coincide")
        elif self.control is not None:
            raise InvalidGateError(f"{self.kind.upper()} takes no control qubit")
        if self.kind == "ry":
            if self.theta is None or not math.isfinite(self.theta):
                raise InvalidGateError("RY needs a finite angle")
            object.__setattr__(self, "theta", float(self.theta))
        elif self.theta is not None:
            raise InvalidGateError(f"{self.kind.upper()} takes no angle")

    @classmethod
    def ry(cls, qubit: int, theta: float) -> "Gate":
        return cls("ry", qubit, theta=theta)

    @classmethod
    def cx(cls, control: int, target: int) -> "Gate":
        return cls("cx", target, control=control)

    @classmethod
    def x(cls, qubit: int) -> "Gate":
        return cls("x", qubit)

    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,) if self.control is None else (self.control, self.qubit)

    def check(self, n: int) -> None:
        for q in self.qubits():
            if not 0 <= q < n:
                raise InvalidGateError(f"{self} acts outside a {n}-qubit register")


def num_parameters(n: int, reps: int) -> int:
    """One RY per qubit before each entangling layer, plus a trailing RY layer."""
    return n * (reps + 1)


@dataclass(frozen=True)
class AnsatzSpec:
    """RealAmplitudes circuit: RY layer, then ``reps`` x (CX layer, RY layer)."""

    n: int
    reps: int
    entanglement: str = "full"
    thetas: tuple[float, ...] = ()

    def __post_init__(self):
        if not 1 <= self.n <= MAX_QUBITS:
            raise ConfigurationError(f"qubit count must be in [1, {MAX_QUBITS}], got {self.n}")
        if self.reps < 1:
            raise ConfigurationError(f"reps must be >= 1, got {self.reps}")
        if self.entanglement not in ENTANGLEMENTS:
            raise ConfigurationError(f"entanglement must be one of {ENTANGLEMENTS}")
        thetas = tuple(float(t) for t in np.asarray(self.thetas, dtype=float).ravel())
        expected = num_parameters(self.n, self.reps)
        if len(thetas) != expected:
            raise ConfigurationError(
                f"expected {expected} angles for n={self.n}, reps={self.reps}; got {len(thetas)}"
            )
        if not all(math.isfinite(t) for t in thetas):
            raise ConfigurationError("angles must be finite")
        object.__setattr__(self, "thetas", thetas)

    @property
    def num_parameters(self) -> int:
        return len(self.thetas)

    def with_thetas(self, thetas: Sequence[float]) -> "AnsatzSpec":
        return AnsatzSpec(self.n, self.reps, self.entanglement, tuple(thetas))

    @classmethod
    def zeros(cls, n: int, reps: int, entanglement: str = "full") -> "AnsatzSpec":
        return cls(n, reps, entanglement, (0.0,) * num_parameters(n, reps))

    @classmethod
    def random(cls, n: int, reps: int, entanglement: str = "full", seed=None) -> "AnsatzSpec":
        """Angles drawn uniformly from [0, 2*pi)."""
        rng = np.random.default_rng(seed)
        return cls(n, reps, entanglement, tuple(rng.uniform(0.0, 2 * np.pi, num_parameters(n, reps))))


@dataclass(frozen=True)
class ObservableRotation:
    """Basis change applied before measurement; empty means computational basis."""

    gates: tuple[Gate, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))


@dataclass(frozen=True)
class Basis:
    i: int

    def __post_init__(self):
        if self.i < 0:
            raise InvalidInputError(f"basis index must be non-negative, got {self.i}")

    def indices(self) -> tuple[int, ...]:
        return (self.i,)


@dataclass(frozen=True)
class Superposition:
    """The state (|r> + |i>)/sqrt(2)."""

    r: int
    i: int

    def __post_init__(self):
        if self.r < 0 or self.i < 0:
            raise InvalidInputError("basis indices must be non-negative")
        if self.r == self.i:
            raise InvalidInputError(f"superposition needs two distinct indices, got r = i = {self.i}")

    def indices(self) -> tuple[int, ...]:
        return (self.r, self.i)


InputState = Union[Basis, Superposition]


# -- state helpers -----------------------------------------------------------

def num_qubits(state: np.ndarray) -> int:
    size = state.shape[-1]
    n = size.bit_length() - 1
    if size < 2 or 1 << n != size:
        raise InvalidArgumentError(f"state length {size} is not a power of two >= 2")
    return n


def zero_state(n: int) -> np.ndarray:
    return basis_state(n, 0)


def basis_state(n: int, i: int) -> np.ndarray:
    state = np.zeros(1 << n)
    state[i] = 1.0
    return state


def _as_real_state(state) -> np.ndarray:
    state = np.asarray(state)
    if np.iscomplexobj(state):
        raise InvalidArgumentError("states are real; complex amplitudes are not representable")
    return state.astype(np.float64, copy=False)


# -- gate kernels ------------------------------------------------------------

def _ry_inplace(psi: np.ndarray, q: int, theta: float) -> None:
    # psi has shape (2,)*n; a view along axis q is rotated in place
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    lo = psi.reshape(1 << q, 2, -1)
    a0 = lo[:, 0, :].copy()
    a1 = lo[:, 1, :]
    lo[:, 0, :] = c * a0 - s * a1
    lo[:, 1, :] = s * a0 + c * a1


def _x_inplace(psi: np.ndarray, q: int) -> None:
    lo = psi.reshape(1 << q, 2, -1)
    lo[:, [0, 1], :] = lo[:, [1, 0], :]


def _cx_inplace(psi: np.ndarray, control: int, target: int) -> None:
    n = psi.ndim
    index = [slice(None)] * n
    index[control] = 1
    sub = psi[tuple(index)]
    axis = target if target < control else target - 1
    sub[...] = np.flip(sub, axis=axis).copy()


def _apply_inplace(psi: np.ndarray, gate: Gate) -> None:
    if gate.kind == "ry":
        _ry_inplace(psi, gate.qubit, gate.theta)
    elif gate.kind == "x":
        _x_inplace(psi, gate.qubit)
    else:
        _cx_inplace(psi, gate.control, gate.qubit)


def apply_gate(state, gate: Gate) -> np.ndarray:
    """Return ``gate`` applied to ``state``; the input array is not modified."""
    state = _as_real_state(state)
    n = num_qubits(state)
    gate.check(n)
    out = state.copy()
    _apply_inplace(out.reshape((2,) * n), gate)
    return out


def simulate(gates: Iterable[Gate], n: int, initial=None) -> np.ndarray:
    """Run ``gates`` on ``initial`` (default ``|0...0>``) and return the final amplitudes."""
    if initial is None:
        out = zero_state(n)
    else:
        out = _as_real_state(initial).copy()
        if out.shape != (1 << n,):
            raise ConfigurationError(f"initial state has shape {out.shape}, expected ({1 << n},)")
    psi = out.reshape((2,) * n)
    for gate in gates:
        gate.check(n)
        _apply_inplace(psi, gate)
    return out


# -- circuit construction ----------------------------------------------------

def entangling_pairs(n: int, entanglement: str) -> list[tuple[int, int]]:
    if entanglement == "full":
        return list(itertools.combinations(range(n), 2))
    if entanglement == "linear":
        return [(k, k + 1) for k in range(n - 1)]
    raise ConfigurationError(f"unknown entanglement {entanglement!r}")


def build_real_amplitudes(spec: AnsatzSpec) -> list[Gate]:
    n, thetas = spec.n, spec.thetas
    pairs = entangling_pairs(n, spec.entanglement)
    gates = [Gate.ry(q, thetas[q]) for q in range(n)]
    for layer in range(1, spec.reps + 1):
        gates.extend(Gate.cx(a, b) for a, b in pairs)
        gates.extend(Gate.ry(q, thetas[layer * n + q]) for q in range(n))
    return gates


def _bit(index: int, q: int, n: int) -> int:
    return (index >> (n - 1 - q)) & 1


def prepare_input(spec: InputState, n: int) -> list[Gate]:
    """Gates turning ``|0...0>`` into the requested input state.

    A basis state needs one X per set bit. For ``(|r> + |i>)/sqrt(2)`` the
    first qubit where ``r`` and ``i`` differ is the pivot: it gets
    RY(pi/2), and every other differing qubit copies it through a CX (with
    an X beforehand where ``r`` carries the 1). Bits shared by both
    indices get a plain X.
    """
    for idx in spec.indices():
        if idx >= 1 << n:
            raise InvalidInputError(f"basis index {idx} out of range for {n} qubits")
    if isinstance(spec, Basis):
        return [Gate.x(q) for q in range(n) if _bit(spec.i, q, n)]
    if not isinstance(spec, Superposition):
        raise InvalidInputError(f"unsupported input state {spec!r}")

    r, i = spec.r, spec.i
    differing = [q for q in range(n) if _bit(r, q, n) != _bit(i, q, n)]
    pivot = differing[0]
    if _bit(r, pivot, n):
        r, i = i, r
    gates = [Gate.x(q) for q in range(n) if _bit(r, q, n) and _bit(i, q, n)]
    gates += [Gate.x(q) for q in differing[1:] if _bit(r, q, n)]
    gates.append(Gate.ry(pivot, np.pi / 2))
    gates += [Gate.cx(pivot, q) for q in differing[1:]]
    return gates


def gate_counts(gates: Iterable[Gate]) -> Counter:
    return Counter(g.kind for g in gates)


# -- running circuits --------------------------------------------------------

def _check_observable(observable: ObservableRotation, n: int) -> None:
    for gate in observable.gates:
        try:
            gate.check(n)
        except InvalidGateError as exc:
            raise ConfigurationError(f"observable rotation does not fit the ansatz: {exc}") from None


def run_state(ansatz: AnsatzSpec, observable: ObservableRotation, initial) -> np.ndarray:
    """Final amplitudes of ansatz + observable rotation applied to an arbitrary real state.

    This is the direct route a data owner would take with local quantum
    access; the cloud never sees it.
    """
    _check_observable(observable, ansatz.n)
    gates = build_real_amplitudes(ansatz) + list(observable.gates)
    return simulate(gates, ansatz.n, initial)


def final_state(ansatz: AnsatzSpec, observable: ObservableRotation, input_state: InputState) -> np.ndarray:
    n = ansatz.n
    if any(idx >= 1 << n for idx in input_state.indices()):
        raise ConfigurationError(f"input {input_state} does not fit {n} qubits")
    _check_observable(observable, n)
    gates = prepare_input(input_state, n) + build_real_amplitudes(ansatz) + list(observable.gates)
    return simulate(gates, n)


def run_exact(ansatz: AnsatzSpec, observable: ObservableRotation, input_state: InputState) -> np.ndarray:
    return final_state(ansatz, observable, input_state) ** 2


def sample_probabilities(probs, shots: int, seed=None) -> np.ndarray:
    """Empirical frequencies of ``shots`` draws from ``probs``.

    ``seed`` may be anything ``np.random.default_rng`` accepts, including a
    Generator (which is then advanced).
    """
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise InvalidArgumentError(f"shots must be a positive integer, got {shots!r}")
    p = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    p = p / p.sum()
    counts = np.random.default_rng(seed).multinomial(int(shots), p)
    return counts / shots


def run_sampled(ansatz, observable, input_state, shots: int, seed=None) -> np.ndarray:
    if not isinstance(shots, (int, np.integer)) or shots < 1:
        raise InvalidArgumentError(f"shots must be a positive integer, got {shots!r}")
    return sample_probabilities(run_exact(ansatz, observable, input_state), shots, seed)


# -- marginals -----------------------------------------------------------------

def marginal_g(probs, k: int) -> float:
    """Probability that qubit ``k`` (1-based, leftmost is 1) reads 1."""
    probs = np.asarray(probs, dtype=float)
    n = num_qubits(probs)
    if not 1 <= k <= n:
        raise InvalidArgumentError(f"qubit index k must be in [1, {n}], got {k}")
    return float(probs.reshape(1 << (k - 1), 2, -1)[:, 1, :].sum())


def marginals(probs) -> np.ndarray:
    """All marginals ``g_1..g_n``; works row-wise on a 2-D batch of distributions."""
    probs = np.asarray(probs, dtype=float)
    n = num_qubits(probs)
    batch = probs.reshape(-1, 1 << n)
    g = np.empty((batch.shape[0], n))
    for q in range(n):
        g[:, q] = batch.reshape(-1, 1 << q, 2, 1 << (n - q - 1))[:, :, 1, :].sum(axis=(1, 2))
    return g.reshape(probs.shape[:-1] + (n,))

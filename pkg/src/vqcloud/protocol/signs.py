"""Relative-sign recovery from interference of two basis inputs.

For a real amplitude pair ``b_r``, ``b_i`` in output row ``m`` the cloud
reports ``p_r = b_r**2``, ``p_i = b_i**2`` and, for the input
``(|r> + |i>)/sqrt(2)``, ``p_ri = (b_r + b_i)**2 / 2``. Hence

    2 * p_ri - (p_r + p_i) = 2 * b_r * b_i

whose sign is the relative sign of the two amplitudes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from ..errors import ReferenceExhausted

EXACT_EPS_ZERO = 1e-12
DEFAULT_ZERO_C = 10.0


class Sign(enum.Enum):
    PLUS = 1
    MINUS = -1
    IRRELEVANT = 0  # p_i is zero: the sign multiplies nothing
    UNDETERMINED = 2  # p_r is zero: this reference cannot anchor row m
    AMBIGUOUS = 3  # discriminant within the noise margin

    @property
    def factor(self) -> int:
        return -1 if self is Sign.MINUS else 1


@dataclass(frozen=True)
class Tolerances:
    """Zero threshold and sign-decision margin.

    Exact mode commits on any nonzero discriminant. Shot mode treats
    ``p <= max(1e-12, zero_c / shots)`` as zero and requires
    ``|2 p_ri - p_r - p_i| > 3 sqrt((p_r + p_i) / shots)`` before committing.
    """

    eps_zero: float = EXACT_EPS_ZERO
    shots: int | None = None
    retry_factor: int = 4

    @classmethod
    def exact(cls) -> "Tolerances":
        return cls()

    @classmethod
    def for_shots(cls, shots: int | None, zero_c: float = DEFAULT_ZERO_C, retry_factor: int = 4) -> "Tolerances":
        if shots is None:
            return cls(retry_factor=retry_factor)
        return cls(max(EXACT_EPS_ZERO, zero_c / shots), shots, retry_factor)

    def margin(self, p_r, p_i):
        if self.shots is None:
            return 0.0 * np.asarray(p_r)
        return 3.0 * np.sqrt((np.asarray(p_r) + np.asarray(p_i)) / self.shots)

    def retry(self) -> "Tolerances":
        """Tolerances for a re-measurement with ``retry_factor`` times the shots."""
        if self.shots is None:
            return self
        return Tolerances(self.eps_zero, self.shots * self.retry_factor, self.retry_factor)


def recover_sign(p_r: float, p_i: float, p_ri: float, tol: Tolerances = Tolerances()) -> Sign:
    """Sign of ``b_i`` relative to ``b_r`` in one output row."""
    if p_i <= tol.eps_zero:
        return Sign.IRRELEVANT
    if p_r <= tol.eps_zero:
        return Sign.UNDETERMINED
    disc = 2.0 * p_ri - (p_r + p_i)
    margin = float(tol.margin(p_r, p_i))
    if disc > margin:
        return Sign.PLUS
    if disc < -margin:
        return Sign.MINUS
    return Sign.AMBIGUOUS


def recover_signs(p_r, p_i, p_ri, tol: Tolerances = Tolerances()) -> np.ndarray:
    """Vectorized ``recover_sign``; returns an object array of ``Sign``."""
    p_r, p_i, p_ri = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (p_r, p_i, p_ri)))
    disc = 2.0 * p_ri - (p_r + p_i)
    margin = tol.margin(p_r, p_i)
    out = np.full(p_r.shape, Sign.AMBIGUOUS, dtype=object)
    out[disc > margin] = Sign.PLUS
    out[disc < -margin] = Sign.MINUS
    out[p_r <= tol.eps_zero] = Sign.UNDETERMINED
    out[p_i <= tol.eps_zero] = Sign.IRRELEVANT
    return out


def sign_of_discriminant(p_r: float, p_i: float, p_ri: float) -> int:
    return 1 if 2.0 * p_ri - (p_r + p_i) >= 0 else -1


def choose_reference(
    basis_probs,
    already_used: Iterable[int] = (),
    eps_zero: float = EXACT_EPS_ZERO,
    rows=None,
) -> int:
    """Unused column with the most entries above ``eps_zero``; ties go to the smallest index.

    ``rows`` restricts the count to a subset of output rows (the rows that
    still lack an anchor during fallback rounds).
    """
    probs = np.asarray(basis_probs, dtype=float)
    if rows is not None:
        probs = probs[np.asarray(sorted(rows), dtype=int)]
    used = set(already_used)
    candidates = [c for c in range(probs.shape[1]) if c not in used]
    if not candidates:
        raise ReferenceExhausted("every basis index has already served as a reference")
    counts = (probs[:, candidates] > eps_zero).sum(axis=0)
    return candidates[int(np.argmax(counts))]


"""Sharp sequential measurements with the Lüders update rule."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .qutrit import ATOL, ID3, as_unitary, basis

BRANCH_CUTOFF = 1e-14
OUTCOMES = (+1, -1)


@dataclass(frozen=True, eq=False)
class SharpMeasurement:
    """Observable ``M = P_B - P_D`` along ``|psi> = U|0>``."""

    bright: np.ndarray
    dark: np.ndarray
    unitary: np.ndarray

    @property
    def observable(self) -> np.ndarray:
        return self.bright - self.dark

    def projector(self, outcome: int) -> np.ndarray:
        if outcome == +1:
            return self.bright
        if outcome == -1:
            return self.dark
        raise ValueError(f"outcome must be +1 or -1, got {outcome!r}")


def make_measurement(u) -> SharpMeasurement:
    u = as_unitary(u)
    psi = u @ basis(0)
    bright = np.outer(psi, psi.conj())
    return SharpMeasurement(bright, ID3 - bright, u)


class Branch(NamedTuple):
    outcome: int
    probability: float
    state: np.ndarray


def measure(rho: np.ndarray, m: SharpMeasurement) -> list[Branch]:
    """Outcome branches of ``m`` on ``rho``; negligible branches are dropped."""
    branches = []
    for a in OUTCOMES:
        p_op = m.projector(a)
        p = float(np.real(np.trace(p_op @ rho)))
        if p < BRANCH_CUTOFF:
            continue
        post = p_op @ rho @ p_op / p
        branches.append(Branch(a, min(p, 1.0), post))
    return branches


def expectation(rho: np.ndarray, m: SharpMeasurement) -> float:
    return float(np.real(np.trace(m.observable @ rho)))


@dataclass(frozen=True)
class DetectionError:
    """Classical misread probabilities of the fluorescence detection."""

    bright_error: float = 0.0  # bright read as dark
    dark_error: float = 0.0  # dark read as bright

    def __post_init__(self):
        for name in ("bright_error", "dark_error"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must be a probability, got {v!r}")

    @property
    def is_zero(self) -> bool:
        return self.bright_error == 0.0 and self.dark_error == 0.0

    def confusion(self) -> dict[tuple[int, int], float]:
        """``P(read | true)`` keyed by ``(read, true)``."""
        eb, ed = self.bright_error, self.dark_error
        return {(+1, +1): 1 - eb, (-1, +1): eb, (-1, -1): 1 - ed, (+1, -1): ed}


@dataclass(frozen=True, eq=False)
class PairDistribution:
    """Joint statistics of a measurement pair ``(A^(1), A^(2))``.

    ``post_states`` is keyed by the true outcome pair.  After
    :func:`apply_detection_error` the labels of ``probabilities`` no longer
    identify the physical branch, which ``approximate_post_states`` records.
    """

    probabilities: dict
    post_states: dict = field(default_factory=dict)
    approximate_post_states: bool = False

    def p(self, a1: int, a2: int) -> float:
        return self.probabilities.get((a1, a2), 0.0)

    @property
    def total(self) -> float:
        return sum(self.probabilities.values())

    @property
    def mean_first(self) -> float:
        return sum(a1 * p for (a1, _), p in self.probabilities.items())

    @property
    def mean_second(self) -> float:
        return sum(a2 * p for (_, a2), p in self.probabilities.items())

    @property
    def correlator(self) -> float:
        return sum(a1 * a2 * p for (a1, a2), p in self.probabilities.items())

    def p_first(self, a1: int) -> float:
        return self.p(a1, +1) + self.p(a1, -1)

    def p_second_given_first(self, a2: int, a1: int) -> float:
        pa = self.p_first(a1)
        return self.p(a1, a2) / pa if pa > 0 else 0.0

    def as_array(self) -> np.ndarray:
        """Probabilities ordered ``(+,+), (+,-), (-,+), (-,-)``."""
        return np.array([self.p(a1, a2) for a1 in OUTCOMES for a2 in OUTCOMES])


def pair_distribution(rho0: np.ndarray, first: SharpMeasurement, second: SharpMeasurement) -> PairDistribution:
    probs = {(a1, a2): 0.0 for a1 in OUTCOMES for a2 in OUTCOMES}
    posts = {}
    for a1, p1, rho1 in measure(rho0, first):
        for a2, p2, rho2 in measure(rho1, second):
            probs[(a1, a2)] = p1 * p2
            posts[(a1, a2)] = rho2
    return PairDistribution(probs, posts)


def apply_detection_error(d: PairDistribution, e: DetectionError) -> PairDistribution:
    """Flip each recorded label independently with the misread rates of ``e``."""
    if e.is_zero:
        return d
    conf = e.confusion()
    probs = {(b1, b2): 0.0 for b1 in OUTCOMES for b2 in OUTCOMES}
    for (a1, a2), p in d.probabilities.items():
        for b1 in OUTCOMES:
            for b2 in OUTCOMES:
                probs[(b1, b2)] += p * conf[(b1, a1)] * conf[(b2, a2)]
    return PairDistribution(probs, dict(d.post_states), approximate_post_states=True)


def commutator_norm(a: SharpMeasurement, b: SharpMeasurement) -> float:
    ma, mb = a.observable, b.observable
    return float(np.max(np.abs(ma @ mb - mb @ ma)))


def is_projector(p: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.max(np.abs(p @ p - p)) <= atol and np.max(np.abs(p - p.conj().T)) <= atol)

"""N-gon measurement directions on the real qutrit sphere.

For odd ``N`` the directions are

    |psi_i> = R_z^{m_i}(2 pi / N) R_y(theta) |0>,   m_i = (i - 1)(N - 1)/2,

with ``R_y`` rotating by ``theta`` about ``|2>`` and ``R_z`` rotating about
``|0>``.  Neighbouring directions become orthogonal at the compatibility
angle returned by :func:`compatibility_angle`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qutrit import Pulse, Transition, basis, compose, inverse_sequence


class SequenceMode(enum.Enum):
    BLOCK = "block"
    CONCATENATED = "concatenated"


class Order(enum.Enum):
    NORMAL = "normal"
    REVERSE = "reverse"


def check_n(N: int) -> int:
    if isinstance(N, bool) or int(N) != N or N < 5 or N % 2 == 0:
        raise ValueError(f"N must be an odd integer >= 5, got {N!r}")
    return int(N)


def compatibility_angle(N: int) -> float:
    """Opening angle at which ``<psi_i|psi_{i+1}> = 0``."""
    N = check_n(N)
    c = math.cos(math.pi / N)
    return math.acos(math.sqrt(c / (1 + c)))


@dataclass(frozen=True)
class NgonConfig:
    N: int
    theta: float
    mode: SequenceMode = SequenceMode.BLOCK

    def __post_init__(self):
        check_n(self.N)
        if not isinstance(self.mode, SequenceMode):
            object.__setattr__(self, "mode", SequenceMode(self.mode))
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ValueError(f"theta must lie in [0, pi/2], got {self.theta!r}")

    @classmethod
    def compatible(cls, N: int, mode: SequenceMode = SequenceMode.BLOCK) -> "NgonConfig":
        return cls(N, compatibility_angle(N), mode)

    def check_index(self, i: int) -> int:
        if int(i) != i or not 1 <= i <= self.N:
            raise IndexError(f"observable index must be in 1..{self.N}, got {i!r}")
        return int(i)

    def wrap(self, i: int) -> int:
        """Map any integer onto 1..N (so 0 -> N and N + 1 -> 1)."""
        return (int(i) - 1) % self.N + 1

    def exponent(self, i: int) -> int:
        return (self.check_index(i) - 1) * (self.N - 1) // 2

    def pairs(self, order: Order) -> list[tuple[int, int]]:
        """Measured ``(first, second)`` pairs for the given order, ``i = 1..N``."""
        step = 1 if Order(order) is Order.NORMAL else -1
        return [(i, self.wrap(i + step)) for i in range(1, self.N + 1)]


def ry(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]], dtype=complex)


def rz(alpha: float) -> np.ndarray:
    # Sense matches R2(pi, pi/2) R1(2 alpha, pi/2) R2(pi, -pi/2).
    c, s = math.cos(alpha), math.sin(alpha)
    return np.array([[1, 0, 0], [0, c, s], [0, -s, c]], dtype=complex)


@dataclass(frozen=True, eq=False)
class NgonFrame:
    config: NgonConfig
    unitaries: tuple
    states: tuple

    def state(self, i: int) -> np.ndarray:
        return self.states[self.config.wrap(i) - 1]

    def unitary(self, i: int) -> np.ndarray:
        return self.unitaries[self.config.wrap(i) - 1]

    def overlaps(self, k: int = 1) -> np.ndarray:
        """``|<psi_i|psi_{i+k}>|`` for ``i = 1..N``."""
        N = self.config.N
        return np.array([abs(np.vdot(self.state(i), self.state(i + k))) for i in range(1, N + 1)])


def build_frame(config: NgonConfig) -> NgonFrame:
    """Directions and unitaries built from the rotation matrices directly."""
    step = 2 * math.pi / config.N
    base = ry(config.theta)
    unitaries = []
    for i in range(1, config.N + 1):
        unitaries.append(rz(config.exponent(i) * step) @ base)
    e0 = basis(0)
    states = tuple(u @ e0 for u in unitaries)
    return NgonFrame(config, tuple(unitaries), states)


def _ry_pulse(theta: float, phase: float = math.pi / 2) -> Pulse:
    return Pulse(Transition.T1, 2 * theta, phase)


def _rz_pulses(config: NgonConfig, m: int) -> list[Pulse]:
    return [
        Pulse(Transition.T2, math.pi, -math.pi / 2),
        Pulse(Transition.T1, 4 * math.pi / config.N, math.pi / 2, m),
        Pulse(Transition.T2, math.pi, math.pi / 2),
    ]


def pulse_decomposition(config: NgonConfig, i: int) -> list[Pulse]:
    """Laser pulses realising ``U_i``, in time order (first acts first)."""
    return [_ry_pulse(config.theta)] + _rz_pulses(config, config.exponent(i))


def transition_pulses(config: NgonConfig, i: int, j: int) -> list[Pulse]:
    """Pulses taking the frame of ``M_i`` to the frame of ``M_j`` (``U_j^dagger U_i``).

    Block mode plays ``U_i`` then ``U_j^dagger`` in full.  Concatenated mode
    cancels the inner ``|0> <-> |2>`` pair and merges the two ``R_z`` powers
    into one of exponent ``(m_i - m_j) mod N``.
    """
    config.check_index(i)
    config.check_index(j)
    if config.mode is SequenceMode.BLOCK:
        return pulse_decomposition(config, i) + inverse_sequence(pulse_decomposition(config, j))
    k = (config.exponent(i) - config.exponent(j)) % config.N
    return (
        [_ry_pulse(config.theta)]
        + _rz_pulses(config, k)
        + [_ry_pulse(config.theta, -math.pi / 2)]
    )


def transition_unitary(config: NgonConfig, i: int, j: int) -> np.ndarray:
    return compose(transition_pulses(config, i, j))


def pair_sequence(config: NgonConfig, i: int, j: int) -> tuple[list[Pulse], list[Pulse]]:
    """Pulse segments before the first and between the two detections."""
    first = inverse_sequence(pulse_decomposition(config, i))
    return first, transition_pulses(config, i, j)


def pulse_count(pulses) -> int:
    """Number of elementary laser pulses, counting repetitions."""
    return sum(p.repeat for p in pulses)

"""Linear algebra on the three-level qutrit space.

States, density operators and unitaries are plain ``numpy`` arrays of dtype
``complex128``.  The helpers in this module validate them and build the two
elementary laser-pulse rotations acting on the ``|0>-|1>`` and ``|0>-|2>``
transitions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

ATOL = 1e-12
PSD_ATOL = 1e-10

ID3 = np.eye(3, dtype=complex)


def basis(k: int) -> np.ndarray:
    """Return the basis ket ``|k>``."""
    if k not in (0, 1, 2):
        raise ValueError(f"basis index must be 0, 1 or 2, got {k}")
    v = np.zeros(3, dtype=complex)
    v[k] = 1.0
    return v


def as_ket(amplitudes, normalize: bool = False) -> np.ndarray:
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.shape != (3,):
        raise ValueError(f"ket must have 3 amplitudes, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("ket amplitudes must be finite")
    norm = np.linalg.norm(v)
    if normalize:
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        v = v / norm
    elif abs(norm - 1.0) > ATOL:
        raise ValueError(f"ket is not normalized (norm {norm!r})")
    return v


def as_density(matrix) -> np.ndarray:
    rho = np.asarray(matrix, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError(f"density matrix must be 3x3, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > ATOL:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > ATOL:
        raise ValueError(f"density matrix trace is {np.trace(rho)!r}, expected 1")
    if np.min(np.linalg.eigvalsh(rho)) < -PSD_ATOL:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def as_unitary(matrix) -> np.ndarray:
    u = np.asarray(matrix, dtype=complex)
    if u.shape != (3, 3):
        raise ValueError(f"unitary must be 3x3, got shape {u.shape}")
    if not is_unitary(u):
        raise ValueError("matrix is not unitary")
    return u


def is_unitary(u: np.ndarray, atol: float = ATOL) -> bool:
    return bool(np.max(np.abs(u.conj().T @ u - ID3)) <= atol)


def projector(ket) -> np.ndarray:
    """Return ``|psi><psi|`` for a normalized ket."""
    v = as_ket(ket)
    return np.outer(v, v.conj())


def fidelity(a, b) -> float:
    """Phase-insensitive overlap ``|<a|b>|^2`` of two kets."""
    return float(abs(np.vdot(a, b)) ** 2)


def equal_up_to_phase(u: np.ndarray, v: np.ndarray, atol: float = 1e-10) -> bool:
    """True when ``u = e^{i g} v`` for some global phase ``g``."""
    k = np.unravel_index(np.argmax(np.abs(v)), v.shape)
    if abs(u[k]) == 0:
        return False
    phase = u[k] / v[k]
    phase /= abs(phase)
    return bool(np.max(np.abs(u - phase * v)) <= atol)


def _check_finite(theta: float, phi: float) -> None:
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValueError(f"rotation angle and phase must be finite, got {theta!r}, {phi!r}")


def _rot(level: int, theta: float, phi: float) -> np.ndarray:
    _check_finite(theta, phi)
    c = math.cos(theta / 2)
    s = math.sin(theta / 2)
    r = np.eye(3, dtype=complex)
    r[0, 0] = c
    r[level, level] = c
    r[0, level] = -1j * np.exp(-1j * phi) * s
    r[level, 0] = -1j * np.exp(1j * phi) * s
    return r


def rot1(theta: float, phi: float) -> np.ndarray:
    """Resonant pulse on the ``|0> <-> |1>`` transition.

    Parameters
    ----------
    theta : float
        Pulse area in radians (``pi`` transfers the population).
    phi : float
        Laser phase in radians.
    """
    return _rot(1, theta, phi)


def rot2(theta: float, phi: float) -> np.ndarray:
    """Resonant pulse on the ``|0> <-> |2>`` transition; see :func:`rot1`."""
    return _rot(2, theta, phi)


def rot_batch(level: int, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Vectorised :func:`rot1`/:func:`rot2` returning an ``(n, 3, 3)`` stack."""
    theta, phi = np.broadcast_arrays(
        np.atleast_1d(np.asarray(theta, dtype=float)),
        np.atleast_1d(np.asarray(phi, dtype=float)),
    )
    n = theta.shape[0]
    c = np.cos(theta / 2)
    s = np.sin(theta / 2)
    r = np.zeros((n, 3, 3), dtype=complex)
    other = 3 - level
    r[:, 0, 0] = c
    r[:, level, level] = c
    r[:, other, other] = 1.0
    r[:, 0, level] = -1j * np.exp(-1j * phi) * s
    r[:, level, 0] = -1j * np.exp(1j * phi) * s
    return r


class Transition(enum.Enum):
    T1 = 1  # |0> <-> |1>
    T2 = 2  # |0> <-> |2>


@dataclass(frozen=True)
class Pulse:
    """One laser-pulse command, optionally repeated ``repeat`` times."""

    transition: Transition
    angle: float
    phase: float
    repeat: int = 1

    def __post_init__(self):
        if not isinstance(self.transition, Transition):
            object.__setattr__(self, "transition", Transition(self.transition))
        if int(self.repeat) != self.repeat or self.repeat < 0:
            raise ValueError(f"repeat must be a non-negative integer, got {self.repeat!r}")
        _check_finite(self.angle, self.phase)

    @property
    def level(self) -> int:
        return self.transition.value

    @property
    def total_angle(self) -> float:
        return self.repeat * self.angle

    def matrix(self) -> np.ndarray:
        # Same-axis rotations commute, so R^n(a, p) = R(n a, p) exactly.
        return _rot(self.level, self.total_angle, self.phase)

    def inverse(self) -> "Pulse":
        return Pulse(self.transition, -self.angle, self.phase, self.repeat)


def compose(pulses: Iterable[Pulse]) -> np.ndarray:
    """Unitary of a pulse list in time order (first pulse acts first)."""
    u = ID3.copy()
    for p in pulses:
        u = p.matrix() @ u
    return u


def inverse_sequence(pulses: Sequence[Pulse]) -> list[Pulse]:
    """Pulse list implementing the inverse unitary of ``pulses``."""
    return [p.inverse() for p in reversed(pulses)]


def apply(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Return ``U rho U^dagger``."""
    return u @ rho @ u.conj().T


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 3x3 unitary (QR of a complex Ginibre matrix)."""
    z = (rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(rng: np.random.Generator, rank: int = 3) -> np.ndarray:
    g = rng.standard_normal((3, rank)) + 1j * rng.standard_normal((3, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real

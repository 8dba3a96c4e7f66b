"""Closed-form predictions and bounds for N-cycle witnesses."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .measurement import make_measurement, pair_distribution
from .ngon import NgonConfig, Order, build_frame, check_n, compatibility_angle
from .qutrit import basis

SQRT5 = math.sqrt(5.0)
THETA5 = compatibility_angle(5)
BRUTEFORCE_MAX_N = 25


def kcbs_correlator(theta: float) -> float:
    """``<A_i^(1) A_{i+1}^(2)>`` for the pentagon on ``|0>``."""
    return (3 - SQRT5 + (5 + SQRT5) * math.cos(4 * theta)) / 8


def s5_theory(theta: float) -> float:
    return 5 * kcbs_correlator(theta)


def signalling_signed(theta: float) -> float:
    """``<A_i^(1)> - <A_i^(2)>`` for the pentagon (sign kept)."""
    return (5 - SQRT5 + 5 * (3 + SQRT5) * math.cos(2 * theta)) * math.sin(2 * theta) ** 2 / 16


def epsilon_theory(theta: float) -> float:
    return abs(signalling_signed(theta))


def s5_ext_theory(theta: float) -> float:
    return s5_theory(theta) + 5 * epsilon_theory(theta)


def folded_normal_mean(mu: float, sigma: float) -> float:
    """Mean of ``|X|`` for ``X ~ Normal(mu, sigma**2)``."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma!r}")
    if sigma == 0:
        return abs(mu)
    return sigma * math.sqrt(2 / math.pi) * math.exp(-(mu**2) / (2 * sigma**2)) - mu * math.erf(
        -mu / math.sqrt(2 * sigma**2)
    )


def shot_variance(mean: float, n: int, variance: str = "binomial") -> float:
    """Variance of the sample mean of ``n`` outcomes ``+-1`` with the given mean.

    ``"binomial"`` is ``(1 - mean**2)/n``; ``"one-sided"`` is the
    ``(1 - mean)/n`` variant, kept for comparison.
    """
    if variance == "binomial":
        return (1 - mean**2) / n
    if variance == "one-sided":
        return (1 - mean) / n
    raise ValueError(f"unknown variance convention {variance!r}")


def expected_epsilon(theta: float, n: int, N: int = 5, variance: str = "binomial") -> float:
    """Expected single-term signalling estimate after ``n`` repetitions."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    if N == 5:
        a1 = math.cos(2 * theta)
        a2 = a1 - signalling_signed(theta)
    else:
        t = ngon_theory(N, theta)
        a1, a2 = t.mean_first, t.mean_second
    sigma = math.sqrt(max(shot_variance(a1, n, variance) + shot_variance(a2, n, variance), 0.0))
    return folded_normal_mean(abs(a1 - a2), sigma)


def expected_s_ext(theta: float, n: int, N: int = 5, variance: str = "binomial") -> float:
    """Extended witness including the shot-noise bias of the signalling terms."""
    s = s5_theory(theta) if N == 5 else ngon_theory(N, theta).S
    return s + N * expected_epsilon(theta, n, N, variance)


def theta_estimate(first_marginals: Sequence[float]) -> float:
    """Opening angle from the mean of the first-slot marginals."""
    m = float(np.mean(first_marginals))
    if not -1.0 <= m <= 1.0:
        raise ValueError(f"mean marginal {m!r} lies outside [-1, 1]")
    return 0.5 * math.acos(m)


@dataclass(frozen=True)
class BoundSet:
    nc: float
    qm: float
    ns: float
    bell: float

    @property
    def ideal_cf(self) -> float:
        return (self.qm - self.nc) / (self.ns - self.nc)


def qm_bound(N: int) -> float:
    c = math.cos(math.pi / N)
    return (N - 3 * N * c) / (1 + c)


def bell_bound(M: int) -> float:
    """Largest violation reachable in a Bell scenario with an M-cycle exclusivity graph."""
    check_n(M)
    return M - 4 * (0.5 + (M - 1) / 4 * (1 + math.cos(math.pi / (M - 1))))


def bounds(N: int) -> BoundSet:
    N = check_n(N)
    return BoundSet(nc=-N + 2.0, qm=qm_bound(N), ns=-float(N), bell=bell_bound(N))


def classical_bound_bruteforce(N: int, chunk_bits: int = 18) -> int:
    """Minimum of the cyclic sum ``sum A_i A_{i+1}`` over all ``{+1,-1}^N``."""
    if int(N) != N or N < 2:
        raise ValueError(f"N must be an integer >= 2, got {N!r}")
    if N > BRUTEFORCE_MAX_N:
        raise ValueError(f"refusing 2^{N} enumeration; N must be <= {BRUTEFORCE_MAX_N}")
    N = int(N)
    shifts = np.arange(N, dtype=np.int64)
    size = 1 << N
    step = min(size, 1 << chunk_bits)
    best = N
    for start in range(0, size, step):
        codes = np.arange(start, min(start + step, size), dtype=np.int64)
        spins = 1 - 2 * ((codes[:, None] >> shifts) & 1).astype(np.int8)
        total = np.sum(spins * np.roll(spins, -1, axis=1), axis=1, dtype=np.int64)
        best = min(best, int(total.min()))
    return best


class NgonTheory(NamedTuple):
    S: float
    epsilon_terms: np.ndarray
    S_ext: float
    mean_first: float
    mean_second: float
    correlators: np.ndarray

    @property
    def epsilon(self) -> float:
        return float(np.sum(self.epsilon_terms))


def ngon_theory(N: int, theta: float, order: Order = Order.NORMAL) -> NgonTheory:
    """Exact (noise-free, infinite-statistics) witness values for an N-gon."""
    config = NgonConfig(check_n(N), theta)
    frame = build_frame(config)
    meas = [make_measurement(u) for u in frame.unitaries]
    rho0 = np.outer(basis(0), basis(0))
    first = np.zeros(N)
    second = np.zeros(N)
    corr = np.zeros(N)
    for k, (i, j) in enumerate(config.pairs(order)):
        d = pair_distribution(rho0, meas[i - 1], meas[j - 1])
        first[i - 1] = d.mean_first
        second[j - 1] = d.mean_second
        corr[k] = d.correlator
    eps = np.abs(first - second)
    S = float(np.sum(corr))
    return NgonTheory(
        S=S,
        epsilon_terms=eps,
        S_ext=S + float(np.sum(eps)),
        mean_first=float(np.mean(first)),
        mean_second=float(np.mean(second)),
        correlators=corr,
    )

"""Monte Carlo shot generation for sequential N-gon measurements.

Randomness comes from numpy's ``Philox4x64-10`` counter-based generator,
keyed through :class:`numpy.random.SeedSequence` by
``(seed, N, theta_index, i, order, stream)``.  Every pair owns independent
streams, so the output does not depend on how pairs are scheduled across
worker threads.  Stream 0 drives outcome sampling and stream 1 drives the
noise, which keeps a zero-noise run identical to an ideal one.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .measurement import DetectionError, make_measurement, pair_distribution
from .ngon import NgonConfig, Order, SequenceMode, build_frame, pair_sequence
from .qutrit import Pulse, basis, rot_batch
from .records import ORDER_CODES, ShotTable

RNG_ALGORITHM = "numpy.Philox4x64-10/SeedSequence; spawn_key=(N,theta_index,i,order,stream)"
SAMPLE_STREAM = 0
NOISE_STREAM = 1
FWHM_PER_SD = 2.355


@dataclass(frozen=True)
class NoiseModel:
    """Pulse-level imperfections.

    Attributes
    ----------
    pulse_angle_sd : float
        Absolute Gaussian jitter of every elementary pulse area, radians.
        A command repeated ``n`` times accumulates ``n`` independent draws.
    pulse_phase_sd : float
        Gaussian jitter of the laser phase, one draw per pulse command.
    common_detuning_fwhm : float
        FWHM in Hz of a detuning shared by both transitions, redrawn with the
        other noise.  It shifts each pulse's phase by ``2 pi delta t``.
    seconds_per_pi : float
        Duration of a pi pulse; sets the clock used by detuning and contrast.
    detection : DetectionError
        Misread probabilities applied to the recorded labels.
    sigma_t : float or None
        Coherence time of the contrast factor ``exp(-tau^2 / (2 sigma_t^2))``
        with ``tau`` the total pulse time.  ``None`` disables it.
    block_reps : int
        Repetitions sharing one noise draw; 1 means fully fast noise.
    """

    pulse_angle_sd: float = 0.0
    pulse_phase_sd: float = 0.0
    common_detuning_fwhm: float = 0.0
    seconds_per_pi: float = 0.0
    detection: DetectionError = field(default_factory=DetectionError)
    sigma_t: float | None = None
    block_reps: int = 1
    name: str = "custom"

    def __post_init__(self):
        if isinstance(self.detection, dict):
            object.__setattr__(self, "detection", DetectionError(**self.detection))
        for attr in ("pulse_angle_sd", "pulse_phase_sd", "common_detuning_fwhm", "seconds_per_pi"):
            v = getattr(self, attr)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{attr} must be a finite non-negative number, got {v!r}")
        if self.sigma_t is not None and not self.sigma_t > 0:
            raise ValueError(f"sigma_t must be positive or None, got {self.sigma_t!r}")
        if int(self.block_reps) != self.block_reps or self.block_reps < 1:
            raise ValueError(f"block_reps must be a positive integer, got {self.block_reps!r}")

    @property
    def detuning_sd(self) -> float:
        return self.common_detuning_fwhm / FWHM_PER_SD

    @property
    def contrast_on(self) -> bool:
        return self.sigma_t is not None and self.seconds_per_pi > 0

    @property
    def is_trivial(self) -> bool:
        return (
            self.pulse_angle_sd == 0
            and self.pulse_phase_sd == 0
            and (self.common_detuning_fwhm == 0 or self.seconds_per_pi == 0)
            and self.detection.is_zero
            and not self.contrast_on
        )

    def scaled(self, factor: float) -> "NoiseModel":
        """Same model with both pulse jitters multiplied by ``factor``."""
        return replace(
            self,
            pulse_angle_sd=self.pulse_angle_sd * factor,
            pulse_phase_sd=self.pulse_phase_sd * factor,
            name=f"{self.name}x{factor:g}",
        )

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "NoiseModel":
        known = {k: v for k, v in d.items() if k in cls.__dataclass_fields__}
        return cls(**known)

    @classmethod
    def from_file(cls, path) -> "NoiseModel":
        return cls.from_dict(json.loads(Path(path).read_text()))

    @classmethod
    def preset(cls, name: str) -> "NoiseModel":
        if name == "ideal":
            return cls(name="ideal")
        try:
            text = resources.files("qutrit_kcbs.presets").joinpath(f"{name}.json").read_text()
        except FileNotFoundError:
            raise ValueError(f"unknown noise preset {name!r}") from None
        return cls.from_dict(json.loads(text))


IDEAL = NoiseModel(name="ideal")


@dataclass(frozen=True)
class RunPlan:
    config: NgonConfig
    orders: tuple = (Order.NORMAL,)
    n_per_pair: int = 10_000
    seed: int = 0
    noise: NoiseModel = IDEAL
    theta_index: int = 0

    def __post_init__(self):
        orders = tuple(Order(o) for o in self.orders)
        if not orders:
            raise ValueError("at least one measurement order is required")
        # Normal before reverse, each at most once.
        object.__setattr__(self, "orders", tuple(o for o in (Order.NORMAL, Order.REVERSE) if o in orders))
        if self.noise is None:
            object.__setattr__(self, "noise", IDEAL)
        if int(self.n_per_pair) != self.n_per_pair or self.n_per_pair < 1:
            raise ValueError(f"n_per_pair must be >= 1, got {self.n_per_pair!r}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def generator(self, i: int, order: Order, stream: int) -> np.random.Generator:
        ss = np.random.SeedSequence(
            int(self.seed),
            spawn_key=(self.config.N, self.theta_index, i, ORDER_CODES[Order(order)], stream),
        )
        return np.random.Generator(np.random.Philox(ss))

    def describe(self) -> dict:
        return {
            "N": self.config.N,
            "theta_set": self.config.theta,
            "mode": self.config.mode.value,
            "orders": [o.value for o in self.orders],
            "n_per_pair": int(self.n_per_pair),
            "seed": int(self.seed),
            "theta_index": int(self.theta_index),
            "noise": self.noise.to_dict(),
            "rng": RNG_ALGORITHM,
        }


def _pulse_durations(pulses: Sequence[Pulse], seconds_per_pi: float) -> np.ndarray:
    return np.array([seconds_per_pi * abs(p.total_angle) / math.pi for p in pulses])


def sequence_duration(config: NgonConfig, i: int, j: int, seconds_per_pi: float) -> float:
    seg1, seg2 = pair_sequence(config, i, j)
    return float(_pulse_durations(seg1 + seg2, seconds_per_pi).sum())


def _evolve(kets: np.ndarray, pulses: Sequence[Pulse], z_angle, z_phase, phase_offsets, noise) -> np.ndarray:
    for g, p in enumerate(pulses):
        if p.repeat == 0:
            continue
        angle = p.total_angle + noise.pulse_angle_sd * math.sqrt(p.repeat) * z_angle[:, g]
        phase = p.phase + noise.pulse_phase_sd * z_phase[:, g] + phase_offsets[:, g]
        u = rot_batch(p.level, angle, phase)
        kets = np.einsum("nab,nb->na", u, kets)
    return kets


def noisy_pair_probabilities(config: NgonConfig, i: int, j: int, noise: NoiseModel,
                             rng: np.random.Generator, draws: int):
    """Per-draw ``P(A1=+1)``, ``P(A2=+1|A1=+1)`` and ``P(A2=+1|A1=-1)``.

    Random numbers are consumed in a fixed layout regardless of which noise
    terms are switched on.
    """
    seg1, seg2 = pair_sequence(config, i, j)
    pulses = seg1 + seg2
    G = len(pulses)
    z_angle = rng.standard_normal((draws, G))
    z_phase = rng.standard_normal((draws, G))
    z_detune = rng.standard_normal(draws)

    dur = _pulse_durations(pulses, noise.seconds_per_pi)
    t_mid = np.cumsum(dur) - dur / 2
    offsets = 2 * math.pi * noise.detuning_sd * z_detune[:, None] * t_mid[None, :]
    n1 = len(seg1)

    kets = np.broadcast_to(basis(0), (draws, 3)).copy()
    kets = _evolve(kets, seg1, z_angle[:, :n1], z_phase[:, :n1], offsets[:, :n1], noise)
    p1 = np.clip(np.abs(kets[:, 0]) ** 2, 0.0, 1.0)

    dark = kets.copy()
    dark[:, 0] = 0
    norm = np.linalg.norm(dark, axis=1)
    safe = norm > 1e-14
    dark[safe] /= norm[safe, None]
    dark[~safe] = basis(1)
    bright = np.broadcast_to(basis(0), (draws, 3))
    both = np.concatenate([bright, dark])
    rep2 = lambda a: np.concatenate([a, a])  # noqa: E731
    both = _evolve(both, seg2, rep2(z_angle[:, n1:]), rep2(z_phase[:, n1:]), rep2(offsets[:, n1:]), noise)
    q = np.clip(np.abs(both[:, 0]) ** 2, 0.0, 1.0)
    q_plus, q_minus = q[:draws], q[draws:]

    if noise.contrast_on:
        tau = float(dur.sum())
        c = math.exp(-(tau**2) / (2 * noise.sigma_t**2))
        p2 = p1 * q_plus + (1 - p1) * q_minus
        q_plus = c * q_plus + (1 - c) * p2
        q_minus = c * q_minus + (1 - c) * p2
    return p1, q_plus, q_minus


def _ideal_probabilities(config: NgonConfig, i: int, j: int):
    frame = build_frame(config)
    rho0 = np.outer(basis(0), basis(0))
    d = pair_distribution(rho0, make_measurement(frame.unitary(i)), make_measurement(frame.unitary(j)))
    return d.p_first(+1), d.p_second_given_first(+1, +1), d.p_second_given_first(+1, -1)


def _draw_outcomes(u: np.ndarray, p1, q_plus, q_minus) -> tuple[np.ndarray, np.ndarray]:
    a1 = np.where(u[:, 0] < p1, 1, -1).astype(np.int8)
    q = np.where(a1 == 1, q_plus, q_minus)
    a2 = np.where(u[:, 1] < q, 1, -1).astype(np.int8)
    return a1, a2


def _flip(a: np.ndarray, u: np.ndarray, e: DetectionError) -> np.ndarray:
    flip = np.where(a == 1, u < e.bright_error, u < e.dark_error)
    return np.where(flip, -a, a).astype(np.int8)


def sample_pair(plan: RunPlan, i: int, order: Order) -> ShotTable:
    """All repetitions of the pair whose first observable is ``i``."""
    config = plan.config
    order = Order(order)
    i = config.check_index(i)
    j = config.wrap(i + (1 if order is Order.NORMAL else -1))
    n = int(plan.n_per_pair)
    u = plan.generator(i, order, SAMPLE_STREAM).random((n, 2))
    noise = plan.noise
    if noise.is_trivial:
        a1, a2 = _draw_outcomes(u, *_ideal_probabilities(config, i, j))
    else:
        rng = plan.generator(i, order, NOISE_STREAM)
        draws = -(-n // noise.block_reps)
        p1, qp, qm = noisy_pair_probabilities(config, i, j, noise, rng, draws)
        if noise.block_reps > 1:
            p1, qp, qm = (np.repeat(a, noise.block_reps)[:n] for a in (p1, qp, qm))
        a1, a2 = _draw_outcomes(u, p1, qp, qm)
        if not noise.detection.is_zero:
            v = rng.random((n, 2))
            a1 = _flip(a1, v[:, 0], noise.detection)
            a2 = _flip(a2, v[:, 1], noise.detection)
    return ShotTable(
        config.N, config.theta,
        np.full(n, i), np.full(n, j), np.full(n, ORDER_CODES[order]), np.arange(n), a1, a2,
        meta=plan.describe(),
    )


def run(plan: RunPlan, workers: int = 1) -> ShotTable:
    """Every pair in every requested order, ``i = 1..N``, normal before reverse."""
    tasks = [(i, o) for o in plan.orders for i in range(1, plan.config.N + 1)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda t: sample_pair(plan, *t), tasks))
    else:
        parts = [sample_pair(plan, *t) for t in tasks]
    return ShotTable.concat(parts)


def theta_scan(base_plan: RunPlan, theta_values: Sequence[float], workers: int = 1) -> list[tuple[float, ShotTable]]:
    if len(theta_values) == 0:
        raise ValueError("theta_values is empty")
    out = []
    for k, theta in enumerate(theta_values):
        plan = replace(base_plan, config=replace(base_plan.config, theta=float(theta)), theta_index=k)
        out.append((float(theta), run(plan, workers)))
    return out


def expected_witness(config: NgonConfig, noise: NoiseModel, order: Order = Order.NORMAL,
                     draws: int = 20_000, seed: int = 12345) -> dict:
    """Noise-averaged population values of ``S``, ``sum eps`` and ``S_ext`` (no shot noise)."""
    N = config.N
    first = np.zeros(N)
    second = np.zeros(N)
    corr = np.zeros(N)
    for i, j in config.pairs(order):
        if noise.is_trivial:
            p1, qp, qm = _ideal_probabilities(config, i, j)
        else:
            rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(N, i))))
            p1, qp, qm = noisy_pair_probabilities(config, i, j, noise, rng, draws)
        pp = np.mean(p1 * qp)
        pm = np.mean(p1 * (1 - qp))
        mp = np.mean((1 - p1) * qm)
        mm = np.mean((1 - p1) * (1 - qm))
        e = noise.detection
        # Label flips act linearly on the marginals of each slot.
        m1 = pp + pm - mp - mm
        m2 = pp - pm + mp - mm
        c = pp - pm - mp + mm
        if not e.is_zero:
            f = lambda m: (1 - 2 * e.bright_error) * (1 + m) / 2 - (1 - 2 * e.dark_error) * (1 - m) / 2  # noqa: E731
            a = {(+1, +1): pp, (+1, -1): pm, (-1, +1): mp, (-1, -1): mm}
            conf = e.confusion()
            c = sum(
                p * sum(conf[(b1, a1)] * conf[(b2, a2)] * b1 * b2 for b1 in (1, -1) for b2 in (1, -1))
                for (a1, a2), p in a.items()
            )
            m1, m2 = f(m1), f(m2)
        first[i - 1] = m1
        second[j - 1] = m2
        corr[i - 1] = c
    eps = float(np.sum(np.abs(first - second)))
    S = float(np.sum(corr))
    return {"S": S, "epsilon": eps, "S_ext": S + eps, "mean_first": float(np.mean(first))}

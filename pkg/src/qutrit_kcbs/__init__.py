"""Qutrit N-cycle contextuality simulation and witness analysis."""

from .measurement import DetectionError, make_measurement, pair_distribution
from .ngon import NgonConfig, Order, SequenceMode, build_frame, compatibility_angle
from .records import ShotRecord, ShotTable
from .simulator import NoiseModel, RunPlan, run, sample_pair, theta_scan
from .stats import aggregate, analyze, witness
from .theory import bounds, ngon_theory

__version__ = "0.1.0"

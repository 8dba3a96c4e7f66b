"""Witness estimates and standard errors from finite shot data.

Each pair contributes three sample means (first outcome, second outcome,
product).  Standard errors use the ``n - 1`` sample standard deviation and
are combined in quadrature, i.e. as if all means were independent.  That
ignores the correlation between a pair's marginal and its correlator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .ngon import NgonConfig, Order, check_n
from .records import ShotRecord, ShotTable
from .theory import BoundSet, bounds as nc_bounds, theta_estimate


class IncompleteDatasetError(ValueError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__(f"dataset lacks pairs {self.missing}")


class UndefinedSignificanceError(ValueError):
    pass


class Estimate(NamedTuple):
    value: float
    se: float

    def __str__(self) -> str:
        return f"{self.value:.6g} +- {self.se:.2g}"


@dataclass(frozen=True)
class PairStats:
    i: int
    j: int
    order: Order
    n: int
    mean_a1: float
    mean_a2: float
    mean_corr: float
    se_a1: float
    se_a2: float
    se_corr: float


def _mean_se(total: int, n: int) -> tuple[float, float]:
    # For outcomes +-1 the sum of squares is n, so the sample variance is exact
    # in terms of the integer sum.
    mean = total / n
    if n < 2:
        return mean, math.nan
    var = (n * n - total * total) / (n * (n - 1))
    return mean, math.sqrt(max(var, 0.0) / n)


def aggregate(records: ShotTable | Iterable[ShotRecord]) -> list[PairStats]:
    """Per-pair means and standard errors, ordered by first index."""
    table = records if isinstance(records, ShotTable) else ShotTable.from_records(records)
    orders = table.orders
    if len(orders) != 1:
        raise ValueError(f"records mix measurement orders {[o.value for o in orders]}")
    order = orders[0]
    config = NgonConfig(check_n(table.N), min(max(table.theta_set, 0.0), math.pi / 2))
    expected = config.pairs(order)
    first_idx = table.i - 1
    step = 1 if order is Order.NORMAL else -1
    inconsistent = (first_idx + step) % table.N + 1 != table.j
    if np.any(inconsistent):
        k = int(np.argmax(inconsistent))
        raise ValueError(f"record pair ({table.i[k]}, {table.j[k]}) is not adjacent in {order.value} order")
    counts = np.bincount(first_idx, minlength=table.N)
    missing = [p for p in expected if counts[p[0] - 1] == 0]
    if missing:
        raise IncompleteDatasetError(missing)
    s1 = np.bincount(first_idx, weights=table.a1, minlength=table.N)
    s2 = np.bincount(first_idx, weights=table.a2, minlength=table.N)
    sc = np.bincount(first_idx, weights=table.a1.astype(np.int64) * table.a2, minlength=table.N)
    out = []
    for i, j in expected:
        n = int(counts[i - 1])
        m1, e1 = _mean_se(int(s1[i - 1]), n)
        m2, e2 = _mean_se(int(s2[i - 1]), n)
        mc, ec = _mean_se(int(sc[i - 1]), n)
        out.append(PairStats(i, j, order, n, m1, m2, mc, e1, e2, ec))
    return out


def exact_pair_stats(distributions, pairs, order: Order) -> list[PairStats]:
    """Zero-error :class:`PairStats` from exact :class:`PairDistribution` objects."""
    return [
        PairStats(i, j, order, 1, d.mean_first, d.mean_second, d.correlator, 0.0, 0.0, 0.0)
        for (i, j), d in zip(pairs, distributions)
    ]


def _quad(values) -> float:
    return math.sqrt(sum(v * v for v in values))


@dataclass(frozen=True)
class WitnessReport:
    N: int
    order: Order
    theta_est: Estimate
    S: Estimate
    epsilon_terms: tuple
    epsilon: Estimate
    S_ext: Estimate
    CF: Estimate
    bounds: BoundSet
    saturation: Estimate = field(default=Estimate(math.nan, math.nan))
    normalized_signaling: Estimate = field(default=Estimate(math.nan, math.nan))

    @property
    def epsilon_dominated(self) -> bool:
        """Signalling too close to zero for its standard error to be a confidence interval."""
        return self.epsilon.value < 2 * self.epsilon.se

    @property
    def contextual(self) -> bool:
        return self.S_ext.value < self.bounds.nc

    @classmethod
    def from_totals(cls, N: int, S: Estimate, S_ext: Estimate, order: Order = Order.NORMAL,
                    bounds: BoundSet | None = None) -> "WitnessReport":
        """Report from published totals only (no per-pair data)."""
        b = bounds or nc_bounds(N)
        S, S_ext = Estimate(*S), Estimate(*S_ext)
        eps = Estimate(S_ext.value - S.value, math.sqrt(max(S_ext.se**2 - S.se**2, 0.0)))
        report = cls(
            N, Order(order), Estimate(math.nan, math.nan), S, (), eps, S_ext,
            _cf(S, b), b,
        )
        sat, sig = comparison_metrics(report)
        return replace(report, saturation=sat, normalized_signaling=sig)


def _cf(S: Estimate, b: BoundSet) -> Estimate:
    span = b.ns - b.nc
    return Estimate((S.value - b.nc) / span, S.se / abs(span))


def witness(stats: Sequence[PairStats], bounds: BoundSet | None = None) -> WitnessReport:
    """Bare and extended witnesses, angle estimate and contextual fraction."""
    stats = list(stats)
    N = check_n(len(stats))
    orders = {s.order for s in stats}
    if len(orders) != 1:
        raise ValueError("pair statistics mix measurement orders")
    order = orders.pop()
    expected = NgonConfig(N, 0.0).pairs(order)
    by_pair = {(s.i, s.j): s for s in stats}
    missing = [p for p in expected if p not in by_pair]
    if missing:
        raise IncompleteDatasetError(missing)
    b = bounds or nc_bounds(N)

    S = Estimate(sum(s.mean_corr for s in stats), _quad(s.se_corr for s in stats))

    # epsilon_k compares observable k measured first (pair whose first index
    # is k) with k measured second (pair whose second index is k).
    first = {s.i: s for s in stats}
    second = {s.j: s for s in stats}
    eps_terms = []
    eps_se = []
    for k in range(1, N + 1):
        f, g = first[k], second[k]
        eps_terms.append(abs(f.mean_a1 - g.mean_a2))
        eps_se.append(math.hypot(f.se_a1, g.se_a2))
    eps = Estimate(sum(eps_terms), _quad(eps_se))
    S_ext = Estimate(S.value + eps.value, math.hypot(S.se, eps.se))

    marg = [first[k].mean_a1 for k in range(1, N + 1)]
    theta = theta_estimate(np.clip(marg, -1.0, 1.0))
    x = float(np.mean(marg))
    se_x = _quad(first[k].se_a1 for k in range(1, N + 1)) / N
    if se_x == 0:
        theta_se = 0.0
    elif abs(x) >= 1:
        theta_se = math.inf
    else:
        theta_se = se_x / (2 * math.sqrt(1 - x * x))

    report = WitnessReport(
        N, order, Estimate(theta, theta_se), S, tuple(eps_terms), eps, S_ext, _cf(S, b), b,
    )
    sat, sig = comparison_metrics(report)
    return replace(report, saturation=sat, normalized_signaling=sig)


def comparison_metrics(report: WitnessReport) -> tuple[Estimate, Estimate]:
    """Saturation of the quantum limit and signalling, both relative to ``qm - nc``.

    Signalling is divided by ``|qm - nc|`` so that it stays non-negative.
    """
    span = report.bounds.qm - report.bounds.nc
    sat = Estimate((report.S.value - report.bounds.nc) / span, report.S.se / abs(span))
    sig = Estimate(report.epsilon.value / abs(span), report.epsilon.se / abs(span))
    return sat, sig


def violation_significance(report: WitnessReport) -> tuple[float, float]:
    """Distance below the classical bound in standard errors, bare and extended."""
    nc = report.bounds.nc
    if not report.S.se > 0 or not report.S_ext.se > 0:
        raise UndefinedSignificanceError("standard error is zero; significance undefined")
    return (nc - report.S.value) / report.S.se, (nc - report.S_ext.value) / report.S_ext.se


def analyze(table: ShotTable) -> dict[Order, WitnessReport]:
    """One report per measurement order present in ``table``."""
    return {o: witness(aggregate(t)) for o, t in table.split_by_order().items()}


def fit_vertex(x, y, grid: int = 2001) -> float:
    """Location of the kink of ``a + b|x - x0| + c (x - x0)^2`` fitted by least squares."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 4:
        raise ValueError("need at least four points to fit a vertex")
    best, best_x0 = math.inf, float(x[np.argmin(y)])
    for x0 in np.linspace(x.min(), x.max(), grid):
        d = x - x0
        design = np.column_stack([np.ones_like(d), np.abs(d), d * d])
        coef, *_ = np.linalg.lstsq(design, y, rcond=None)
        r = float(np.sum((design @ coef - y) ** 2))
        if r < best:
            best, best_x0 = r, float(x0)
    return best_x0


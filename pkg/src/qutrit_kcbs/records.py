"""Shot records and their columnar container."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

from .ngon import Order, SequenceMode

ORDER_CODES = {Order.NORMAL: 0, Order.REVERSE: 1}
CODE_ORDERS = {v: k for k, v in ORDER_CODES.items()}


@dataclass(frozen=True)
class ShotRecord:
    N: int
    theta_set: float
    i: int
    j: int
    order: Order
    rep: int
    a1: int
    a2: int

    def __post_init__(self):
        if not isinstance(self.order, Order):
            object.__setattr__(self, "order", Order(self.order))
        if self.a1 not in (1, -1) or self.a2 not in (1, -1):
            raise ValueError(f"outcomes must be +1 or -1, got ({self.a1}, {self.a2})")
        step = 1 if self.order is Order.NORMAL else -1
        if (self.i - 1 + step) % self.N + 1 != self.j:
            raise ValueError(f"pair ({self.i}, {self.j}) is not adjacent in {self.order.value} order")


@dataclass(eq=False)
class ShotTable:
    """All repetitions of one run, stored column-wise.

    ``order`` holds codes from :data:`ORDER_CODES`; outcomes are ``int8``.
    """

    N: int
    theta_set: float
    i: np.ndarray
    j: np.ndarray
    order: np.ndarray
    rep: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.i = np.asarray(self.i, dtype=np.int64)
        self.j = np.asarray(self.j, dtype=np.int64)
        self.order = np.asarray(self.order, dtype=np.int8)
        self.rep = np.asarray(self.rep, dtype=np.int64)
        self.a1 = np.asarray(self.a1, dtype=np.int8)
        self.a2 = np.asarray(self.a2, dtype=np.int8)
        n = len(self.i)
        if any(len(c) != n for c in (self.j, self.order, self.rep, self.a1, self.a2)):
            raise ValueError("shot table columns have different lengths")

    def __len__(self) -> int:
        return len(self.i)

    @property
    def orders(self) -> list[Order]:
        return [CODE_ORDERS[c] for c in sorted(set(self.order.tolist()))]

    @property
    def mode(self) -> SequenceMode | None:
        m = self.meta.get("mode")
        return SequenceMode(m) if m else None

    def select(self, mask: np.ndarray) -> "ShotTable":
        return ShotTable(
            self.N, self.theta_set, self.i[mask], self.j[mask], self.order[mask],
            self.rep[mask], self.a1[mask], self.a2[mask], dict(self.meta),
        )

    def split_by_order(self) -> dict[Order, "ShotTable"]:
        return {o: self.select(self.order == ORDER_CODES[o]) for o in self.orders}

    def records(self) -> Iterator[ShotRecord]:
        for k in range(len(self)):
            yield ShotRecord(
                self.N, self.theta_set, int(self.i[k]), int(self.j[k]),
                CODE_ORDERS[int(self.order[k])], int(self.rep[k]), int(self.a1[k]), int(self.a2[k]),
            )

    @classmethod
    def from_records(cls, records: Iterable[ShotRecord], meta: dict | None = None) -> "ShotTable":
        records = list(records)
        if not records:
            raise ValueError("no shot records given")
        configs = {(r.N, r.theta_set) for r in records}
        if len(configs) != 1:
            raise ValueError(f"records mix several (N, theta_set) configurations: {sorted(configs)}")
        N, theta = configs.pop()
        cols = np.array(
            [(r.i, r.j, ORDER_CODES[r.order], r.rep, r.a1, r.a2) for r in records], dtype=np.int64
        )
        return cls(N, theta, *cols.T, meta=dict(meta or {}))

    @classmethod
    def concat(cls, tables: list["ShotTable"]) -> "ShotTable":
        first = tables[0]
        for t in tables[1:]:
            if (t.N, t.theta_set) != (first.N, first.theta_set):
                raise ValueError("cannot concatenate tables of different configurations")
        cols = [np.concatenate([getattr(t, c) for t in tables]) for c in ("i", "j", "order", "rep", "a1", "a2")]
        return cls(first.N, first.theta_set, *cols, meta=dict(first.meta))

    def equals(self, other: "ShotTable") -> bool:
        return (
            self.N == other.N
            and self.theta_set == other.theta_set
            and all(
                np.array_equal(getattr(self, c), getattr(other, c))
                for c in ("i", "j", "order", "rep", "a1", "a2")
            )
        )

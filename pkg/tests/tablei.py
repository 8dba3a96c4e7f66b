"""Published pentagon results near compatibility, as synthetic shot tables."""

import numpy as np

from qutrit_kcbs.ngon import Order
from qutrit_kcbs.records import ORDER_CODES, ShotTable
from qutrit_kcbs.theory import THETA5

# (i, j, <A_i>, <A_j>, <A_i A_j>)
NORMAL_ROWS = [
    (1, 2, -0.106, -0.107, -0.786),
    (2, 3, -0.111, -0.092, -0.793),
    (3, 4, -0.107, -0.112, -0.775),
    (4, 5, -0.102, -0.107, -0.787),
    (5, 1, -0.100, -0.121, -0.774),
]
# Printed as (i, i+1) rows although the order is reversed.
REVERSE_ROWS = [
    (1, 2, -0.113, -0.096, -0.786),
    (2, 3, -0.111, -0.101, -0.787),
    (3, 4, -0.106, -0.103, -0.784),
    (4, 5, -0.093, -0.118, -0.783),
    (5, 1, -0.102, -0.097, -0.798),
]
TOTALS = {
    Order.NORMAL: {"S": (-3.915, 0.014), "S_ext": (-3.864, 0.034)},
    Order.REVERSE: {"S": (-3.937, 0.014), "S_ext": (-3.890, 0.034)},
}


def _counts(n, m1, m2, mc):
    s1, s2, sc = (2 * round(m * n / 2) for m in (m1, m2, mc))
    if (n + s1 + s2 + sc) % 4:
        sc += 2  # nudge the correlator by 2/n to make the counts integral
    npp = (n + s1 + s2 + sc) // 4
    npm = (n + s1 - s2 - sc) // 4
    nmp = (n - s1 + s2 - sc) // 4
    nmm = n - npp - npm - nmp
    assert min(npp, npm, nmp, nmm) >= 0
    return npp, npm, nmp, nmm


def synthetic_table(rows=NORMAL_ROWS, order=Order.NORMAL, n=10_000) -> ShotTable:
    """Shots whose per-pair means equal ``rows`` to within ``2/n``."""
    cols = {k: [] for k in ("i", "j", "a1", "a2")}
    for i, j, m1, m2, mc in rows:
        counts = _counts(n, m1, m2, mc)
        for (a1, a2), c in zip(((1, 1), (1, -1), (-1, 1), (-1, -1)), counts):
            cols["i"] += [i] * c
            cols["j"] += [j] * c
            cols["a1"] += [a1] * c
            cols["a2"] += [a2] * c
    size = len(cols["i"])
    rep = np.concatenate([np.arange(n) for _ in rows])
    return ShotTable(5, THETA5, cols["i"], cols["j"], np.full(size, ORDER_CODES[order]), rep,
                     cols["a1"], cols["a2"], meta={"source": "published pentagon table"})

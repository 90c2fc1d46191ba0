"""Rank-based homogeneity statistics for symmetric matrices.

The two-sample statistic sums, over rows, the squared normalized rank-sum
deviation of the first column group (a Wilcoxon/Mann-Whitney extension);
the multi-group statistic squares the deviation of each group's mean rank
from the global mean rank (n+1)/2 (a Kruskal-Wallis extension).  Both are
evaluated from rank prefix sums in O(1) per row per group.

Accumulation order is fixed (rows within a group, then groups left to
right) so repeated runs produce bit-identical values.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .matrix import RankTable
from .segment import Boundaries


def kernel_h(x: float, y: float) -> int:
    """Antisymmetric comparison kernel: 1 if x < y, -1 if x > y, 0 if equal."""
    return int(x <= y) - int(y <= x)


def kernel_g(x: float, y: float) -> float:
    """Centered indicator kernel: +1/2 if x <= y, else -1/2."""
    return 0.5 if x <= y else -0.5


def expected_s(n: int, groups: int = 1) -> float:
    """Null expectation of the homogeneity statistic with ``groups`` cuts."""
    if n < 2:
        raise ParameterError(f"matrix order must be >= 2, got {n}")
    if groups < 1:
        raise ParameterError(f"group count must be >= 1, got {groups}")
    return groups * (n + 1) / 3.0


@dataclass(frozen=True)
class TwoSampleStat:
    n: int
    split: int
    s_value: float
    t_value: float
    expected_s: float


@dataclass(frozen=True)
class MultiSampleStat:
    boundaries: Boundaries
    s_value: float
    expected_s: float


def _check_split(n: int, split: int) -> None:
    if not 1 <= split <= n - 1:
        raise ParameterError(f"split must lie in [1, {n - 1}], got {split}")


def u_stat(r: RankTable, row: int, split: int) -> float:
    """Normalized rank-sum deviation of row ``row`` for the given split.

    Equals 2 * sum_{j<=split} ((n+1)/2 - rank_j) / sqrt(n*split*(n-split)),
    read off the prefix sums in O(1).
    """
    _check_split(r.n, split)
    n = r.n
    dev = 0.5 * split * (n + 1) - float(r.prefix[row, split])
    return 2.0 * dev / math.sqrt(n * split * (n - split))


def s_two_sample(r: RankTable, split: int) -> TwoSampleStat:
    """Two-group homogeneity statistic at ``split`` with its centering.

    ``t_value`` is the sqrt(n)-normalized centered statistic whose upper
    quantile defines the rejection region of the homogeneity test.
    """
    _check_split(r.n, split)
    n = r.n
    dev = 0.5 * split * (n + 1) - r.prefix[:, split].astype(np.float64)
    s = 4.0 * float(np.sum(dev * dev)) / (n * split * (n - split))
    exp = expected_s(n, 1)
    return TwoSampleStat(
        n=n,
        split=split,
        s_value=s,
        t_value=(s - exp) / math.sqrt(n),
        expected_s=exp,
    )


def s_multi(r: RankTable, boundaries: Boundaries) -> MultiSampleStat:
    """Multi-group homogeneity statistic over the groups cut by ``boundaries``."""
    n = r.n
    if boundaries.n != n:
        raise ParameterError(
            f"boundaries are for order {boundaries.n}, rank table has order {n}"
        )
    if boundaries.count == 0:
        raise ParameterError("at least one cut is required")
    center = 0.5 * (n + 1)
    total = 0.0
    edges = (0, *boundaries.cuts, n)
    for e0, e1 in zip(edges[:-1], edges[1:]):
        length = e1 - e0
        dev = (r.prefix[:, e1] - r.prefix[:, e0]).astype(np.float64) - length * center
        total += float(np.sum(dev * dev)) / length
    return MultiSampleStat(
        boundaries=boundaries,
        s_value=4.0 * total / (n * n),
        expected_s=expected_s(n, boundaries.count),
    )

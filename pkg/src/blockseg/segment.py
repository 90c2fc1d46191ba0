"""Exact dynamic-programming segmentation of the column axis.

The score of a column segment a..b (1-based, inclusive) is

    cost(a:b) = (b - a + 1) * sum_i (mean rank of row i over a..b - (n+1)/2)^2

and the detector places L cuts so that the sum of per-segment costs is
maximal, which also maximizes the multi-group homogeneity statistic (the
statistic is 4/n^2 times that sum).  The full cost table is built from rank
prefix sums: centering the prefix matrix turns every cost into a difference
of Gram-matrix entries, so one O(n^3) matrix product yields all O(n^2)
segment costs.  The optimizer is the classical segmentation recursion

    best[l](p) = max_m { best[l-1](m) + cost(m+1:p) }

solved for every level l <= l_max and every prefix length p, with argmax
backtracking; ties take the smallest cut index.  Total O(n^3 + l_max n^2).

Prefix sums of ranks are integers, so all cost arithmetic stays exact in
float64 up to n of a few thousand; results are then independent of BLAS
threading and bit-reproducible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import EnumerationBudgetError, ParameterError
from .matrix import RankTable, SymMatrix, compute_ranks


@dataclass(frozen=True, eq=True)
class Boundaries:
    """Strictly increasing cut positions in [1, n-1] for an order-n matrix.

    A cut at position c splits columns c and c+1.  The outer sentinels 0 and
    n are implicit and never stored.
    """

    n: int
    cuts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ParameterError(f"matrix order must be >= 2, got {self.n}")
        cuts = tuple(int(c) for c in self.cuts)
        object.__setattr__(self, "cuts", cuts)
        for c in cuts:
            if not 1 <= c <= self.n - 1:
                raise ParameterError(f"cut {c} outside [1, {self.n - 1}]")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ParameterError(f"cuts must be strictly increasing, got {cuts}")

    @property
    def count(self) -> int:
        return len(self.cuts)

    def edges(self) -> tuple[int, ...]:
        """Segment edges including the sentinels: (0, cuts..., n)."""
        return (0, *self.cuts, self.n)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.cuts, dtype=np.int64)


@dataclass(frozen=True, eq=False)
class CostTable:
    """All segment costs; ``delta[a-1, b-1]`` is cost(a:b) for 1 <= a <= b <= n."""

    n: int
    delta: np.ndarray

    def value(self, a: int, b: int) -> float:
        """Cost of the 1-based column segment a..b."""
        if not 1 <= a <= b <= self.n:
            raise ParameterError(f"need 1 <= a <= b <= {self.n}, got ({a}, {b})")
        return float(self.delta[a - 1, b - 1])


@dataclass(frozen=True)
class LevelResult:
    """Optimal segmentation using exactly ``level`` cuts."""

    level: int
    objective: float
    boundaries: Boundaries
    s_value: float


@dataclass(frozen=True, eq=False)
class SegmentationResult:
    """Optimal boundaries for every cut count 0..l_max.

    ``objective_table[l, p]`` holds the best objective for l cuts within the
    first p columns (-inf where infeasible) and ``argmax_table[l, p]`` the
    smallest maximizing last-cut position, kept for verification.
    """

    n: int
    min_seg: int
    levels: tuple[LevelResult, ...]
    objective_table: np.ndarray
    argmax_table: np.ndarray

    def level(self, l: int) -> LevelResult:
        return self.levels[l]


def build_cost_table(r: RankTable) -> CostTable:
    """Fill every segment cost from rank prefix sums in O(n^3)/O(n^2) memory."""
    n = r.n
    centered = r.prefix - 0.5 * (n + 1) * np.arange(n + 1)
    gram = centered.T @ centered
    diag = np.diagonal(gram)
    quad = diag[None, 1:] - 2.0 * gram[:n, 1:] + diag[:n, None]
    length = np.arange(1, n + 1)[None, :] - np.arange(n)[:, None]
    delta = np.where(length >= 1, np.maximum(quad, 0.0) / np.maximum(length, 1), 0.0)
    delta.setflags(write=False)
    return CostTable(n=n, delta=delta)


def dp_segment(c: CostTable, l_max: int, min_seg: int = 1) -> SegmentationResult:
    """Maximize the summed segment cost for every cut count up to ``l_max``.

    Every segment must contain at least ``min_seg`` columns.  When several
    cut positions attain a maximum the smallest index is kept, which makes
    the returned boundaries deterministic.
    """
    n = c.n
    if min_seg < 1:
        raise ParameterError(f"min_seg must be >= 1, got {min_seg}")
    if l_max < 0:
        raise ParameterError(f"l_max must be >= 0, got {l_max}")
    if (l_max + 1) * min_seg > n:
        raise ParameterError(
            f"{l_max} cuts with segments of >= {min_seg} columns do not fit in n={n}"
        )
    delta = c.delta
    objective = np.full((l_max + 1, n + 1), -np.inf)
    argmax = np.full((l_max + 1, n + 1), -1, dtype=np.int64)
    feasible_p = np.arange(min_seg, n + 1)
    objective[0, feasible_p] = delta[0, feasible_p - 1]

    # admissible last cut m for prefix length p = b+1: m <= p - min_seg;
    # m >= level*min_seg is implied by objective[level-1, m] being finite.
    col = np.arange(n)
    admissible = col[:, None] <= col[None, :] + 1 - min_seg
    for level in range(1, l_max + 1):
        cand = np.where(admissible, objective[level - 1, :n, None] + delta, -np.inf)
        best_m = np.argmax(cand, axis=0)
        best = np.take_along_axis(cand, best_m[None, :], axis=0)[0]
        objective[level, 1:] = best
        argmax[level, 1:] = np.where(np.isfinite(best), best_m, -1)

    levels = []
    for level in range(l_max + 1):
        cuts = []
        p = n
        for k in range(level, 0, -1):
            m = int(argmax[k, p])
            cuts.append(m)
            p = m
        cuts.reverse()
        obj = float(objective[level, n])
        levels.append(
            LevelResult(
                level=level,
                objective=obj,
                boundaries=Boundaries(n, tuple(cuts)),
                s_value=4.0 * obj / (n * n),
            )
        )
    objective.setflags(write=False)
    argmax.setflags(write=False)
    return SegmentationResult(
        n=n,
        min_seg=min_seg,
        levels=tuple(levels),
        objective_table=objective,
        argmax_table=argmax,
    )


def brute_force_segment(
    c: CostTable,
    l: int,
    min_seg: int = 1,
    budget: int = 2_000_000,
) -> tuple[float, Boundaries]:
    """Exact maximizer by enumerating every admissible cut vector.

    Intended as a verification oracle for small n; refuses when the number
    of candidate cut vectors exceeds ``budget``.  Tie-breaking matches
    ``dp_segment``: among equal objectives the vector whose cuts are
    smallest from the right wins.
    """
    n = c.n
    if min_seg < 1:
        raise ParameterError(f"min_seg must be >= 1, got {min_seg}")
    if l < 0:
        raise ParameterError(f"cut count must be >= 0, got {l}")
    if (l + 1) * min_seg > n:
        raise ParameterError(
            f"{l} cuts with segments of >= {min_seg} columns do not fit in n={n}"
        )
    if math.comb(n - 1, l) > budget:
        raise EnumerationBudgetError(
            f"C({n - 1}, {l}) = {math.comb(n - 1, l)} exceeds budget {budget}"
        )
    delta = c.delta
    best_obj = -np.inf
    best_cuts: tuple[int, ...] | None = None
    for cuts in combinations(range(1, n), l):
        edges = (0, *cuts, n)
        if any(e1 - e0 < min_seg for e0, e1 in zip(edges[:-1], edges[1:])):
            continue
        obj = 0.0
        for e0, e1 in zip(edges[:-1], edges[1:]):
            obj += delta[e0, e1 - 1]
        if obj > best_obj or (
            obj == best_obj
            and best_cuts is not None
            and cuts[::-1] < best_cuts[::-1]
        ):
            best_obj = obj
            best_cuts = cuts
    assert best_cuts is not None
    return float(best_obj), Boundaries(n, best_cuts)


def detect(
    m: SymMatrix,
    l_max: int,
    min_seg: int = 1,
    jitter_seed: int | None = None,
) -> SegmentationResult:
    """Rank, build the cost table and segment ``m`` in one call."""
    ranks = compute_ranks(m, jitter_seed=jitter_seed)
    return dp_segment(build_cost_table(ranks), l_max, min_seg=min_seg)

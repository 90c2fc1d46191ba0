"""Distances between estimated and reference boundary sets."""
from __future__ import annotations

import math

import numpy as np

from .errors import ParameterError
from .segment import Boundaries


def distance_d(estimated: Boundaries, truth: Boundaries) -> float:
    """Scaled l2 distance between equal-length cut vectors.

    Both vectors are sorted ascending, paired componentwise, and the root
    of the summed squared differences is divided by n.  Lengths must match;
    use :func:`hausdorff_components` to compare sets of different sizes.
    """
    if estimated.n != truth.n:
        raise ParameterError(
            f"boundary sets refer to different orders ({estimated.n} vs {truth.n})"
        )
    if estimated.count != truth.count:
        raise ParameterError(
            f"cut vectors must have equal length, got {estimated.count} and {truth.count}"
        )
    a = np.sort(estimated.as_array())
    b = np.sort(truth.as_array())
    return math.sqrt(float(np.sum((a - b) ** 2))) / estimated.n


def hausdorff_components(a: Boundaries, b: Boundaries) -> tuple[float, float, float]:
    """Directed Hausdorff parts (d1, d2) and their maximum d.

    d1 is the largest distance from a point of ``b`` to the set ``a``; d2 is
    the same with roles swapped; d = max(d1, d2) is the Hausdorff distance.
    """
    if a.count == 0 or b.count == 0:
        raise ParameterError("both boundary sets must be non-empty")
    pa = a.as_array()[:, None]
    pb = b.as_array()[None, :]
    gaps = np.abs(pa - pb)
    d1 = float(gaps.min(axis=0).max())
    d2 = float(gaps.min(axis=1).max())
    return d1, d2, max(d1, d2)


def selection_frequencies(results: list[Boundaries], n: int) -> np.ndarray:
    """Count how often each position 1..n-1 was selected as a cut.

    Entry k-1 of the returned vector is the number of result sets containing
    a cut at position k; the vector sums to the total number of cuts.
    """
    counts = np.zeros(n - 1, dtype=np.int64)
    for res in results:
        if res.n != n:
            raise ParameterError(f"boundary set for order {res.n} in an order-{n} tally")
        for c in res.cuts:
            counts[c - 1] += 1
    return counts

"""Block-constant summary of a segmented matrix."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .matrix import SymMatrix
from .segment import Boundaries


@dataclass(frozen=True, eq=False)
class SummaryMatrix:
    """Per-block means of an observed matrix under a given segmentation.

    ``block_means[r, c]`` is the mean of the observed entries in block cell
    (r, c); the table is symmetric, so expanding it yields an exactly
    symmetric block-constant matrix.
    """

    n: int
    cuts: Boundaries
    block_means: np.ndarray

    def expand(self) -> np.ndarray:
        """Blow the block means up to a dense block-constant n-by-n array."""
        edges = self.cuts.edges()
        sizes = np.diff(edges)
        return np.repeat(np.repeat(self.block_means, sizes, axis=0), sizes, axis=1)

    def as_matrix(self) -> SymMatrix:
        return SymMatrix.from_array(self.expand())


def summarize(m: SymMatrix, cuts: Boundaries) -> SummaryMatrix:
    """Average the observed entries within every block cell.

    Means are computed for lower-triangle cells and mirrored, which keeps
    the table bit-exactly symmetric.
    """
    if cuts.n != m.n:
        raise ParameterError(f"cuts are for order {cuts.n}, matrix has order {m.n}")
    edges = cuts.edges()
    blocks = cuts.count + 1
    means = np.empty((blocks, blocks))
    for br in range(blocks):
        r0, r1 = edges[br], edges[br + 1]
        for bc in range(br + 1):
            c0, c1 = edges[bc], edges[bc + 1]
            mean = float(m.values[r0:r1, c0:c1].mean())
            means[br, bc] = mean
            means[bc, br] = mean
    means.setflags(write=False)
    return SummaryMatrix(n=m.n, cuts=cuts, block_means=means)

"""Symmetric matrix type, file ingestion and per-row rank tables.

The observation is a dense n-by-n real symmetric matrix.  Two text formats
are supported:

* dense: one row per line, fields split on whitespace by default or on a
  single configurable delimiter, ``#`` starts a comment line;
* triples: three whitespace-separated columns ``i j value`` with 1-based
  indices; values for the same unordered pair accumulate.

Ranks are computed row by row.  The rank of an entry is the number of
entries in its row that are less than or equal to it, so under ties every
member of a tied group receives the group's largest rank.  Rows containing
ties are flagged; an optional seeded jitter breaks ties by adding per-row
uniform noise smaller than the smallest nonzero gap, which cannot reorder
distinct values.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import MatrixFormatError, SymmetryViolation
from .rng import STREAM_JITTER, substream


@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Immutable dense symmetric matrix of finite reals, order >= 2."""

    n: int
    values: np.ndarray

    @classmethod
    def from_array(
        cls,
        values: np.ndarray,
        symmetry_tol: float = 0.0,
        repair: bool = False,
    ) -> "SymMatrix":
        """Validate an array and wrap it as a SymMatrix.

        Symmetry must hold exactly by default.  A positive ``symmetry_tol``
        admits bounded asymmetry (e.g. rounding noise in exported files) but
        the stored matrix is always exactly symmetric: pass ``repair=True``
        to replace each pair by its average, otherwise any nonzero
        asymmetry is still an error.
        """
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise MatrixFormatError(f"expected a square matrix, got shape {arr.shape}")
        n = arr.shape[0]
        if n < 2:
            raise MatrixFormatError(f"matrix order must be >= 2, got {n}")
        if not np.all(np.isfinite(arr)):
            raise MatrixFormatError("matrix contains non-finite entries")
        gap = float(np.max(np.abs(arr - arr.T))) if n else 0.0
        if gap > symmetry_tol:
            raise SymmetryViolation(
                f"max |a[i,j] - a[j,i]| = {gap:g} exceeds tolerance {symmetry_tol:g}"
            )
        if gap > 0.0:
            if not repair:
                raise SymmetryViolation(
                    f"asymmetry {gap:g} is within tolerance but repair is disabled; "
                    "pass repair=True to average mirrored entries"
                )
            arr = 0.5 * (arr + arr.T)
        arr = np.ascontiguousarray(arr)
        arr.setflags(write=False)
        return cls(n=n, values=arr)


@dataclass(frozen=True, eq=False)
class RankTable:
    """Per-row ranks of a SymMatrix plus their per-row prefix sums.

    ``ranks[i, j]`` counts entries of row i that are <= the entry at column
    j.  ``prefix[i, j]`` is the sum of the first j ranks of row i, with
    ``prefix[i, 0] == 0``.  ``has_ties[i]`` records whether row i contained
    equal values before any jitter was applied.
    """

    n: int
    ranks: np.ndarray
    prefix: np.ndarray
    has_ties: np.ndarray


def compute_ranks(m: SymMatrix, jitter_seed: int | None = None) -> RankTable:
    """Rank every row of ``m``; optionally jitter to break ties.

    With ``jitter_seed`` set, each row is perturbed by i.i.d. uniform noise
    on (0, eps_row) where eps_row is half the row's smallest nonzero gap
    (1.0 for constant rows).  Distinct values keep their order; tied values
    are ordered uniformly at random, reproducibly in the seed.
    """
    vals = m.values
    n = m.n
    sorted_vals = np.sort(vals, axis=1)
    has_ties = np.any(sorted_vals[:, 1:] == sorted_vals[:, :-1], axis=1)
    has_ties.setflags(write=False)

    if jitter_seed is not None:
        gaps = np.diff(sorted_vals, axis=1)
        min_gap = np.where(gaps > 0, gaps, np.inf).min(axis=1)
        eps = np.where(np.isfinite(min_gap), 0.5 * min_gap, 1.0)
        rng = substream(jitter_seed, STREAM_JITTER)
        vals = vals + rng.random(vals.shape) * eps[:, None]
        sorted_vals = np.sort(vals, axis=1)

    ranks = np.empty((n, n), dtype=np.int64)
    for i in range(n):
        ranks[i] = np.searchsorted(sorted_vals[i], vals[i], side="right")
    prefix = np.zeros((n, n + 1), dtype=np.int64)
    np.cumsum(ranks, axis=1, out=prefix[:, 1:])
    ranks.setflags(write=False)
    prefix.setflags(write=False)
    return RankTable(n=n, ranks=ranks, prefix=prefix, has_ties=has_ties)


def load_dense(
    path: str | os.PathLike,
    delimiter: str | None = None,
    symmetry_tol: float = 0.0,
    repair: bool = False,
) -> SymMatrix:
    """Load a dense matrix from text.

    ``delimiter=None`` (the default) splits fields on any whitespace, which
    also reads tab-separated files; pass an explicit single character to
    split strictly on it.  Lines starting with ``#`` are ignored.  Ragged
    rows, non-numeric fields, non-square shape and asymmetry beyond
    ``symmetry_tol`` are errors.
    """
    try:
        arr = np.loadtxt(path, delimiter=delimiter, comments="#", ndmin=2)
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise MatrixFormatError(f"cannot parse {path}: {exc}") from exc
    return SymMatrix.from_array(arr, symmetry_tol=symmetry_tol, repair=repair)


def load_triples(path: str | os.PathLike, n: int) -> SymMatrix:
    """Load an order-``n`` matrix from ``i j value`` records (1-based).

    Each record adds ``value`` to both cells of the unordered pair {i, j};
    duplicate records, including mirrored (i, j)/(j, i) pairs, accumulate by
    summation.  Pairs never mentioned stay 0.
    """
    if n < 2:
        raise MatrixFormatError(f"matrix order must be >= 2, got {n}")
    try:
        data = np.loadtxt(path, comments="#", ndmin=2)
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise MatrixFormatError(f"cannot parse {path}: {exc}") from exc
    if data.size == 0:
        data = data.reshape(0, 3)
    if data.shape[1] != 3:
        raise MatrixFormatError(
            f"triple records need exactly 3 columns, got {data.shape[1]}"
        )
    ij = data[:, :2]
    if not np.all(ij == np.floor(ij)):
        raise MatrixFormatError("indices must be integers")
    i = ij[:, 0].astype(np.int64) - 1
    j = ij[:, 1].astype(np.int64) - 1
    if i.size and (i.min() < 0 or j.min() < 0 or i.max() >= n or j.max() >= n):
        raise MatrixFormatError(f"indices must lie in [1, {n}]")
    vals = data[:, 2]
    arr = np.zeros((n, n))
    np.add.at(arr, (i, j), vals)
    off = i != j
    np.add.at(arr, (j[off], i[off]), vals[off])
    return SymMatrix.from_array(arr)


def save_dense(m: SymMatrix | np.ndarray, path: str | os.PathLike, delimiter: str = "\t") -> None:
    """Write a dense matrix as text; floats round-trip exactly via %.17g."""
    values = m.values if isinstance(m, SymMatrix) else np.asarray(m)
    np.savetxt(path, values, fmt="%.17g", delimiter=delimiter)

"""Synthetic block-structured matrices and replication campaigns.

A layout assigns a sampling distribution to every cell of the block grid
induced by a set of cuts; only lower-triangle cells are stored, the upper
triangle of a generated matrix is always the mirror of the lower one.
Three ready-made layouts cover the benchmark configurations:

* ``two_sample_blocks`` - one cut; the lower-left rectangle gets its own
  distribution, the two diagonal blocks theirs (the power-study design);
* ``block_diagonal`` - diagonal blocks from one distribution, everything
  off-diagonal from another;
* ``chessboard`` - distributions alternate by block-index parity, so cells
  sharing a boundary always differ; the upper-left block gets ``primary``.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ParameterError
from .matrix import SymMatrix
from .metrics import distance_d, hausdorff_components
from .rng import STREAM_CAMPAIGN, STREAM_GENERATE, substream, substream_seed
from .segment import Boundaries, detect

_FAMILY_ARITY = {"normal": 2, "cauchy": 2, "exponential": 1, "uniform": 0}
_FAMILY_ALIASES = {"exp": "exponential", "gauss": "normal", "gaussian": "normal"}


@dataclass(frozen=True)
class DistSpec:
    """A sampling distribution: normal(mean, sd), cauchy(location, scale),
    exponential(rate) or uniform() on (0, 1)."""

    family: str
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        family = _FAMILY_ALIASES.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if family not in _FAMILY_ARITY:
            raise ParameterError(f"unsupported distribution family {self.family!r}")
        if len(self.params) != _FAMILY_ARITY[family]:
            raise ParameterError(
                f"{family} takes {_FAMILY_ARITY[family]} parameter(s), got {self.params}"
            )
        if family in ("normal", "cauchy") and self.params[1] <= 0:
            raise ParameterError(f"{family} scale must be positive, got {self.params[1]}")
        if family == "exponential" and self.params[0] <= 0:
            raise ParameterError(f"exponential rate must be positive, got {self.params[0]}")

    @classmethod
    def normal(cls, mean: float, sd: float) -> "DistSpec":
        return cls("normal", (mean, sd))

    @classmethod
    def cauchy(cls, location: float, scale: float) -> "DistSpec":
        return cls("cauchy", (location, scale))

    @classmethod
    def exponential(cls, rate: float) -> "DistSpec":
        return cls("exponential", (rate,))

    @classmethod
    def uniform(cls) -> "DistSpec":
        return cls("uniform", ())

    def label(self) -> str:
        if not self.params:
            return self.family
        return f"{self.family}:" + ",".join(f"{p:g}" for p in self.params)

    @classmethod
    def parse(cls, text: str) -> "DistSpec":
        """Parse labels like ``normal:0,1``, ``exponential:2`` or ``uniform``."""
        family, _, rest = text.strip().partition(":")
        try:
            params = tuple(float(p) for p in rest.split(",")) if rest else ()
        except ValueError as exc:
            raise ParameterError(f"cannot parse distribution {text!r}") from exc
        return cls(family.lower(), params)


def sample_dist(d: DistSpec, rng: np.random.Generator, size=None) -> np.ndarray | float:
    """Draw from ``d`` via fixed, documented transforms of the stream."""
    if d.family == "normal":
        mean, sd = d.params
        return rng.standard_normal(size) * sd + mean
    if d.family == "cauchy":
        location, scale = d.params
        u = rng.random(size)
        return location + scale * np.tan(np.pi * (u - 0.5))
    if d.family == "exponential":
        rate = d.params[0]
        return -np.log1p(-rng.random(size)) / rate
    return rng.random(size)


@dataclass(frozen=True, eq=False)
class BlockLayout:
    """Block grid over an order-n matrix with one DistSpec per lower cell.

    ``cells`` maps (block_row, block_col) with block_row >= block_col to a
    distribution; every lower-triangle cell of the grid must be covered.
    """

    n: int
    kind: str
    cuts: Boundaries
    cells: Mapping[tuple[int, int], DistSpec]

    def __post_init__(self) -> None:
        if self.cuts.n != self.n:
            raise ParameterError("cuts and layout disagree on matrix order")
        blocks = self.cuts.count + 1
        want = {(r, c) for r in range(blocks) for c in range(r + 1)}
        have = set(self.cells)
        if have != want:
            raise ParameterError(
                f"cell map must cover exactly the lower block triangle; "
                f"missing {sorted(want - have)}, extra {sorted(have - want)}"
            )

    @property
    def blocks(self) -> int:
        return self.cuts.count + 1

    def cell(self, block_row: int, block_col: int) -> DistSpec:
        if block_col > block_row:
            block_row, block_col = block_col, block_row
        return self.cells[(block_row, block_col)]


def default_cuts(n: int, blocks: int = 10) -> Boundaries:
    """Cuts at the multiples of n/blocks, i.e. blocks-1 interior boundaries."""
    if n < blocks:
        raise ParameterError(f"n={n} is too small for {blocks} blocks")
    cuts = tuple(n * k // blocks for k in range(1, blocks))
    return Boundaries(n, cuts)


def two_sample_blocks(
    n: int,
    split: int,
    upper_left: DistSpec,
    off_diag: DistSpec,
    lower_right: DistSpec,
) -> BlockLayout:
    cuts = Boundaries(n, (split,))
    cells = {(0, 0): upper_left, (1, 0): off_diag, (1, 1): lower_right}
    return BlockLayout(n=n, kind="two_sample", cuts=cuts, cells=cells)


def block_diagonal(
    n: int,
    on_diag: DistSpec,
    off_diag: DistSpec,
    cuts: Boundaries | None = None,
) -> BlockLayout:
    cuts = cuts if cuts is not None else default_cuts(n)
    cells = {
        (r, c): (on_diag if r == c else off_diag)
        for r in range(cuts.count + 1)
        for c in range(r + 1)
    }
    return BlockLayout(n=n, kind="block_diagonal", cuts=cuts, cells=cells)


def chessboard(
    n: int,
    primary: DistSpec,
    secondary: DistSpec,
    cuts: Boundaries | None = None,
) -> BlockLayout:
    cuts = cuts if cuts is not None else default_cuts(n)
    cells = {
        (r, c): (primary if (r + c) % 2 == 0 else secondary)
        for r in range(cuts.count + 1)
        for c in range(r + 1)
    }
    return BlockLayout(n=n, kind="chessboard", cuts=cuts, cells=cells)


def gen_matrix(layout: BlockLayout, seed: int) -> SymMatrix:
    """Sample the lower triangle cell by cell and mirror it; deterministic in seed.

    Cells are filled in block-row-major order from a single substream, each
    cell row-major (diagonal cells only their lower triangle, diagonal
    included), so the output is a pure function of (layout, seed).
    """
    rng = substream(seed, STREAM_GENERATE)
    n = layout.n
    edges = layout.cuts.edges()
    arr = np.zeros((n, n))
    for br in range(layout.blocks):
        r0, r1 = edges[br], edges[br + 1]
        for bc in range(br + 1):
            c0, c1 = edges[bc], edges[bc + 1]
            spec = layout.cells[(br, bc)]
            if br == bc:
                ii, jj = np.tril_indices(r1 - r0)
                arr[r0 + ii, c0 + jj] = sample_dist(spec, rng, ii.size)
            else:
                arr[r0:r1, c0:c1] = sample_dist(spec, rng, (r1 - r0, c1 - c0))
    upper = np.triu_indices(n, k=1)
    arr[upper] = arr.T[upper]
    return SymMatrix.from_array(arr)


# --- layout (de)serialization ------------------------------------------------

LAYOUT_SCHEMA = "blockseg.layout/1"


def layout_to_json(layout: BlockLayout) -> str:
    doc = {
        "schema": LAYOUT_SCHEMA,
        "kind": layout.kind,
        "n": layout.n,
        "cuts": list(layout.cuts.cuts),
        "cells": {f"{r},{c}": spec.label() for (r, c), spec in sorted(layout.cells.items())},
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def layout_from_json(text: str) -> BlockLayout:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"bad layout JSON: {exc}") from exc
    if doc.get("schema") != LAYOUT_SCHEMA:
        raise ParameterError(f"unsupported layout schema {doc.get('schema')!r}")
    n = int(doc["n"])
    cuts = Boundaries(n, tuple(int(c) for c in doc["cuts"]))
    cells = {}
    for key, label in doc["cells"].items():
        r, c = (int(t) for t in key.split(","))
        cells[(r, c)] = DistSpec.parse(label)
    return BlockLayout(n=n, kind=str(doc["kind"]), cuts=cuts, cells=cells)


# --- replication campaigns ---------------------------------------------------


@dataclass(frozen=True)
class CampaignRecord:
    """One replication: generated with ``seed``, detected ``cuts``, metrics."""

    rep: int
    seed: int
    cuts: Boundaries
    distance: float
    d1: float
    d2: float
    runtime_ms: float


def run_campaign(
    layout: BlockLayout,
    reps: int,
    seed: int,
    l_detect: int | None = None,
    min_seg: int = 1,
) -> list[CampaignRecord]:
    """Generate, detect and score ``reps`` matrices from ``layout``.

    Detection asks for ``l_detect`` cuts (the layout's true count by
    default) and each record carries the scaled l2 distance and Hausdorff
    parts against the layout's cuts plus the detection wall time.
    """
    if reps < 1:
        raise ParameterError(f"reps must be >= 1, got {reps}")
    l_detect = layout.cuts.count if l_detect is None else l_detect
    if l_detect < 1:
        raise ParameterError("campaigns need at least one cut to score")
    records = []
    for rep in range(reps):
        rep_seed = substream_seed(seed, STREAM_CAMPAIGN, rep)
        m = gen_matrix(layout, rep_seed)
        t0 = time.perf_counter()
        result = detect(m, l_max=l_detect, min_seg=min_seg)
        runtime_ms = (time.perf_counter() - t0) * 1e3
        found = result.level(l_detect).boundaries
        if found.count == layout.cuts.count:
            dist = distance_d(found, layout.cuts)
        else:
            dist = float("nan")
        d1, d2, _ = hausdorff_components(found, layout.cuts)
        records.append(
            CampaignRecord(
                rep=rep,
                seed=rep_seed,
                cuts=found,
                distance=dist,
                d1=d1,
                d2=d2,
                runtime_ms=runtime_ms,
            )
        )
    return records

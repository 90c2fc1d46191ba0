"""blockseg: rank-based block-boundary detection in symmetric matrices."""

from ._version import __version__
from .calibrate import (
    CalibrationReport,
    TestResult,
    calibrate_quantile,
    null_t_values,
    two_sample_test,
)
from .errors import (
    BlocksegError,
    EnumerationBudgetError,
    MatrixFormatError,
    ParameterError,
    SymmetryViolation,
)
from .manifest import RunManifest, sha256_path
from .matrix import RankTable, SymMatrix, compute_ranks, load_dense, load_triples, save_dense
from .metrics import distance_d, hausdorff_components, selection_frequencies
from .segment import (
    Boundaries,
    CostTable,
    LevelResult,
    SegmentationResult,
    brute_force_segment,
    build_cost_table,
    detect,
    dp_segment,
)
from .simulate import (
    BlockLayout,
    CampaignRecord,
    DistSpec,
    block_diagonal,
    chessboard,
    default_cuts,
    gen_matrix,
    layout_from_json,
    layout_to_json,
    run_campaign,
    sample_dist,
    two_sample_blocks,
)
from .stats import (
    MultiSampleStat,
    TwoSampleStat,
    expected_s,
    kernel_g,
    kernel_h,
    s_multi,
    s_two_sample,
    u_stat,
)
from .summary import SummaryMatrix, summarize

__all__ = [
    "__version__",
    "BlocksegError",
    "MatrixFormatError",
    "SymmetryViolation",
    "ParameterError",
    "EnumerationBudgetError",
    "SymMatrix",
    "RankTable",
    "compute_ranks",
    "load_dense",
    "load_triples",
    "save_dense",
    "kernel_h",
    "kernel_g",
    "expected_s",
    "u_stat",
    "s_two_sample",
    "s_multi",
    "TwoSampleStat",
    "MultiSampleStat",
    "Boundaries",
    "CostTable",
    "LevelResult",
    "SegmentationResult",
    "build_cost_table",
    "dp_segment",
    "brute_force_segment",
    "detect",
    "CalibrationReport",
    "TestResult",
    "calibrate_quantile",
    "null_t_values",
    "two_sample_test",
    "DistSpec",
    "BlockLayout",
    "sample_dist",
    "gen_matrix",
    "default_cuts",
    "two_sample_blocks",
    "block_diagonal",
    "chessboard",
    "layout_to_json",
    "layout_from_json",
    "CampaignRecord",
    "run_campaign",
    "distance_d",
    "hausdorff_components",
    "selection_frequencies",
    "SummaryMatrix",
    "summarize",
    "RunManifest",
    "sha256_path",
]

"""Command-line interface.

Subcommands: detect, test, calibrate, simulate, evaluate, summarize, bench.
Every run that writes files also writes a ``*.manifest.json`` recording the
command, parameters, seed, tool version and input digests; re-running with
an identical manifest reproduces byte-identical result files (wall-clock
fields excepted).  Exit codes: 0 success, 2 unreadable or invalid input
matrices, 3 invalid or infeasible parameters.
"""
from __future__ import annotations

import functools
import json
import secrets
import sys
import time
from pathlib import Path

import click
import numpy as np

from ._version import __version__
from .calibrate import calibrate_quantile, two_sample_test
from .errors import MatrixFormatError, ParameterError
from .manifest import RunManifest, sha256_path
from .matrix import SymMatrix, compute_ranks, load_dense, load_triples, save_dense
from .metrics import distance_d, hausdorff_components, selection_frequencies
from .segment import Boundaries, build_cost_table, dp_segment
from .simulate import (
    BlockLayout,
    DistSpec,
    block_diagonal,
    chessboard,
    gen_matrix,
    layout_from_json,
    layout_to_json,
    run_campaign,
    two_sample_blocks,
)
from .summary import summarize

EXIT_INPUT = 2
EXIT_PARAMS = 3

_thread_limiter = None  # keeps the threadpoolctl limiter alive for the process


def _guard(f):
    """Map library errors onto the documented exit codes."""

    @functools.wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except MatrixFormatError as exc:
            click.echo(f"input error: {exc}", err=True)
            sys.exit(EXIT_INPUT)
        except ParameterError as exc:
            click.echo(f"parameter error: {exc}", err=True)
            sys.exit(EXIT_PARAMS)

    return wrapper


def _resolve_seed(seed: int | None) -> int:
    """Use the given seed or draw one from entropy; always recorded."""
    return seed if seed is not None else secrets.randbits(63)


def _parse_cuts(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.replace(" ", "").split(",") if t)
    except ValueError as exc:
        raise ParameterError(f"cannot parse cut list {text!r}") from exc


def _read_cut_file(path: str) -> tuple[int, ...]:
    cuts = []
    try:
        with open(path, encoding="utf-8") as handle:
            for line in handle:
                line = line.split("#", 1)[0].strip()
                if line:
                    cuts.append(int(line))
    except OSError as exc:
        raise MatrixFormatError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise MatrixFormatError(f"bad cut file {path}: {exc}") from exc
    return tuple(cuts)


def _load_matrix(path, fmt, triples_n, delimiter, symmetry_tol, repair) -> SymMatrix:
    if fmt == "triples":
        if triples_n is None:
            raise ParameterError("--triples-n is required with --format triples")
        return load_triples(path, triples_n)
    return load_dense(path, delimiter=delimiter, symmetry_tol=symmetry_tol, repair=repair)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out is None:
        click.echo(text, nl=False)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _write_manifest(out, command, parameters, seed, inputs, runtime_ms) -> None:
    if out is None:
        return
    digests = {str(p): sha256_path(p) for p in inputs}
    manifest = RunManifest(
        command=command,
        parameters=parameters,
        seed=seed,
        input_digest=digests,
        runtime_ms=runtime_ms,
    )
    Path(out).with_suffix(".manifest.json").write_text(manifest.to_json(), encoding="utf-8")


_matrix_input_options = [
    click.option("--format", "fmt", type=click.Choice(["dense", "triples"]), default="dense",
                 show_default=True, help="Input matrix format."),
    click.option("--triples-n", type=int, default=None,
                 help="Matrix order when reading triples."),
    click.option("--delimiter", default=None,
                 help="Field delimiter for dense input (default: any whitespace)."),
    click.option("--symmetry-tol", type=float, default=0.0, show_default=True,
                 help="Largest tolerated |a[i,j]-a[j,i]|."),
    click.option("--repair-symmetry", is_flag=True,
                 help="Average mirrored entries when within tolerance."),
]


def _with_options(options):
    def deco(f):
        for opt in reversed(options):
            f = opt(f)
        return f

    return deco


@click.group()
@click.version_option(__version__)
@click.option("--threads", type=int, default=None, help="Cap BLAS/worker threads.")
def main(threads):
    """Detect distribution-block boundaries in symmetric matrices."""
    global _thread_limiter
    if threads is not None:
        try:
            from threadpoolctl import threadpool_limits

            _thread_limiter = threadpool_limits(limits=threads)
        except ImportError:
            click.echo("warning: threadpoolctl not installed, --threads ignored", err=True)


@main.command("detect")
@click.argument("input_path", metavar="INPUT", type=click.Path())
@_with_options(_matrix_input_options)
@click.option("--lmax", type=int, default=1, show_default=True,
              help="Largest number of cuts to solve for.")
@click.option("--min-seg", type=int, default=1, show_default=True,
              help="Smallest admissible segment length.")
@click.option("--jitter-seed", type=int, default=None,
              help="Break rank ties with seeded jitter.")
@click.option("--summary", is_flag=True, help="Also emit block means at the deepest level.")
@click.option("--out", type=click.Path(), default=None, help="Write JSON here (plus manifest).")
@_guard
def cmd_detect(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry,
               lmax, min_seg, jitter_seed, summary, out):
    """Estimate block boundaries of INPUT for every cut count up to --lmax."""
    t0 = time.perf_counter()
    m = _load_matrix(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry)
    ranks = compute_ranks(m, jitter_seed=jitter_seed)
    result = dp_segment(build_cost_table(ranks), lmax, min_seg=min_seg)
    payload = {
        "schema": "blockseg.detect/1",
        "tool_version": __version__,
        "n": m.n,
        "l_max": lmax,
        "min_seg": min_seg,
        "jitter_seed": jitter_seed,
        "tied_rows": int(np.count_nonzero(ranks.has_ties)),
        "levels": [
            {
                "l": lev.level,
                "cuts": list(lev.boundaries.cuts),
                "objective": lev.objective,
                "s_value": lev.s_value,
            }
            for lev in result.levels
        ],
    }
    if summary:
        summ = summarize(m, result.level(lmax).boundaries)
        payload["summary"] = {
            "cuts": list(summ.cuts.cuts),
            "block_means": summ.block_means.tolist(),
        }
        if out is not None:
            save_dense(summ.expand(), Path(out).with_suffix(".xhat.tsv"))
    _emit(payload, out)
    _write_manifest(
        out, "detect",
        {"input": str(input_path), "format": fmt, "lmax": lmax, "min_seg": min_seg,
         "summary": summary, "symmetry_tol": symmetry_tol},
        jitter_seed, [input_path], (time.perf_counter() - t0) * 1e3,
    )


@main.command("test")
@click.argument("input_path", metavar="INPUT", type=click.Path())
@_with_options(_matrix_input_options)
@click.option("--n1", type=int, required=True, help="Size of the first column group.")
@click.option("--threshold", type=float, default=None, help="Rejection threshold.")
@click.option("--alpha", type=float, default=None, help="Level for in-process calibration.")
@click.option("--calibrate-reps", type=int, default=10000, show_default=True,
              help="Replications for in-process calibration.")
@click.option("--dist", default="uniform", show_default=True,
              help="Null family for in-process calibration.")
@click.option("--seed", type=int, default=None, help="Calibration seed.")
@click.option("--out", type=click.Path(), default=None, help="Write JSON here (plus manifest).")
@_guard
def cmd_test(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry,
             n1, threshold, alpha, calibrate_reps, dist, seed, out):
    """Test homogeneity of the column groups split at --n1."""
    t0 = time.perf_counter()
    if threshold is None and alpha is None:
        raise ParameterError("pass either --threshold or --alpha")
    if threshold is not None and alpha is not None:
        raise ParameterError("--threshold and --alpha are mutually exclusive")
    m = _load_matrix(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry)
    seed = _resolve_seed(seed)
    payload = {
        "schema": "blockseg.test/1",
        "tool_version": __version__,
        "n": m.n,
        "n1": n1,
    }
    if threshold is None:
        report = calibrate_quantile(m.n, n1, dist, calibrate_reps, alpha, seed)
        threshold = report.quantile
        payload.update(
            threshold_source="calibrated", alpha=alpha, calibrate_reps=calibrate_reps,
            dist=report.dist, seed=seed,
        )
    else:
        payload["threshold_source"] = "given"
    result = two_sample_test(m, n1, threshold)
    payload.update(
        threshold=result.threshold,
        s_value=result.s_value,
        t_value=result.t_value,
        decision=result.decision,
    )
    _emit(payload, out)
    _write_manifest(
        out, "test",
        {"input": str(input_path), "n1": n1, "threshold": threshold, "alpha": alpha,
         "calibrate_reps": calibrate_reps, "dist": dist},
        seed, [input_path], (time.perf_counter() - t0) * 1e3,
    )


@main.command("calibrate")
@click.option("--n", type=int, required=True, help="Matrix order.")
@click.option("--n1", type=int, required=True, help="Size of the first column group.")
@click.option("--dist", default="normal:0,1", show_default=True, help="Null family.")
@click.option("--reps", type=int, default=10000, show_default=True)
@click.option("--alpha", type=float, default=0.05, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Write JSON here (plus manifest).")
@_guard
def cmd_calibrate(n, n1, dist, reps, alpha, seed, out):
    """Estimate the (1-alpha) null quantile of the test statistic."""
    t0 = time.perf_counter()
    seed = _resolve_seed(seed)
    report = calibrate_quantile(n, n1, dist, reps, alpha, seed)
    if out is None:
        click.echo(report.to_json(), nl=False)
    else:
        Path(out).write_text(report.to_json(), encoding="utf-8")
    _write_manifest(
        out, "calibrate",
        {"n": n, "n1": n1, "dist": report.dist, "reps": reps, "alpha": alpha},
        seed, [], (time.perf_counter() - t0) * 1e3,
    )


def _build_layout(kind, n, cuts, n1, dist1, dist2, dist3) -> BlockLayout:
    d1 = DistSpec.parse(dist1)
    d2 = DistSpec.parse(dist2)
    cut_b = Boundaries(n, _parse_cuts(cuts)) if cuts else None
    if kind == "two-sample":
        if n1 is None:
            raise ParameterError("--n1 is required for the two-sample layout")
        d3 = DistSpec.parse(dist3) if dist3 else d1
        return two_sample_blocks(n, n1, d1, d2, d3)
    if kind == "block-diagonal":
        return block_diagonal(n, d1, d2, cuts=cut_b)
    return chessboard(n, d1, d2, cuts=cut_b)


@main.command("simulate")
@click.option("--kind", type=click.Choice(["chessboard", "block-diagonal", "two-sample"]),
              default="chessboard", show_default=True)
@click.option("--layout-file", type=click.Path(), default=None,
              help="Load the layout from JSON instead of building it from flags.")
@click.option("--n", type=int, default=100, show_default=True)
@click.option("--cuts", default=None, help="True cuts, e.g. '10,20' (default: multiples of n/10).")
@click.option("--n1", type=int, default=None, help="Split for the two-sample layout.")
@click.option("--dist1", default="normal:1,1", show_default=True)
@click.option("--dist2", default="normal:0,1", show_default=True)
@click.option("--dist3", default=None, help="Third family for the two-sample layout.")
@click.option("--reps", type=int, default=100, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--l-detect", type=int, default=None,
              help="Cuts to request from the detector (default: the layout's true count).")
@click.option("--min-seg", type=int, default=1, show_default=True)
@click.option("--out", type=click.Path(), required=True, help="Output prefix.")
@_guard
def cmd_simulate(kind, layout_file, n, cuts, n1, dist1, dist2, dist3, reps, seed,
                 l_detect, min_seg, out):
    """Run a replication campaign: generate, detect, score against the truth."""
    t0 = time.perf_counter()
    inputs = []
    if layout_file is not None:
        try:
            layout = layout_from_json(Path(layout_file).read_text(encoding="utf-8"))
        except OSError as exc:
            raise MatrixFormatError(f"cannot read {layout_file}: {exc}") from exc
        inputs.append(layout_file)
    else:
        layout = _build_layout(kind, n, cuts, n1, dist1, dist2, dist3)
    seed = _resolve_seed(seed)
    records = run_campaign(layout, reps, seed, l_detect=l_detect, min_seg=min_seg)

    out_path = Path(out)
    rows = ["seed,L,D,d1,d2,runtime_ms"]
    for rec in records:
        rows.append(
            f"{rec.seed},{rec.cuts.count},{rec.distance!r},{rec.d1!r},{rec.d2!r},"
            f"{rec.runtime_ms!r}"
        )
    out_path.with_suffix(".csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    freq = selection_frequencies([rec.cuts for rec in records], layout.n)
    freq_rows = ["position,count"] + [f"{k + 1},{int(c)}" for k, c in enumerate(freq)]
    out_path.with_suffix(".freq.csv").write_text("\n".join(freq_rows) + "\n", encoding="utf-8")

    out_path.with_suffix(".layout.json").write_text(layout_to_json(layout), encoding="utf-8")
    _write_manifest(
        str(out_path.with_suffix(".csv")), "simulate",
        {"kind": layout.kind, "n": layout.n, "cuts": list(layout.cuts.cuts),
         "reps": reps, "l_detect": l_detect, "min_seg": min_seg},
        seed, inputs, (time.perf_counter() - t0) * 1e3,
    )
    click.echo(f"wrote {out_path.with_suffix('.csv')} ({reps} replications)")


@main.command("evaluate")
@click.option("--n", type=int, required=True, help="Matrix order both cut sets refer to.")
@click.option("--truth", default=None, help="True cuts, e.g. '10,20,30'.")
@click.option("--truth-file", type=click.Path(), default=None, help="One cut per line.")
@click.option("--est", default=None, help="Estimated cuts.")
@click.option("--est-file", type=click.Path(), default=None, help="One cut per line.")
@click.option("--out", type=click.Path(), default=None, help="Write JSON here (plus manifest).")
@_guard
def cmd_evaluate(n, truth, truth_file, est, est_file, out):
    """Score estimated cuts against reference cuts.

    The scaled l2 distance requires equal-length vectors and is null
    otherwise; the Hausdorff parts are always reported.
    """
    t0 = time.perf_counter()
    if (truth is None) == (truth_file is None):
        raise ParameterError("pass exactly one of --truth / --truth-file")
    if (est is None) == (est_file is None):
        raise ParameterError("pass exactly one of --est / --est-file")
    inputs = [p for p in (truth_file, est_file) if p is not None]
    truth_cuts = _parse_cuts(truth) if truth else _read_cut_file(truth_file)
    est_cuts = _parse_cuts(est) if est else _read_cut_file(est_file)
    truth_b = Boundaries(n, tuple(sorted(truth_cuts)))
    est_b = Boundaries(n, tuple(sorted(est_cuts)))
    d1, d2, d = hausdorff_components(est_b, truth_b)
    dist = distance_d(est_b, truth_b) if est_b.count == truth_b.count else None
    payload = {
        "schema": "blockseg.evaluate/1",
        "tool_version": __version__,
        "n": n,
        "truth": list(truth_b.cuts),
        "estimated": list(est_b.cuts),
        "distance_d": dist,
        "d1": d1,
        "d2": d2,
        "d": d,
    }
    _emit(payload, out)
    _write_manifest(
        out, "evaluate",
        {"n": n, "truth": list(truth_b.cuts), "estimated": list(est_b.cuts)},
        None, inputs, (time.perf_counter() - t0) * 1e3,
    )


@main.command("summarize")
@click.argument("input_path", metavar="INPUT", type=click.Path())
@_with_options(_matrix_input_options)
@click.option("--cuts", required=True, help="Cuts defining the block grid, e.g. '10,20'.")
@click.option("--expand", "expand_path", type=click.Path(), default=None,
              help="Also write the dense block-constant matrix here.")
@click.option("--out", type=click.Path(), default=None, help="Write JSON here (plus manifest).")
@_guard
def cmd_summarize(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry,
                  cuts, expand_path, out):
    """Average INPUT within the block grid defined by --cuts."""
    t0 = time.perf_counter()
    m = _load_matrix(input_path, fmt, triples_n, delimiter, symmetry_tol, repair_symmetry)
    summ = summarize(m, Boundaries(m.n, _parse_cuts(cuts)))
    if expand_path is not None:
        save_dense(summ.expand(), expand_path)
    payload = {
        "schema": "blockseg.summary/1",
        "tool_version": __version__,
        "n": summ.n,
        "cuts": list(summ.cuts.cuts),
        "block_means": summ.block_means.tolist(),
    }
    _emit(payload, out)
    _write_manifest(
        out, "summarize",
        {"input": str(input_path), "cuts": list(summ.cuts.cuts)},
        None, [input_path], (time.perf_counter() - t0) * 1e3,
    )


@main.command("bench")
@click.option("--sizes", default="100,200,300,400,500", show_default=True,
              help="Comma-separated matrix orders.")
@click.option("--lmax", type=int, default=75, show_default=True)
@click.option("--min-seg", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", type=click.Path(), default=None, help="Write CSV here (plus manifest).")
@_guard
def cmd_bench(sizes, lmax, min_seg, seed, out):
    """Time cost-table construction and the optimizer over a size sweep."""
    t0 = time.perf_counter()
    seed = _resolve_seed(seed)
    rows = ["n,l_max,rank_ms,table_ms,dp_ms,total_ms"]
    for idx, n in enumerate(_parse_cuts(sizes)):
        layout = BlockLayout(
            n=n, kind="null", cuts=Boundaries(n, ()), cells={(0, 0): DistSpec.uniform()}
        )
        m = gen_matrix(layout, seed + idx)
        level_cap = min(lmax, n // min_seg - 1)
        t_rank = time.perf_counter()
        ranks = compute_ranks(m)
        t_table = time.perf_counter()
        cost = build_cost_table(ranks)
        t_dp = time.perf_counter()
        dp_segment(cost, level_cap, min_seg=min_seg)
        t_end = time.perf_counter()
        line = (
            f"{n},{level_cap},{(t_table - t_rank) * 1e3:.1f},{(t_dp - t_table) * 1e3:.1f},"
            f"{(t_end - t_dp) * 1e3:.1f},{(t_end - t_rank) * 1e3:.1f}"
        )
        rows.append(line)
        click.echo(line)
    if out is not None:
        Path(out).write_text("\n".join(rows) + "\n", encoding="utf-8")
        _write_manifest(out, "bench", {"sizes": sizes, "lmax": lmax, "min_seg": min_seg},
                        seed, [], (time.perf_counter() - t0) * 1e3)


if __name__ == "__main__":
    main()

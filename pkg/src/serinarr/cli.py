"""Command line front end and pipeline orchestration.

Subcommands:

* ``narrate``: full pipeline, emits any of text, json, svg, heatmap,
  pool (comma list via --emit).
* ``fit``: ingest and fitting only, dumps the descriptor pool.
* ``sweep``: run the pipeline over several zone level counts and print
  a comparison table.
* ``render``: rebuild the SVG artifacts from a previous run's saved
  pool and selection files.

Config values resolve as command line > config file > defaults.  The
config file is a flat ``key = value`` document; lists use commas.
``SERINARR_THREADS`` caps fitting parallelism.

Exit codes: 0 success, 3 ingest failure, 4 fitting failure, 5 solver
failure, 6 output failure (2 is argparse usage).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from . import __version__
from .cover import VerbosityLevel, level_error_matrix, solve_cover
from .details import (
    DEFAULT_MAX_THR,
    DEFAULT_MIN_THR,
    DEFAULT_PENALTY_EPS,
    SelectionConfig,
    SelectionResult,
    pick_summary,
    solve_details,
)
from .errors import (
    FitError,
    IngestError,
    OutputError,
    SerinarrError,
    SolveError,
)
from .fitting import DEFAULT_KINDS, DescriptorPool, build_pool, dump_pool, load_pool
from .ingest import FORMATS, TimeSeries, load, normalize
from .narration import build_narration, narration_structure
from .prototypes import CurveKind
from .render import CurveOverlay, PlotSpec, render_enriched, render_heatmap
from .textgen import realize

EXIT_INGEST = 3
EXIT_FIT = 4
EXIT_SOLVE = 5
EXIT_OUTPUT = 6

EMIT_CHOICES = ("text", "json", "svg", "heatmap", "pool")


@dataclass(frozen=True)
class RunConfig:
    input: str
    format: str = "csv"
    levels: int = 4
    verbosity: int = 5
    max_thr: float = DEFAULT_MAX_THR
    min_thr: float = DEFAULT_MIN_THR
    penalty_eps: float = DEFAULT_PENALTY_EPS
    kinds: tuple[CurveKind, ...] = DEFAULT_KINDS
    out_dir: str = "."
    emit: tuple[str, ...] = ("text",)
    threads: int = 1

    def __post_init__(self):
        if self.format not in FORMATS:
            raise IngestError(f"unknown format {self.format!r}")
        if not 1 <= self.levels <= 6:
            raise IngestError(f"levels must lie in [1, 6], got {self.levels}")
        if not 1 <= self.verbosity <= 8:
            raise IngestError(f"verbosity must lie in [1, 8], got {self.verbosity}")
        for e in self.emit:
            if e not in EMIT_CHOICES:
                raise OutputError(f"unknown emit target {e!r}")


@dataclass
class RunReport:
    pool_size: int = 0
    n_infeasible: int = 0
    level_costs: list[tuple[int, float, bool]] = field(default_factory=list)
    summary_level: int = 0
    threshold_met: bool = True
    details: list[tuple[int, int]] = field(default_factory=list)
    objective: float = 0.0
    global_rmse: float = 0.0
    narration: str = ""
    timings: dict[str, float] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [
            f"pool: {self.pool_size} descriptors ({self.n_infeasible} infeasible ranges skipped)",
            "cover: "
            + ", ".join(
                f"v={v} cost={cost:.4f}" if ok else f"v={v} infeasible"
                for v, cost, ok in self.level_costs
            ),
            f"summary: level {self.summary_level}"
            + ("" if self.threshold_met else " (threshold unmet)"),
            f"details: {len(self.details)} selected "
            + str([i for i, _ in self.details]),
            f"objective: {self.objective:.6f}",
            f"global_rmse: {self.global_rmse:.6f}",
            "timings: "
            + ", ".join(f"{k}={v * 1e3:.1f}ms" for k, v in self.timings.items()),
        ]
        if self.outputs:
            out.append("wrote: " + ", ".join(self.outputs))
        return out


def write_atomic(path: Path, text: str) -> None:
    """Write via a sibling temp file and rename, so readers never see
    a half-written artifact."""
    tmp = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if tmp is not None:
            try:
                os.unlink(tmp)
            except OSError:
                pass
        raise OutputError(f"cannot write {path}: {exc}") from None


def _sibling(base: Path, ext: str) -> Path:
    """out/<stem>.<ext>; plain concatenation so dotted stems survive."""
    return base.parent / f"{base.name}.{ext}"


def _threads_from_env() -> int:
    raw = os.environ.get("SERINARR_THREADS", "")
    try:
        return max(1, int(raw)) if raw else 1
    except ValueError:
        return 1


# ----------------------------------------------------------------------
# config file and argument plumbing
# ----------------------------------------------------------------------


def load_config_file(path: str | Path) -> dict:
    """Flat key/value config: one ``key = value`` per line, # comments."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IngestError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise IngestError(f"config line {lineno}: expected key = value")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


_CONFIG_KEYS = {
    "input": str,
    "format": str,
    "levels": int,
    "verbosity": int,
    "max_thr": float,
    "min_thr": float,
    "penalty_eps": float,
    "kinds": "kinds",
    "out_dir": str,
    "emit": "list",
}


def _parse_kinds(raw: str) -> tuple[CurveKind, ...]:
    kinds = tuple(CurveKind.from_label(k) for k in raw.split(",") if k.strip())
    if not kinds:
        raise IngestError("at least one curve kind is required")
    return kinds


def merge_config(cli_args: dict, file_values: dict) -> RunConfig:
    """Command line beats the config file beats the defaults."""
    merged: dict = {}
    for key, conv in _CONFIG_KEYS.items():
        if key in file_values:
            raw = file_values[key]
            try:
                if conv == "kinds":
                    merged[key] = _parse_kinds(raw)
                elif conv == "list":
                    merged[key] = tuple(v.strip() for v in raw.split(",") if v.strip())
                else:
                    merged[key] = conv(raw)
            except ValueError as exc:
                raise IngestError(f"config key {key}: {exc}") from None
    for key, val in cli_args.items():
        if val is not None:
            merged[key] = val
    if "input" not in merged:
        raise IngestError("an input file is required (--input or config)")
    merged.setdefault("threads", _threads_from_env())
    return RunConfig(**merged)


# ----------------------------------------------------------------------
# pipeline
# ----------------------------------------------------------------------


def _solve(
    pool: DescriptorPool, cfg: RunConfig
) -> tuple[list[VerbosityLevel], SelectionResult]:
    levels = solve_cover(pool, cfg.verbosity)
    s, met = pick_summary(levels, cfg.max_thr)
    sel_cfg = SelectionConfig(
        max_thr=cfg.max_thr,
        min_thr=cfg.min_thr,
        v=cfg.verbosity,
        penalty_eps=cfg.penalty_eps,
    )
    try:
        selection = solve_details(pool, levels, s, sel_cfg, threshold_met=met)
    except ValueError as exc:
        raise SolveError(str(exc)) from None
    return levels, selection


def _emit_outputs(
    cfg: RunConfig,
    series: TimeSeries,
    pool: DescriptorPool,
    levels: list[VerbosityLevel],
    selection: SelectionResult,
    units,
    text,
    report: RunReport,
) -> None:
    base = Path(cfg.out_dir) / Path(cfg.input).stem
    wrote = []

    if "text" in cfg.emit:
        p = _sibling(base, "txt")
        write_atomic(p, text.full_text + "\n")
        wrote.append(str(p))
    if "json" in cfg.emit:
        p = _sibling(base, "selection.json")
        write_atomic(p, json.dumps(selection.as_dict(), indent=2, sort_keys=True) + "\n")
        wrote.append(str(p))
        p = _sibling(base, "narration.json")
        write_atomic(
            p, json.dumps(narration_structure(units), indent=2, sort_keys=True) + "\n"
        )
        wrote.append(str(p))
    if "pool" in cfg.emit:
        p = _sibling(base, "pool.jsonl")
        try:
            dump_pool(pool, p)
        except OSError as exc:
            raise OutputError(f"cannot write {p}: {exc}") from None
        wrote.append(str(p))
    if "svg" in cfg.emit:
        for name, svg in _charts(series, pool, selection, cfg.max_thr):
            p = _sibling(base, f"{name}.svg")
            write_atomic(p, svg)
            wrote.append(str(p))
    if "heatmap" in cfg.emit:
        p = _sibling(base, "heatmap.svg")
        write_atomic(p, _heatmap(pool, levels, selection))
        wrote.append(str(p))
    report.outputs.extend(wrote)


def _selected_errs(pool, selection):
    """Best selected per-zone error (summary and details)."""
    ids = list(selection.summary) + [i for i, _ in selection.details]
    descriptors = [pool.get(i) for i in ids]
    errs = []
    for z in range(pool.n_zones):
        errs.append(min(d.err(z) for d in descriptors if d.covers(z)))
    return errs


def _charts(series, pool, selection, max_thr):
    summary_err = []
    for z in range(series.n_zones):
        d = next(pool.get(i) for i in selection.summary if pool.get(i).covers(z))
        summary_err.append(d.err(z))
    summary_curves = tuple(
        CurveOverlay(pool.get(i), color="#d22", stroke_width=2.0)
        for i in selection.summary
    )
    yield "summary", render_enriched(
        PlotSpec(
            series=series,
            curves=summary_curves,
            error_bar=tuple(summary_err),
            max_thr=max_thr,
            title="summary",
        )
    )
    detail_curves = tuple(
        CurveOverlay(pool.get(i), color="#d22", stroke_width=2.0)
        for i, _ in selection.details
    )
    yield "details", render_enriched(
        PlotSpec(
            series=series,
            curves=detail_curves,
            error_bar=tuple(_selected_errs(pool, selection)),
            max_thr=max_thr,
            title="details",
        )
    )


def _heatmap(pool, levels, selection):
    labels, matrix = level_error_matrix(levels, pool)
    row_of = {v: r for r, v in enumerate(labels)}
    selected = set()
    for id_ in selection.summary:
        d = pool.get(id_)
        for z in d.zones:
            selected.add((row_of[selection.s], z))
    for id_, lv in selection.details:
        if lv in row_of:
            d = pool.get(id_)
            for z in d.zones:
                selected.add((row_of[lv], z))
    return render_heatmap(matrix, selected, row_labels=labels)


def run(cfg: RunConfig) -> RunReport:
    """Full pipeline for one series; returns the run report."""
    report = RunReport()
    t0 = time.perf_counter()
    series = normalize(load(cfg.input, cfg.format), cfg.levels)
    report.timings["ingest"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    pool = build_pool(series, cfg.kinds, max_workers=cfg.threads)
    report.timings["fit"] = time.perf_counter() - t0
    report.pool_size = len(pool)
    report.n_infeasible = pool.n_infeasible

    t0 = time.perf_counter()
    levels, selection = _solve(pool, cfg)
    report.timings["solve"] = time.perf_counter() - t0
    report.level_costs = [(lv.v, lv.cost, lv.feasible) for lv in levels]
    report.summary_level = selection.s
    report.threshold_met = selection.threshold_met
    report.details = list(selection.details)
    report.objective = selection.objective
    report.global_rmse = selection.global_rmse

    t0 = time.perf_counter()
    units = build_narration(selection, pool, series)
    text = realize(units, threshold_met=selection.threshold_met)
    report.timings["narrate"] = time.perf_counter() - t0
    report.narration = text.full_text

    t0 = time.perf_counter()
    _emit_outputs(cfg, series, pool, levels, selection, units, text, report)
    report.timings["emit"] = time.perf_counter() - t0
    return report


def sweep(cfg: RunConfig, levels_list: list[int]) -> list[dict]:
    """Run the pipeline once per zone level count.

    A failing row is reported and skipped; the other rows still run.
    """
    rows = []
    for lv in levels_list:
        row: dict = {"levels": lv}
        try:
            t0 = time.perf_counter()
            report = run(replace(cfg, levels=lv, emit=()))
            row.update(
                pool=report.pool_size,
                summary_level=report.summary_level,
                n_details=len(report.details),
                global_rmse=report.global_rmse,
                wall_s=time.perf_counter() - t0,
            )
        except SerinarrError as exc:
            row["error"] = str(exc)
        rows.append(row)
    return rows


def _format_sweep(rows: list[dict]) -> str:
    header = f"{'levels':>6} {'zones':>5} {'pool':>6} {'s':>3} {'details':>7} {'global_rmse':>12} {'wall_s':>8}"
    lines = [header]
    for row in rows:
        if "error" in row:
            lines.append(f"{row['levels']:>6} failed: {row['error']}")
        else:
            lines.append(
                f"{row['levels']:>6} {2 ** row['levels']:>5} {row['pool']:>6} "
                f"{row['summary_level']:>3} {row['n_details']:>7} "
                f"{row['global_rmse']:>12.6f} {row['wall_s']:>8.2f}"
            )
    return "\n".join(lines)


# ----------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="path to the input series")
    p.add_argument("--format", choices=FORMATS, default=None,
                   help="input format (default csv)")
    p.add_argument("--levels", type=int, default=None,
                   help="zone levels, 2**levels zones (default 4)")
    p.add_argument("--verbosity", type=int, default=None,
                   help="verbosity bound V (default 5)")
    p.add_argument("--max-thr", type=float, default=None, dest="max_thr",
                   help="summary per-zone error threshold (default 0.15)")
    p.add_argument("--min-thr", type=float, default=None, dest="min_thr",
                   help="cross-level improvement threshold (default 0.02)")
    p.add_argument("--kinds", type=_parse_kinds, default=None,
                   help="comma list of curve kinds (default line,bilinear,tooth)")
    p.add_argument("--out-dir", default=None, dest="out_dir",
                   help="directory for emitted files (default .)")
    p.add_argument("--emit", default=None,
                   help="comma list of outputs: text,json,svg,heatmap,pool")
    p.add_argument("--config", default=None, help="flat key=value config file")


def _collect(args: argparse.Namespace, force_emit: tuple[str, ...] | None = None):
    cli_values = {
        "input": args.input,
        "format": args.format,
        "levels": args.levels,
        "verbosity": args.verbosity,
        "max_thr": args.max_thr,
        "min_thr": args.min_thr,
        "kinds": args.kinds,
        "out_dir": args.out_dir,
        "emit": tuple(e.strip() for e in args.emit.split(",") if e.strip())
        if args.emit
        else None,
    }
    file_values = load_config_file(args.config) if args.config else {}
    cfg = merge_config(cli_values, file_values)
    if force_emit is not None:
        cfg = replace(cfg, emit=force_emit)
    return cfg


def _cmd_narrate(args) -> int:
    cfg = _collect(args)
    report = run(cfg)
    print(report.narration)
    for line in report.lines():
        print(line)
    return 0


def _cmd_fit(args) -> int:
    cfg = _collect(args, force_emit=("pool",))
    series = normalize(load(cfg.input, cfg.format), cfg.levels)
    pool = build_pool(series, cfg.kinds, max_workers=cfg.threads)
    base = Path(cfg.out_dir) / Path(cfg.input).stem
    out = _sibling(base, "pool.jsonl")
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        dump_pool(pool, out)
    except OSError as exc:
        raise OutputError(f"cannot write {out}: {exc}") from None
    print(
        f"pool: {len(pool)} descriptors ({pool.n_infeasible} infeasible), "
        f"wrote {out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _collect(args, force_emit=())
    levels_list = [int(v) for v in args.levels_list.split(",") if v.strip()]
    rows = sweep(cfg, levels_list)
    print(_format_sweep(rows))
    if args.emit and "json" in args.emit:
        out = Path(cfg.out_dir) / (Path(cfg.input).stem + ".sweep.json")
        write_atomic(out, json.dumps(rows, indent=2, sort_keys=True) + "\n")
        print(f"wrote: {out}")
    return 0


def _cmd_render(args) -> int:
    cfg = _collect(args)
    base = Path(cfg.out_dir) / Path(cfg.input).stem
    pool_path = _sibling(base, "pool.jsonl")
    sel_path = _sibling(base, "selection.json")
    if not pool_path.exists() or not sel_path.exists():
        raise OutputError(
            f"render needs {pool_path.name} and {sel_path.name} in {cfg.out_dir}; "
            f"run narrate with --emit json,pool first"
        )
    series = normalize(load(cfg.input, cfg.format), cfg.levels)
    pool = load_pool(pool_path)
    try:
        doc = json.loads(sel_path.read_text())
        selection = SelectionResult(
            s=doc["summary_level"],
            summary=tuple(doc["summary_ids"]),
            details=tuple((d["id"], d["level"]) for d in doc["details"]),
            objective=doc["objective"],
            per_zone_gain={int(k): v for k, v in doc["per_zone_gain"].items()},
            global_rmse=doc["global_rmse"],
            threshold_met=doc["threshold_met"],
        )
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise OutputError(f"cannot load {sel_path}: {exc}") from None
    levels = solve_cover(pool, cfg.verbosity)
    wrote = []
    for name, svg in _charts(series, pool, selection, cfg.max_thr):
        p = _sibling(base, f"{name}.svg")
        write_atomic(p, svg)
        wrote.append(str(p))
    p = _sibling(base, "heatmap.svg")
    write_atomic(p, _heatmap(pool, levels, selection))
    wrote.append(str(p))
    print("wrote: " + ", ".join(wrote))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="serinarr",
        description="Narrate a scalar time series as structured English text.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("narrate", help="run the full pipeline")
    _add_common(p)
    p.set_defaults(func=_cmd_narrate)

    p = sub.add_parser("fit", help="fit the descriptor pool only")
    _add_common(p)
    p.set_defaults(func=_cmd_fit)

    p = sub.add_parser("sweep", help="compare several zone level counts")
    _add_common(p)
    p.add_argument("--levels-list", default="3,4,5", dest="levels_list",
                   help="comma list of level counts (default 3,4,5)")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("render", help="re-render charts from saved artifacts")
    _add_common(p)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except IngestError as exc:
        print(f"ingest error: {exc}", file=sys.stderr)
        return EXIT_INGEST
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except SolveError as exc:
        print(f"solve error: {exc}", file=sys.stderr)
        return EXIT_SOLVE
    except OutputError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_OUTPUT


if __name__ == "__main__":
    sys.exit(main())

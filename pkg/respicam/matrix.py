"""Run every configuration over every subject and write the report CSVs.

Outputs under ``out``:

- ``<condition>.csv`` for each condition present in the manifest, one row
  per configuration in report order;
- ``subjects.csv``, one row per subject x configuration;
- ``report.txt``, the same tables laid out for reading.

Subjects are evaluated on a thread pool; results are sorted by subject id
and configuration before any metric is computed, so output does not depend
on manifest order or scheduling.
"""

from __future__ import annotations

import csv
import logging
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from .config import DEFAULT_SETTINGS, Settings
from .errors import RespicamError, WriteError
from .frame_io import load_sequence
from .manifest import Condition, SubjectRecord, load_manifest
from .metrics import MetricsRow, format_report_table, metrics_row, summarize_factors
from .imgproc import FilterKind
from .pipeline import ALL_CONFIGS, PipelineConfig, PipelineTrace, analyze_configs
from .roi import SizeClass

logger = logging.getLogger(__name__)

METRICS_HEADER = [
    "method",
    "detector",
    "filter",
    "bbox",
    "mae",
    "rmse",
    "sd",
    "n_subjects",
    "n_failed",
]
SUBJECTS_HEADER = ["subject_id", "condition", "method", "estimate_bpm", "gt_bpm", "error_bpm"]
SUBJECTS_FILE = "subjects.csv"
REPORT_FILE = "report.txt"

_CONFIG_INDEX = {cfg: i for i, cfg in enumerate(ALL_CONFIGS)}


@dataclass(frozen=True)
class SubjectResult:
    subject_id: str
    condition: Condition
    config: PipelineConfig
    gt_bpm: float
    estimate_bpm: float | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.estimate_bpm is not None

    @property
    def error_bpm(self) -> float | None:
        return None if self.estimate_bpm is None else self.estimate_bpm - self.gt_bpm


@dataclass(frozen=True)
class ReportTable:
    tables: dict[Condition, tuple[MetricsRow, ...]] = field(default_factory=dict)
    results: tuple[SubjectResult, ...] = ()

    @property
    def all_failed(self) -> bool:
        return bool(self.results) and not any(r.ok for r in self.results)


def _describe(exc: BaseException) -> str:
    return f"{type(exc).__name__}: {exc}"


def run_subject(
    rec: SubjectRecord,
    configs: Sequence[PipelineConfig] = ALL_CONFIGS,
    settings: Settings | None = None,
) -> list[SubjectResult]:
    """All configurations for one subject; failures are recorded, never raised.

    Frames load once. Configurations that share a filter and ROI size run in
    one tracking pass.
    """
    s = settings or DEFAULT_SETTINGS

    def result(
        cfg: PipelineConfig, bpm: float | None = None, err: str | None = None
    ) -> SubjectResult:
        return SubjectResult(rec.id, rec.condition, cfg, rec.gt_rr_bpm, bpm, err)

    try:
        seq = load_sequence(rec.frames_dir, rec.fps)
    except RespicamError as e:
        logger.warning("%s: cannot load frames: %s", rec.id, _describe(e))
        return [result(cfg, err=_describe(e)) for cfg in configs]

    groups: dict[tuple[FilterKind, SizeClass], list[PipelineConfig]] = {}
    for cfg in configs:
        groups.setdefault((cfg.filter, cfg.bbox), []).append(cfg)
    outcomes: dict[PipelineConfig, PipelineTrace | RespicamError] = {}
    for group in groups.values():
        try:
            outcomes.update(analyze_configs(seq, rec.face_box, group, s))
        except RespicamError as e:
            outcomes.update({cfg: e for cfg in group})
    out: list[SubjectResult] = []
    for cfg in configs:
        outcome = outcomes[cfg]
        if isinstance(outcome, RespicamError):
            logger.warning("%s %s failed: %s", rec.id, cfg.label, _describe(outcome))
            out.append(result(cfg, err=_describe(outcome)))
        else:
            out.append(result(cfg, bpm=outcome.bpm))
    logger.info("%s: %d/%d configurations ok", rec.id, sum(r.ok for r in out), len(out))
    return out


def evaluate(
    records: Sequence[SubjectRecord],
    settings: Settings | None = None,
    jobs: int = 1,
    configs: Sequence[PipelineConfig] = ALL_CONFIGS,
) -> ReportTable:
    """Score records without touching the filesystem beyond reading frames."""
    if jobs > 1 and len(records) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as executor:
            nested = list(executor.map(lambda r: run_subject(r, configs, settings), records))
    else:
        nested = [run_subject(r, configs, settings) for r in records]
    results = sorted(
        (r for batch in nested for r in batch),
        key=lambda r: (r.subject_id, _CONFIG_INDEX.get(r.config, len(_CONFIG_INDEX))),
    )

    tables: dict[Condition, tuple[MetricsRow, ...]] = {}
    for cond in Condition:
        in_cond = [r for r in results if r.condition is cond]
        if not in_cond:
            continue
        rows = []
        for cfg in configs:
            cell = [r for r in in_cond if r.config == cfg]
            pairs = [(est, r.gt_bpm) for r in cell if (est := r.estimate_bpm) is not None]
            rows.append(metrics_row(cfg, pairs, n_failed=len(cell) - len(pairs)))
        tables[cond] = tuple(rows)
    return ReportTable(tables=tables, results=tuple(results))


def _num(value: float | None) -> str:
    return "" if value is None else f"{value:.6f}"


def _write_csv(path: Path, header: list[str], rows: list[list[str]]) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as e:
        raise WriteError(f"cannot write {path}: {e}") from e


def write_subjects_csv(results: Sequence[SubjectResult], path: str | Path) -> Path:
    """Long-form CSV, one row per subject x configuration; failures leave blanks."""
    p = Path(path)
    _write_csv(
        p,
        SUBJECTS_HEADER,
        [
            [
                r.subject_id,
                r.condition.value,
                r.config.label,
                _num(r.estimate_bpm),
                _num(r.gt_bpm),
                _num(r.error_bpm),
            ]
            for r in results
        ],
    )
    return p


def write_report(report: ReportTable, out: str | Path) -> list[Path]:
    root = Path(out)
    try:
        root.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise WriteError(f"cannot create {root}: {e}") from e
    written: list[Path] = []
    for cond, rows in report.tables.items():
        path = root / f"{cond.value}.csv"
        _write_csv(
            path,
            METRICS_HEADER,
            [
                [
                    r.method,
                    r.config.detector.value,
                    r.config.filter.value,
                    r.config.bbox.value,
                    _num(r.mae),
                    _num(r.rmse),
                    _num(r.sd),
                    str(r.n_subjects),
                    str(r.n_failed),
                ]
                for r in rows
            ],
        )
        written.append(path)

    written.append(write_subjects_csv(report.results, root / SUBJECTS_FILE))

    path = root / REPORT_FILE
    try:
        path.write_text(render_report(report) + "\n", encoding="utf-8")
    except OSError as e:
        raise WriteError(f"cannot write {path}: {e}") from e
    written.append(path)
    return written


def render_report(report: ReportTable) -> str:
    blocks: list[str] = []
    for cond, rows in report.tables.items():
        blocks.append(format_report_table(rows, title=f"[{cond.value}]"))
        for factor, means in summarize_factors(rows).items():
            parts = ", ".join(f"{name} {mae:.2f}" for name, mae in sorted(means.items()))
            blocks.append(f"mean MAE by {factor}: {parts}")
        blocks.append("")
    return "\n".join(blocks).rstrip()


def run_matrix(
    manifest: str | Path,
    out: str | Path,
    settings: Settings | None = None,
    jobs: int = 1,
) -> ReportTable:
    records = load_manifest(manifest)
    logger.info("running %d configurations over %d subjects", len(ALL_CONFIGS), len(records))
    report = evaluate(records, settings=settings, jobs=jobs)
    write_report(report, out)
    return report


__all__ = [
    "METRICS_HEADER",
    "SUBJECTS_HEADER",
    "SubjectResult",
    "ReportTable",
    "run_subject",
    "evaluate",
    "write_subjects_csv",
    "write_report",
    "render_report",
    "run_matrix",
]

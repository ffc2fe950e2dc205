"""Error metrics per configuration and the METHOD/MAE/RMSE/SD report layout."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import NoDataError
from .pipeline import PipelineConfig


@dataclass(frozen=True)
class MetricsRow:
    """One configuration's scores; metrics are None when every subject failed."""

    config: PipelineConfig
    mae: float | None
    rmse: float | None
    sd: float | None
    n_subjects: int
    n_failed: int = 0

    @property
    def method(self) -> str:
        return self.config.label


def compute_metrics(pairs: Sequence[tuple[float, float]]) -> tuple[float, float, float]:
    """(mae, rmse, sd) of estimate - gt; sd is the population std of signed errors."""
    if not pairs:
        raise NoDataError("no (estimate, gt) pairs")
    arr = np.asarray(pairs, dtype=np.float64).reshape(-1, 2)
    err = arr[:, 0] - arr[:, 1]
    mae = float(np.mean(np.abs(err)))
    rmse = float(math.sqrt(np.mean(err * err)))
    sd = float(np.std(err))
    return mae, rmse, sd


def metrics_row(
    cfg: PipelineConfig, pairs: Sequence[tuple[float, float]], n_failed: int = 0
) -> MetricsRow:
    if not pairs:
        return MetricsRow(cfg, None, None, None, n_subjects=0, n_failed=n_failed)
    mae, rmse, sd = compute_metrics(pairs)
    return MetricsRow(cfg, mae, rmse, sd, n_subjects=len(pairs), n_failed=n_failed)


def best_row(rows: Sequence[MetricsRow], metric: str = "mae") -> MetricsRow | None:
    """Lowest ``metric`` among scored rows; earlier rows win ties."""
    if metric not in ("mae", "rmse", "sd"):
        raise ValueError(f"unknown metric {metric!r}")
    best: MetricsRow | None = None
    for row in rows:
        value = getattr(row, metric)
        if value is None:
            continue
        if best is None or value < getattr(best, metric):
            best = row
    return best


def summarize_factors(rows: Sequence[MetricsRow]) -> dict[str, dict[str, float]]:
    """Mean MAE per ROI size, per filter and per detector, over scored rows."""
    groups: dict[str, dict[str, list[float]]] = {"bbox": {}, "filter": {}, "detector": {}}
    for row in rows:
        if row.mae is None:
            continue
        cfg = row.config
        groups["bbox"].setdefault(cfg.bbox.label, []).append(row.mae)
        groups["filter"].setdefault(cfg.filter.label, []).append(row.mae)
        groups["detector"].setdefault(cfg.detector.label, []).append(row.mae)
    return {
        factor: {name: float(np.mean(vals)) for name, vals in by_name.items()}
        for factor, by_name in groups.items()
    }


def _fmt(value: float | None) -> str:
    return "-" if value is None else f"{value:.2f}"


def format_report_table(rows: Sequence[MetricsRow], title: str = "") -> str:
    width = max([len("METHOD")] + [len(r.method) for r in rows])
    lines: list[str] = []
    if title:
        lines.append(title)
    lines.append(f"{'METHOD':<{width}}  {'MAE':>6}  {'RMSE':>6}  {'SD':>6}")
    for r in rows:
        line = f"{r.method:<{width}}  {_fmt(r.mae):>6}  {_fmt(r.rmse):>6}  {_fmt(r.sd):>6}"
        if r.n_failed:
            line += f"  ({r.n_failed} failed)"
        lines.append(line)
    best = best_row(rows)
    if best is not None:
        lines.append(f"best MAE: {best.method} ({_fmt(best.mae)})")
    return "\n".join(lines)


__all__ = [
    "MetricsRow",
    "compute_metrics",
    "metrics_row",
    "best_row",
    "summarize_factors",
    "format_report_table",
]

"""Daily view-growth curves used to validate the fixed retrieval window.

A growth series holds cumulative view totals per day since release; the rate
for day ``d`` is the percentage increase from day ``d`` to day ``d+1``.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DegenerateInputError, ToolkitError


@dataclass(frozen=True)
class GrowthSeries:
    """Cumulative daily view totals for one video (day 1..D, D >= 2)."""

    video_id: str
    daily_views: tuple[int, ...]

    def __post_init__(self):
        if len(self.daily_views) < 2:
            raise ValueError(f"{self.video_id}: need at least 2 days")
        prev = None
        for i, v in enumerate(self.daily_views):
            if v < 0:
                raise ValueError(f"{self.video_id}: negative view count at day {i + 1}")
            if prev is not None and v < prev:
                raise ValueError(
                    f"{self.video_id}: cumulative views shrink at day {i + 1}"
                )
            prev = v


def load_growth_series(path: str | Path) -> list[GrowthSeries]:
    """Load line-delimited ``{video_id, daily_views}`` records."""
    series = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
                series.append(
                    GrowthSeries(str(obj["video_id"]), tuple(int(v) for v in obj["daily_views"]))
                )
            except (ValueError, KeyError, json.JSONDecodeError) as exc:
                raise ToolkitError(f"growth line {line_no}: {exc}") from exc
    return series


def daily_growth_rates(series: GrowthSeries) -> list[float]:
    """Per-day growth percentages: 100 * (views[t+1] - views[t]) / views[t]."""
    rates = []
    views = series.daily_views
    for t in range(len(views) - 1):
        if views[t] == 0:
            raise DegenerateInputError(
                f"{series.video_id}: zero cumulative views at day {t + 1}"
            )
        rates.append(100.0 * (views[t + 1] - views[t]) / views[t])
    return rates


@dataclass(frozen=True)
class WindowSummary:
    start_day: int
    end_day: int
    n_rates: int
    mean_rate: float | None
    median_rate: float | None


def stability_summary(
    curves: Iterable[GrowthSeries], windows: Sequence[tuple[int, int]]
) -> list[WindowSummary]:
    """Mean/median growth rate per day window, pooled over all videos.

    Rate day ``d`` is the increase from day ``d`` to ``d+1``; a window
    ``(a, b)`` pools every video's rates for days ``a..b`` inclusive. Videos
    shorter than a window contribute only their available days. Videos whose
    first tracked day has zero views are skipped with a warning.
    """
    curves = sorted(curves, key=lambda s: s.video_id)
    if not curves:
        raise ToolkitError("no growth curves supplied")
    rates_by_video: dict[str, list[float]] = {}
    for s in curves:
        try:
            rates_by_video[s.video_id] = daily_growth_rates(s)
        except DegenerateInputError as exc:
            warnings.warn(f"skipping growth series: {exc}")
    max_day = max((len(s.daily_views) for s in curves), default=0)
    summaries = []
    for start, end in windows:
        if not (1 <= start <= end <= max_day):
            raise ValueError(f"window ({start}, {end}) outside 1..{max_day}")
        pooled: list[float] = []
        for vid in sorted(rates_by_video):
            rates = rates_by_video[vid]
            pooled.extend(rates[start - 1 : end])
        if not pooled:
            summaries.append(WindowSummary(start, end, 0, None, None))
            continue
        mean = math.fsum(pooled) / len(pooled)
        ordered = sorted(pooled)
        mid = len(ordered) // 2
        median = ordered[mid] if len(ordered) % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0
        summaries.append(WindowSummary(start, end, len(pooled), mean, median))
    return summaries

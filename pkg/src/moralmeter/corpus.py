"""Video-metadata corpus loading, validation, and descriptive engagement statistics.

Datasets are UTF-8 line-delimited JSON, one video record per line, with the
field names of :class:`VideoRecord`. Channel registries use the same format
with :class:`ChannelInfo` fields. Records that fail validation are collected
into a rejection report instead of aborting the load.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DegenerateInputError, InsufficientDataError, ToolkitError

COUNTRIES = ("KO", "US")
POLITICAL_LEANINGS = ("left", "center", "right", "unspecified")
ENGAGEMENT_METRICS = ("views", "likes", "comments")


@dataclass(frozen=True)
class VideoRecord:
    """One news video with identity, channel, and engagement counts.

    ``likes`` and ``comments`` are ``None`` when the channel disabled them;
    absent values are excluded from statistics rather than imputed as zero.
    """

    video_id: str
    channel_id: str
    country: str
    title: str
    thumbnail_ref: str
    duration_seconds: int
    upload_date: date
    retrieved_at: date
    views: int
    likes: int | None = None
    comments: int | None = None

    def metric(self, name: str) -> int | None:
        if name not in ENGAGEMENT_METRICS:
            raise ValueError(f"unknown metric {name!r}")
        return getattr(self, name)


@dataclass(frozen=True)
class ChannelInfo:
    channel_id: str
    name: str
    country: str
    political_leaning: str
    creation_date: date
    subscribers: int
    total_videos: int
    total_views: int


@dataclass(frozen=True)
class Rejection:
    """One rejected input line: position, best-effort id, and the reason."""

    line_no: int
    video_id: str | None
    reason: str


@dataclass(frozen=True)
class LoadResult:
    records: list[VideoRecord]
    rejections: list[Rejection]


@dataclass(frozen=True)
class DescriptiveStats:
    """Moment summary of one engagement metric.

    ``skewness``/``kurtosis`` are the sample-adjusted estimators (excess
    kurtosis); both are ``None`` when undefined (constant series, or fewer
    observations than the adjustment requires).
    """

    n: int
    mean: float
    median: float
    sd: float
    min: float
    max: float
    skewness: float | None
    kurtosis: float | None


def _parse_date(value, field: str) -> date:
    if not isinstance(value, str):
        raise ValueError(f"{field} must be an ISO-8601 date string")
    try:
        return date.fromisoformat(value)
    except ValueError as exc:
        raise ValueError(f"{field} is not a valid ISO-8601 date: {value!r}") from exc


def _parse_count(value, field: str, optional: bool = False) -> int | None:
    if value is None:
        if optional:
            return None
        raise ValueError(f"{field} is required")
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValueError(f"{field} must be an integer")
    if value < 0:
        raise ValueError(f"{field} must be non-negative")
    return value


def parse_channel(obj: dict) -> ChannelInfo:
    country = obj.get("country")
    if country not in COUNTRIES:
        raise ValueError(f"country must be one of {COUNTRIES}")
    leaning = obj.get("political_leaning", "unspecified")
    if leaning not in POLITICAL_LEANINGS:
        raise ValueError(f"political_leaning must be one of {POLITICAL_LEANINGS}")
    return ChannelInfo(
        channel_id=str(obj["channel_id"]),
        name=str(obj.get("name", "")),
        country=country,
        political_leaning=leaning,
        creation_date=_parse_date(obj["creation_date"], "creation_date"),
        subscribers=_parse_count(obj.get("subscribers", 0), "subscribers"),
        total_videos=_parse_count(obj.get("total_videos", 0), "total_videos"),
        total_views=_parse_count(obj.get("total_views", 0), "total_views"),
    )


def load_registry(path: str | Path) -> dict[str, ChannelInfo]:
    """Load a channel registry file keyed by channel_id."""
    registry: dict[str, ChannelInfo] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                info = parse_channel(json.loads(line))
            except (ValueError, KeyError, json.JSONDecodeError) as exc:
                raise ToolkitError(f"registry line {line_no}: {exc}") from exc
            if info.channel_id in registry:
                raise ToolkitError(f"registry line {line_no}: duplicate channel_id {info.channel_id!r}")
            registry[info.channel_id] = info
    if not registry:
        raise ToolkitError(f"registry {path} is empty")
    return registry


def _validate_record(obj: dict, registry: dict[str, ChannelInfo]) -> VideoRecord:
    video_id = obj.get("video_id")
    if not isinstance(video_id, str) or not video_id:
        raise ValueError("video_id must be a non-empty string")
    channel_id = obj.get("channel_id")
    if not isinstance(channel_id, str) or not channel_id:
        raise ValueError("channel_id must be a non-empty string")
    if channel_id not in registry:
        raise ValueError("unknown channel")
    country = obj.get("country")
    if country not in COUNTRIES:
        raise ValueError(f"country must be one of {COUNTRIES}")
    if country != registry[channel_id].country:
        raise ValueError(
            f"country {country} does not match channel {channel_id} "
            f"registered as {registry[channel_id].country}"
        )
    title = obj.get("title")
    if not isinstance(title, str):
        raise ValueError("title must be a string")
    thumbnail_ref = obj.get("thumbnail_ref")
    if not isinstance(thumbnail_ref, str):
        raise ValueError("thumbnail_ref must be a string")
    duration = _parse_count(obj.get("duration_seconds"), "duration_seconds")
    upload_date = _parse_date(obj.get("upload_date"), "upload_date")
    retrieved_at = _parse_date(obj.get("retrieved_at"), "retrieved_at")
    if upload_date > retrieved_at:
        raise ValueError("upload_date is after retrieved_at")
    views = _parse_count(obj.get("views"), "views")
    likes = _parse_count(obj.get("likes"), "likes", optional=True)
    comments = _parse_count(obj.get("comments"), "comments", optional=True)
    return VideoRecord(
        video_id=video_id,
        channel_id=channel_id,
        country=country,
        title=title,
        thumbnail_ref=thumbnail_ref,
        duration_seconds=duration,
        upload_date=upload_date,
        retrieved_at=retrieved_at,
        views=views,
        likes=likes,
        comments=comments,
    )


def load_dataset(path: str | Path, registry: dict[str, ChannelInfo]) -> LoadResult:
    """Load a line-delimited video dataset, validating each record.

    Invalid records become :class:`Rejection` entries (malformed JSON, failed
    invariants, duplicate ids keep only the first occurrence); an unreadable
    file raises ``OSError``. Accepted records keep file order.
    """
    if not registry:
        raise ToolkitError("channel registry is empty")
    records: list[VideoRecord] = []
    rejections: list[Rejection] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                rejections.append(Rejection(line_no, None, f"malformed line: {exc.msg}"))
                continue
            if not isinstance(obj, dict):
                rejections.append(Rejection(line_no, None, "malformed line: not an object"))
                continue
            raw_id = obj.get("video_id")
            raw_id = raw_id if isinstance(raw_id, str) else None
            try:
                record = _validate_record(obj, registry)
            except (ValueError, KeyError) as exc:
                rejections.append(Rejection(line_no, raw_id, str(exc)))
                continue
            if record.video_id in seen:
                rejections.append(Rejection(line_no, record.video_id, "duplicate video_id"))
                continue
            seen.add(record.video_id)
            records.append(record)
    return LoadResult(records=records, rejections=rejections)


def _metric_values(dataset: Iterable[VideoRecord], metric: str, country: str) -> list[float]:
    if country not in COUNTRIES:
        raise ValueError(f"country must be one of {COUNTRIES}")
    values = []
    for rec in dataset:
        if rec.country != country:
            continue
        v = rec.metric(metric)
        if v is not None:
            values.append(float(v))
    return values


def summarize(values: Sequence[float]) -> DescriptiveStats:
    """Descriptive statistics of a value sequence.

    Uses the sample sd (n-1 denominator), adjusted Fisher-Pearson skewness
    G1 = sqrt(n(n-1))/(n-2) * m3/m2^1.5 and sample-adjusted excess kurtosis
    G2 = (n-1)/((n-2)(n-3)) * ((n+1)(m4/m2^2 - 3) + 6), the conventions of
    mainstream statistical software.
    """
    n = len(values)
    if n < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {n}")
    xs = [float(v) for v in values]
    mean = math.fsum(xs) / n
    centered = [x - mean for x in xs]
    # moments of peak-scaled residuals: the skewness/kurtosis ratios are
    # scale-invariant and m2 >= 1/n, so m2^2 cannot underflow to zero
    peak = max(abs(c) for c in centered)
    scaled = [c / peak for c in centered] if peak > 0.0 else centered
    m2 = math.fsum(c * c for c in scaled) / n
    m3 = math.fsum(c**3 for c in scaled) / n
    m4 = math.fsum(c**4 for c in scaled) / n
    sd = peak * math.sqrt(m2 * n / (n - 1))
    ordered = sorted(xs)
    mid = n // 2
    median = ordered[mid] if n % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0

    skewness: float | None = None
    kurtosis: float | None = None
    if m2 > 0.0:
        if n >= 3:
            skewness = math.sqrt(n * (n - 1)) / (n - 2) * m3 / m2**1.5
        if n >= 4:
            g2 = m4 / (m2 * m2) - 3.0
            kurtosis = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * g2 + 6.0)
    return DescriptiveStats(
        n=n,
        mean=mean,
        median=median,
        sd=sd,
        min=ordered[0],
        max=ordered[-1],
        skewness=skewness,
        kurtosis=kurtosis,
    )


def descriptive_stats(
    dataset: Iterable[VideoRecord], metric: str, country: str
) -> DescriptiveStats:
    """Summary statistics of one engagement metric for one country.

    Records with a missing (``None``) metric value are excluded from ``n``.
    """
    values = _metric_values(dataset, metric, country)
    if len(values) < 2:
        raise InsufficientDataError(
            f"need at least 2 {country} records with non-missing {metric}, got {len(values)}"
        )
    return summarize(values)


def engagement_ratios(dataset: Iterable[VideoRecord], country: str) -> dict[str, float]:
    """Median-to-mean view ratio and comment intensity for one country.

    ``comment_intensity`` is the ratio of summed comments to summed views over
    records where both are present, expressed as a decimal fraction.
    """
    recs = [r for r in dataset if r.country == country]
    if not recs:
        raise InsufficientDataError(f"no records for country {country}")
    views = [float(r.views) for r in recs]
    if not any(v > 0 for v in views):
        raise DegenerateInputError(f"all {country} records have zero views")
    mean_views = math.fsum(views) / len(views)
    if mean_views == 0.0:
        raise DegenerateInputError("mean views is zero")
    ordered = sorted(views)
    mid = len(ordered) // 2
    median_views = (
        ordered[mid] if len(ordered) % 2 else (ordered[mid - 1] + ordered[mid]) / 2.0
    )
    paired = [(r.comments, r.views) for r in recs if r.comments is not None]
    total_views = math.fsum(v for _, v in paired)
    comment_intensity = (
        math.fsum(c for c, _ in paired) / total_views if total_views > 0 else 0.0
    )
    return {
        "median_to_mean_views": median_views / mean_views,
        "comment_intensity": comment_intensity,
    }

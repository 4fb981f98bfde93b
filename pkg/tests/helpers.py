"""Shared factories for test data: channels, records, scores, designs."""

from __future__ import annotations

import json
from datetime import date
from pathlib import Path

import numpy as np

from moralmeter import CATEGORY_ORDER, EmotionScores, VideoRecord
from moralmeter.regress import DesignMatrix

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
ORACLE = FIXTURES / "oracle"


def oracle(name: str) -> dict:
    with open(ORACLE / name, encoding="utf-8") as fh:
        return json.load(fh)


def write_jsonl(path: Path, rows) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")
    return path


def channel_dict(channel_id: str, country: str = "KO", **overrides) -> dict:
    base = {
        "channel_id": channel_id,
        "name": f"Channel {channel_id}",
        "country": country,
        "political_leaning": "unspecified",
        "creation_date": "2010-01-01",
        "subscribers": 1000,
        "total_videos": 500,
        "total_views": 2_000_000,
    }
    base.update(overrides)
    return base


def record_dict(video_id: str, channel_id: str = "ch1", country: str = "KO", **overrides) -> dict:
    base = {
        "video_id": video_id,
        "channel_id": channel_id,
        "country": country,
        "title": f"Video {video_id}",
        "thumbnail_ref": f"https://example.test/{video_id}.jpg",
        "duration_seconds": 120,
        "upload_date": "2021-02-03",
        "retrieved_at": "2021-06-30",
        "views": 100,
        "likes": 10,
        "comments": 5,
    }
    base.update(overrides)
    return base


def make_record(video_id: str, channel_id: str = "ch1", country: str = "KO", **overrides) -> VideoRecord:
    kw = dict(
        video_id=video_id,
        channel_id=channel_id,
        country=country,
        title=f"Video {video_id}",
        thumbnail_ref=f"https://example.test/{video_id}.jpg",
        duration_seconds=120,
        upload_date=date(2021, 2, 3),
        retrieved_at=date(2021, 6, 30),
        views=100,
        likes=10,
        comments=5,
    )
    kw.update(overrides)
    return VideoRecord(**kw)


def make_scores(other_condemning: float = 0.1, **overrides) -> EmotionScores:
    values = {tok: 0.1 for tok in CATEGORY_ORDER}
    values["other_condemning"] = other_condemning
    values.update(overrides)
    return EmotionScores(values)


def nb_draw(rng: np.random.Generator, mu: np.ndarray, alpha: float) -> np.ndarray:
    """Sample NB2 counts: Poisson with Gamma(1/alpha, alpha*mu) rate."""
    r = 1.0 / alpha
    lam = rng.gamma(shape=r, scale=mu / r)
    return rng.poisson(lam).astype(float)


def synthetic_design(
    rng: np.random.Generator,
    n: int,
    alpha: float,
    beta: np.ndarray | None = None,
    with_dummies: bool = True,
) -> tuple[DesignMatrix, np.ndarray]:
    """Intercept + two continuous covariates + two dummy columns, NB2 response.

    Returns the design and the true coefficient vector used to draw it.
    """
    cols = ["intercept", "x1", "x2"]
    parts = [np.ones(n), rng.uniform(0.0, 1.0, size=n), rng.normal(0.0, 0.5, size=n)]
    if with_dummies:
        group = rng.integers(0, 3, size=n)
        parts.append((group == 1).astype(float))
        parts.append((group == 2).astype(float))
        cols += ["g_1", "g_2"]
    X = np.column_stack(parts)
    if beta is None:
        beta = np.array([1.5, 0.8, -0.4, 0.3, -0.2][: X.shape[1]])
    mu = np.exp(X @ beta)
    if alpha > 0:
        y = nb_draw(rng, mu, alpha)
    else:
        y = rng.poisson(mu).astype(float)
    design = DesignMatrix(
        y=y,
        X=X,
        column_names=cols,
        row_ids=[f"v{i:06d}" for i in range(n)],
        n_dropped=0,
    )
    return design, beta

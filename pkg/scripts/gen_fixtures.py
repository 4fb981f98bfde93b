#!/usr/bin/env python3
"""Regenerate the synthetic fixture corpus under fixtures/.

Deterministic: every file is a pure function of the seeds below. The corpus
is small (200 videos over 4 channels and 4 months) but exercises every
pipeline path: two countries, missing likes/comments, emotion scores that
actually drive engagement through a known NB2 model, a channel too small
for per-channel refits, pilot labels and topic clusters for sampling, and
growth curves with one zero-start series.
"""

from __future__ import annotations

import json
import math
from datetime import date, timedelta
from pathlib import Path

import numpy as np

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

MASTER_SEED = 20240817

CATEGORIES = [
    "other_condemning",
    "other_praising",
    "other_suffering",
    "self_conscious",
    "neutral",
    "non_moral",
]

CHANNELS = [
    {
        "channel_id": "ko_a",
        "name": "Hangang Daily",
        "country": "KO",
        "political_leaning": "left",
        "creation_date": "2012-03-14",
        "subscribers": 1_200_000,
        "total_videos": 45_000,
        "total_views": 2_100_000_000,
        "n_videos": 60,
        "effect": 0.0,
    },
    {
        "channel_id": "ko_b",
        "name": "Namsan News",
        "country": "KO",
        "political_leaning": "right",
        "creation_date": "2014-07-02",
        "subscribers": 860_000,
        "total_videos": 31_000,
        "total_views": 1_400_000_000,
        "n_videos": 55,
        "effect": 0.4,
    },
    {
        "channel_id": "us_a",
        "name": "Liberty Broadcast",
        "country": "US",
        "political_leaning": "center",
        "creation_date": "2009-11-20",
        "subscribers": 4_300_000,
        "total_videos": 88_000,
        "total_views": 9_800_000_000,
        "n_videos": 62,
        "effect": 0.8,
    },
    {
        "channel_id": "us_b",
        "name": "Prairie Report",
        "country": "US",
        "political_leaning": "unspecified",
        "creation_date": "2016-01-05",
        "subscribers": 240_000,
        "total_videos": 9_500,
        "total_views": 160_000_000,
        "n_videos": 23,  # below the per-channel refit threshold on purpose
        "effect": -0.3,
    },
]

TITLE_LEADS = {
    "KO": ["속보", "단독", "현장", "오늘의 뉴스", "심층"],
    "US": ["Breaking", "Exclusive", "Live", "Tonight", "In depth"],
}
TITLE_TOPICS = {
    "KO": ["예산안 표결", "태풍 북상", "전세 사기", "의료 개혁", "수출 실적"],
    "US": ["budget vote", "storm landfall", "housing fraud", "health reform", "trade numbers"],
}

# true engagement model that generates the response counts
BETA = {
    "intercept": 2.2,
    "other_condemning": 0.9,
    "other_praising": 0.4,
    "other_suffering": 0.5,
    "neutral": 0.0,
    "log_duration": 0.25,
}
MONTH_EFFECT = {1: 0.0, 2: 0.1, 3: -0.2, 4: 0.15}
WEEKDAY_EFFECT = [0.0, 0.05, -0.05, 0.1, 0.0, -0.1, 0.05]  # Mon..Sun
TRUE_ALPHA = 0.5

# Appendix registry of the real channels (leaning not stated per channel)
PAPER_CHANNELS = [
    ("mbc", "MBC", "KO", "2006-11-05", 5_990_000, 340_262, 24_797_909_341),
    ("sbs", "SBS", "KO", "2014-05-02", 5_040_000, 303_297, 15_303_288_548),
    ("kbs", "KBS", "KO", "2013-08-06", 3_450_000, 402_625, 9_438_028_884),
    ("ytn", "YTN", "KO", "2013-05-23", 5_180_000, 899_837, 17_968_642_717),
    ("jtbc", "JTBC", "KO", "2012-02-21", 4_720_000, 267_723, 15_193_306_921),
    ("channel_a", "Channel A", "KO", "2012-05-21", 3_290_000, 148_091, 6_324_043_072),
    ("tv_chosun", "TV Chosun", "KO", "2012-08-23", 2_950_000, 156_352, 4_519_383_020),
    ("msnbc", "MSNBC", "US", "2011-12-01", 9_170_000, 103_524, 17_802_177_849),
    ("abc_news", "ABC News", "US", "2006-08-07", 19_000_000, 105_389, 17_194_229_268),
    ("associated_press", "Associated Press", "US", "2006-09-18", 4_070_000, 191_782, 3_987_254_199),
    ("cbs_mornings", "CBS Mornings", "US", "2013-05-23", 3_210_000, 48_283, 2_646_175_644),
    ("cnn", "CNN", "US", "2005-10-02", 18_700_000, 175_996, 18_991_981_999),
    ("nbc_news", "NBC News", "US", "2006-07-19", 11_500_000, 83_713, 9_022_804_580),
    ("newsnation", "NewsNation", "US", "2020-05-06", 2_380_000, 75_204, 1_500_720_042),
    ("wsj_news", "WSJ News", "US", "2010-12-22", 621_000, 3_241, 174_398_384),
    ("new_york_post", "New York Post", "US", "2006-03-02", 2_220_000, 30_734, 1_669_345_371),
    ("washington_times", "The Washington Times", "US", "2007-03-13", 19_300, 4_624, 7_323_567),
    ("breitbart_news", "Breitbart News", "US", "2015-02-24", 408_000, 12_504, 148_557_721),
    ("blazetv", "BlazeTV", "US", "2013-09-20", 2_140_000, 14_735, 1_029_928_612),
    ("cbn_news", "CBN News", "US", "2008-03-31", 2_560_000, 41_938, 1_013_733_670),
    ("fox_news", "Fox News", "US", "2006-09-19", 14_500_000, 126_711, 22_336_811_664),
    ("newsmax", "Newsmax", "US", "2008-01-18", 2_460_000, 53_921, 843_288_176),
    ("oann", "One America News Network (OANN)", "US", "2013-10-04", 1_410_000, 17_723, 228_071_971),
]


def write_jsonl(path: Path, rows):
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False) + "\n")
    print(f"wrote {path} ({len(rows)} lines)")


def gen_scores(rng, n):
    """Six independent probabilities per video with one dominant category."""
    dominant_p = [0.25, 0.10, 0.15, 0.05, 0.35, 0.10]  # CATEGORIES order
    out = []
    for _ in range(n):
        dom = CATEGORIES[rng.choice(len(CATEGORIES), p=dominant_p)]
        scores = {}
        for cat in CATEGORIES:
            if cat == dom:
                scores[cat] = round(float(rng.uniform(0.55, 0.95)), 6)
            else:
                scores[cat] = round(float(rng.uniform(0.0, 0.45)), 6)
        out.append(scores)
    return out


def gen_corpus():
    rng = np.random.default_rng([MASTER_SEED, 1])
    records = []
    scores_rows = []
    start = date(2021, 1, 1)
    span = (date(2021, 4, 30) - start).days
    vid_no = 0
    all_scores = gen_scores(rng, sum(c["n_videos"] for c in CHANNELS))
    for channel in CHANNELS:
        leads = TITLE_LEADS[channel["country"]]
        topics = TITLE_TOPICS[channel["country"]]
        for _ in range(channel["n_videos"]):
            vid_no += 1
            video_id = f"v{vid_no:04d}"
            upload = start + timedelta(days=int(rng.integers(0, span + 1)))
            duration = int(rng.integers(45, 901))
            scores = all_scores[vid_no - 1]
            eta = (
                BETA["intercept"]
                + BETA["other_condemning"] * scores["other_condemning"]
                + BETA["other_praising"] * scores["other_praising"]
                + BETA["other_suffering"] * scores["other_suffering"]
                + BETA["neutral"] * scores["neutral"]
                + BETA["log_duration"] * math.log1p(duration)
                + channel["effect"]
                + MONTH_EFFECT[upload.month]
                + WEEKDAY_EFFECT[upload.weekday()]
            )
            mu = math.exp(eta)
            r = 1.0 / TRUE_ALPHA
            views = int(rng.negative_binomial(r, r / (r + mu)))
            likes = int(rng.poisson(0.05 * views + 0.5))
            comments = int(rng.poisson(0.012 * views + 0.2))
            record = {
                "video_id": video_id,
                "channel_id": channel["channel_id"],
                "country": channel["country"],
                "title": f"{leads[vid_no % len(leads)]}: {topics[vid_no % len(topics)]} #{vid_no}",
                "thumbnail_ref": f"thumbs/{video_id}.jpg",
                "duration_seconds": duration,
                "upload_date": upload.isoformat(),
                "retrieved_at": "2021-06-30",
                "views": views,
                "likes": None if rng.uniform() < 0.04 else likes,
                "comments": None if rng.uniform() < 0.05 else comments,
            }
            records.append(record)
            scores_rows.append({"video_id": video_id, "scores": scores})
    return records, scores_rows


def gen_growth():
    rng = np.random.default_rng([MASTER_SEED, 2])
    rows = []
    for i in range(25):
        video_id = f"g{i:03d}"
        days = 30 if i == 24 else 60  # one short series
        if i == 23:  # one zero-start series, skipped by the summary
            views = [0, 0, 0]
            v = 0.0
            for d in range(3, days):
                v = max(v, 5.0) * (1.0 + 0.02 * math.exp(-d / 15.0))
                views.append(int(v))
        else:
            v = float(rng.integers(200, 5001))
            base = float(rng.uniform(0.015, 0.04))
            views = [int(v)]
            for d in range(1, days):
                rate = base * math.exp(-d / 12.0) * float(rng.uniform(0.6, 1.4))
                v *= 1.0 + rate
                views.append(int(math.ceil(v)))
        # cumulative counts must never shrink
        for t in range(1, len(views)):
            views[t] = max(views[t], views[t - 1])
        rows.append({"video_id": video_id, "daily_views": views})
    return rows


def gen_pilot_and_clusters(records, scores_rows):
    rng = np.random.default_rng([MASTER_SEED, 3])
    by_id = {row["video_id"]: row["scores"] for row in scores_rows}
    pilot = []
    for rec in records:
        scores = by_id[rec["video_id"]]
        best = max(CATEGORIES, key=lambda c: (scores[c], -CATEGORIES.index(c)))
        pilot.append({"video_id": rec["video_id"], "label": best})
    clusters = []
    for rec in records:
        if rng.uniform() < 0.10:  # ~10% have no topic cluster
            continue
        clusters.append({"video_id": rec["video_id"], "cluster": f"t{int(rng.integers(0, 10)):02d}"})
    return pilot, clusters


def gen_replicate_vectors():
    rng = np.random.default_rng([MASTER_SEED, 4])
    return {f"vector_{i}": [float(v) for v in rng.normal(0.5, 0.2, 1000)] for i in range(3)}


def main():
    FIXTURES.mkdir(exist_ok=True)
    (FIXTURES / "oracle").mkdir(exist_ok=True)

    channels = [
        {k: c[k] for k in (
            "channel_id", "name", "country", "political_leaning",
            "creation_date", "subscribers", "total_videos", "total_views",
        )}
        for c in CHANNELS
    ]
    write_jsonl(FIXTURES / "channels.jsonl", channels)

    records, scores_rows = gen_corpus()
    write_jsonl(FIXTURES / "dataset.jsonl", records)
    write_jsonl(FIXTURES / "scores_200.jsonl", scores_rows)

    write_jsonl(FIXTURES / "growth.jsonl", gen_growth())

    pilot, clusters = gen_pilot_and_clusters(records, scores_rows)
    write_jsonl(FIXTURES / "pilot_labels.jsonl", pilot)
    write_jsonl(FIXTURES / "clusters.jsonl", clusters)

    paper_rows = [
        {
            "channel_id": cid,
            "name": name,
            "country": country,
            "political_leaning": "unspecified",
            "creation_date": created,
            "subscribers": subs,
            "total_videos": vids,
            "total_views": views,
        }
        for cid, name, country, created, subs, vids, views in PAPER_CHANNELS
    ]
    write_jsonl(FIXTURES / "paper_channels.jsonl", paper_rows)

    with open(FIXTURES / "oracle" / "replicates_1000.json", "w", encoding="utf-8") as fh:
        json.dump(gen_replicate_vectors(), fh, indent=2)
        fh.write("\n")
    print(f"wrote {FIXTURES / 'oracle' / 'replicates_1000.json'}")


if __name__ == "__main__":
    main()

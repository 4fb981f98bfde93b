#!/usr/bin/env python3
"""Independent descriptive statistics over the fixture corpus.

Direct moment sums with plain loops and the statistics module — no shared
code with the package. Frozen into fixtures/oracle/describe_oracle.json.
"""

import math
import statistics

from _oracle_common import fixture_dir, read_jsonl, write_oracle


def stats_for(values):
    n = len(values)
    mean = math.fsum(values) / n
    m2 = math.fsum((v - mean) ** 2 for v in values) / n
    m3 = math.fsum((v - mean) ** 3 for v in values) / n
    m4 = math.fsum((v - mean) ** 4 for v in values) / n
    sd = math.sqrt(n / (n - 1) * m2) if n > 1 else 0.0
    skew = None
    kurt = None
    if m2 > 0 and n >= 3:
        skew = math.sqrt(n * (n - 1)) / (n - 2) * m3 / m2**1.5
    if m2 > 0 and n >= 4:
        kurt = (n - 1) / ((n - 2) * (n - 3)) * ((n + 1) * (m4 / m2**2 - 3.0) + 6.0)
    return {
        "n": n,
        "mean": mean,
        "median": float(statistics.median(values)),
        "sd": sd,
        "min": float(min(values)),
        "max": float(max(values)),
        "skewness": skew,
        "kurtosis": kurt,
    }


def main():
    records = read_jsonl(fixture_dir() / "dataset.jsonl")
    out = {}
    for country in ("KO", "US"):
        rows = [r for r in records if r["country"] == country]
        per_metric = {}
        for metric in ("views", "likes", "comments"):
            values = [float(r[metric]) for r in rows if r.get(metric) is not None]
            per_metric[metric] = stats_for(values)
        views = [float(r["views"]) for r in rows]
        mean_views = math.fsum(views) / len(views)
        with_comments = [r for r in rows if r.get("comments") is not None]
        out[country] = {
            "stats": per_metric,
            "ratios": {
                "median_to_mean_views": float(statistics.median(views)) / mean_views,
                "comment_intensity": math.fsum(float(r["comments"]) for r in with_comments)
                / math.fsum(float(r["views"]) for r in with_comments),
            },
        }
    write_oracle("describe_oracle.json", out)


if __name__ == "__main__":
    main()

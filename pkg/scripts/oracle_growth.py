#!/usr/bin/env python3
"""Independent growth-window summary over fixtures/growth.jsonl.

Plain loops: rate for day d is 100*(v[d+1]-v[d])/v[d] (1-indexed days), a
window (a, b) pools rate days a..b across videos, series starting at zero
views are skipped. Frozen into fixtures/oracle/growth_oracle.json.
"""

import math
import statistics

from _oracle_common import fixture_dir, read_jsonl, write_oracle

WINDOWS = [(1, 10), (51, 60)]


def main():
    series = read_jsonl(fixture_dir() / "growth.jsonl")
    rates = {}
    skipped = []
    for s in series:
        views = s["daily_views"]
        if views[0] == 0:
            skipped.append(s["video_id"])
            continue
        rates[s["video_id"]] = [
            100.0 * (views[t + 1] - views[t]) / views[t] for t in range(len(views) - 1)
        ]
    out = {"skipped": skipped, "windows": []}
    for start, end in WINDOWS:
        pooled = []
        for vid in sorted(rates):
            pooled.extend(rates[vid][start - 1 : end])
        out["windows"].append(
            {
                "start_day": start,
                "end_day": end,
                "n_rates": len(pooled),
                "mean_rate": math.fsum(pooled) / len(pooled) if pooled else None,
                "median_rate": float(statistics.median(pooled)) if pooled else None,
            }
        )
    write_oracle("growth_oracle.json", out)


if __name__ == "__main__":
    main()

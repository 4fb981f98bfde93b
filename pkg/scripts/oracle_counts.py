#!/usr/bin/env python3
"""Fixture manifest by plain line counting (independent of the loader).

Frozen into fixtures/manifest.json.
"""

import json

from _oracle_common import fixture_dir


def main():
    fixtures = fixture_dir()
    per_channel = {}
    countries = {}
    n_records = 0
    with open(fixtures / "dataset.jsonl", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            n_records += 1
            obj = json.loads(line)
            per_channel[obj["channel_id"]] = per_channel.get(obj["channel_id"], 0) + 1
            countries[obj["country"]] = countries.get(obj["country"], 0) + 1
    n_scores = sum(1 for line in open(fixtures / "scores_200.jsonl", encoding="utf-8") if line.strip())
    n_growth = sum(1 for line in open(fixtures / "growth.jsonl", encoding="utf-8") if line.strip())
    n_pilot = sum(1 for line in open(fixtures / "pilot_labels.jsonl", encoding="utf-8") if line.strip())
    n_clusters = sum(1 for line in open(fixtures / "clusters.jsonl", encoding="utf-8") if line.strip())
    manifest = {
        "n_records": n_records,
        "per_channel": per_channel,
        "per_country": countries,
        "n_scores": n_scores,
        "n_growth_series": n_growth,
        "n_pilot_labels": n_pilot,
        "n_clusters": n_clusters,
    }
    path = fixtures / "manifest.json"
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()

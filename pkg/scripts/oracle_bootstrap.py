#!/usr/bin/env python3
"""Independent bootstrap of the focal coefficient on the fixture corpus.

Mirrors the published resampling contract — replicate r draws
floor(fraction*n) records without replacement via default_rng([seed, r]) —
but rebuilds designs and fits with the scripts' own scipy-based routines.
Matches fixtures/config.yaml: 50 replicates, fraction 0.5, seed 33, focal
other_condemning. Frozen into fixtures/oracle/bootstrap_oracle.json.
"""

import math

import numpy as np

from _oracle_common import build_design, fit_nb_scipy, fixture_dir, read_jsonl, write_oracle

SEED = 33
REPS = 50
FRACTION = 0.5
FOCAL = "other_condemning"


def nearest_rank(ordered, pct):
    return ordered[math.ceil(pct / 100.0 * len(ordered)) - 1]


def main():
    fixtures = fixture_dir()
    records = read_jsonl(fixtures / "dataset.jsonl")
    scores = {row["video_id"]: row["scores"] for row in read_jsonl(fixtures / "scores_200.jsonl")}
    m = int(FRACTION * len(records))
    estimates = []
    for rep in range(REPS):
        rng = np.random.default_rng([SEED, rep])
        idx = rng.choice(len(records), size=m, replace=False)
        subset = [records[i] for i in idx]
        y, X, names = build_design(subset, scores, response="views")
        beta, alpha, ll = fit_nb_scipy(y, X)
        estimates.append(float(beta[names.index(FOCAL)]))
    ordered = sorted(estimates)
    write_oracle(
        "bootstrap_oracle.json",
        {
            "seed": SEED,
            "reps": REPS,
            "fraction": FRACTION,
            "focal": FOCAL,
            "subsample_size": m,
            "estimates": estimates,
            "ci_low": nearest_rank(ordered, 2.5),
            "median": nearest_rank(ordered, 50.0),
            "ci_high": nearest_rank(ordered, 97.5),
        },
    )


if __name__ == "__main__":
    main()

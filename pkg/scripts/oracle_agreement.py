#!/usr/bin/env python3
"""Brute-force agreement statistics on reference label matrices.

Cohen's kappa from explicit contingency tables, Fleiss' kappa from the
category-count definition, and Krippendorff's alpha by enumerating every
ordered value pair within units — no coincidence-matrix shortcut. Frozen
into fixtures/oracle/agreement_oracle.json.
"""

import itertools
import random

from _oracle_common import write_oracle

CHOICES = [
    "other_condemning",
    "other_praising",
    "other_suffering",
    "self_conscious",
    "neutral",
    "non_moral",
    "hard_to_tell",
]


def cohen_pairwise_mean(rows):
    n_raters = len(rows[0])
    kappas = []
    for a, b in itertools.combinations(range(n_raters), 2):
        col_a = [row[a] for row in rows]
        col_b = [row[b] for row in rows]
        n = len(rows)
        po = sum(1 for x, y in zip(col_a, col_b) if x == y) / n
        cats = sorted(set(col_a) | set(col_b))
        pe = sum(
            (col_a.count(c) / n) * (col_b.count(c) / n) for c in cats
        )
        if set(col_a) == set(col_b) and len(set(col_a)) == 1:
            continue  # both raters constant on the same label: undefined
        kappas.append((po - pe) / (1.0 - pe))
    return sum(kappas) / len(kappas) if kappas else None


def fleiss(rows):
    n = len(rows)
    m = len(rows[0])
    cats = sorted({v for row in rows for v in row})
    if len(cats) == 1:
        return None
    counts = [[row.count(c) for c in cats] for row in rows]
    p_bar = sum(
        (sum(k * k for k in row) - m) / (m * (m - 1)) for row in counts
    ) / n
    p_j = [sum(row[j] for row in counts) / (n * m) for j in range(len(cats))]
    pe = sum(p * p for p in p_j)
    if pe == 1.0:
        return None
    return (p_bar - pe) / (1.0 - pe)


def krippendorff(rows):
    """Nominal alpha by direct pair enumeration within units."""
    # observed disagreement: ordered pairs within each unit, weighted 1/(m_u-1)
    num = 0.0
    pairable = 0
    values = []
    for row in rows:
        m = len(row)
        if m < 2:
            continue
        pairable += m
        values.extend(row)
        for x, y in itertools.permutations(row, 2):
            num += (1.0 if x != y else 0.0) / (m - 1)
    d_o = num / pairable
    n = len(values)
    counts = {c: values.count(c) for c in set(values)}
    d_e = sum(
        counts[c] * counts[k]
        for c in counts
        for k in counts
        if c != k
    ) / (n * (n - 1))
    if d_e == 0.0:
        return None
    return 1.0 - d_o / d_e


MATRICES = {
    # three items, three raters, the hand-worked example
    "worked_example": [
        ["other_condemning", "other_condemning", "other_praising"],
        ["other_praising", "other_praising", "other_condemning"],
    ],
    "perfect": [
        ["neutral", "neutral", "neutral"],
        ["other_suffering", "other_suffering", "other_suffering"],
        ["non_moral", "non_moral", "non_moral"],
    ],
}


def random_matrix(seed, n_items, n_raters):
    rng = random.Random(seed)
    return [[rng.choice(CHOICES) for _ in range(n_raters)] for _ in range(n_items)]


def main():
    out = {}
    for name, rows in MATRICES.items():
        out[name] = {
            "rows": rows,
            "cohen_mean": cohen_pairwise_mean(rows),
            "fleiss": fleiss(rows),
            "krippendorff": krippendorff(rows),
        }
    for seed in (101, 202, 303):
        rows = random_matrix(seed, 12, 3)
        out[f"random_{seed}"] = {
            "rows": rows,
            "cohen_mean": cohen_pairwise_mean(rows),
            "fleiss": fleiss(rows),
            "krippendorff": krippendorff(rows),
        }
    write_oracle("agreement_oracle.json", out)


if __name__ == "__main__":
    main()

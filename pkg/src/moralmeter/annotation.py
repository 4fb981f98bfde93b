"""Annotation workflow: stratified sampling, gold labels, agreement statistics.

Raters choose among the six emotion categories plus ``hard_to_tell``; all
seven are distinct nominal categories for the agreement statistics, but
``hard_to_tell`` can never become a gold label. All randomized selection is
driven by a caller-supplied 64-bit seed through ``numpy.random.default_rng``
(PCG64) so exports are reproducible.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .categories import CATEGORY_ORDER, CHOICE_SET, HARD_TO_TELL, EmotionCategory
from .corpus import VideoRecord


@dataclass(frozen=True)
class LabelMatrix:
    """Complete items x raters grid of annotation choices.

    Every rater labels every item in a round; incomplete grids are rejected
    here (only Krippendorff's alpha natively tolerates gaps, and the
    coincidence-matrix construction below would support them).
    """

    item_ids: tuple[str, ...]
    raters: tuple[str, ...]
    cells: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.raters) < 2:
            raise ValueError("need at least 2 raters")
        if len(self.item_ids) < 1:
            raise ValueError("need at least 1 item")
        if len(self.cells) != len(self.item_ids):
            raise ValueError("cell rows do not match item count")
        for item_id, row in zip(self.item_ids, self.cells):
            if len(row) != len(self.raters):
                raise ValueError(f"item {item_id}: row width does not match rater count")
            for choice in row:
                if choice not in CHOICE_SET:
                    raise ValueError(f"item {item_id}: invalid choice {choice!r}")

    @property
    def n_items(self) -> int:
        return len(self.item_ids)

    @property
    def n_raters(self) -> int:
        return len(self.raters)


@dataclass(frozen=True)
class GoldLabel:
    item_id: str
    label: EmotionCategory
    vote_count: int


@dataclass(frozen=True)
class AgreementReport:
    """The three chance-corrected agreement statistics for one matrix.

    A statistic is ``None`` when its chance term degenerates (e.g. every
    rater always chose the same single category).
    """

    cohen_kappa: float | None
    fleiss_kappa: float | None
    krippendorff_alpha: float | None
    n_items: int
    n_raters: int


def _proportional_quotas(counts: Mapping[str, int], total: int) -> dict[str, int]:
    """Largest-remainder apportionment of ``total`` across categories.

    Each quota is within one item of the exact proportional share and the
    quotas sum to ``total``. Ties in fractional part break by the canonical
    category order (then lexicographically for non-category keys).
    """
    keys = [k for k in counts if counts[k] > 0]
    order = {c: i for i, c in enumerate(CATEGORY_ORDER)}
    keys.sort(key=lambda k: (order.get(k, len(order)), k))
    pool = sum(counts[k] for k in keys)
    if total > pool:
        raise ValueError(f"requested {total} items from a pool of {pool}")
    exact = {k: total * counts[k] / pool for k in keys}
    quotas = {k: int(exact[k]) for k in keys}
    leftover = total - sum(quotas.values())
    by_remainder = sorted(keys, key=lambda k: (-(exact[k] - quotas[k]), order.get(k, len(order)), k))
    for k in by_remainder[:leftover]:
        quotas[k] += 1
    return quotas


def _cap_quotas(quotas: dict[str, int], available: Mapping[str, int]) -> dict[str, int]:
    """Cap quotas at category availability, redistributing the overflow."""
    capped = dict(quotas)
    while True:
        overflow = 0
        open_keys = []
        for k in capped:
            if capped[k] > available[k]:
                overflow += capped[k] - available[k]
                capped[k] = available[k]
            elif capped[k] < available[k]:
                open_keys.append(k)
        if overflow == 0:
            return capped
        warnings.warn(f"quota exceeds category size; redistributing {overflow} items")
        if not open_keys:
            raise ValueError("cannot redistribute quota: all categories exhausted")
        headroom = {k: available[k] - capped[k] for k in open_keys}
        extra = _proportional_quotas(headroom, min(overflow, sum(headroom.values())))
        for k, q in extra.items():
            capped[k] += q


def stratified_sample(
    pool: Sequence[VideoRecord],
    pilot_labels: Mapping[str, str],
    clusters: Mapping[str, str],
    per_language_n: int,
    seed: int,
) -> list[VideoRecord]:
    """Draw an annotation sample stratified by pilot label, cluster, channel.

    Category quotas follow the pool's pilot-label proportions (within one
    item, by largest remainder). Within a category, picks rotate over
    (cluster, channel) cells: each pick goes to the least-used channel
    overall, then the least-used cluster within the category, with seeded
    random order breaking ties. Items without a cluster form singleton
    clusters. Deterministic given the seed.
    """
    if per_language_n > len(pool):
        raise ValueError(f"requested {per_language_n} items from a pool of {len(pool)}")
    missing = [r.video_id for r in pool if r.video_id not in pilot_labels]
    if missing:
        raise ValueError(f"pool items without pilot labels: {missing[:5]}")
    label_counts = Counter(pilot_labels[r.video_id] for r in pool)
    for cat in label_counts:
        if cat not in CATEGORY_ORDER:
            raise ValueError(f"invalid pilot label {cat!r}")
    quotas = _proportional_quotas(label_counts, per_language_n)
    for cat in CATEGORY_ORDER:
        if quotas.get(cat, 0) > label_counts.get(cat, 0):
            quotas = _cap_quotas(quotas, label_counts)
            break

    rng = np.random.default_rng(seed)
    by_category: dict[str, list[VideoRecord]] = {c: [] for c in CATEGORY_ORDER}
    for rec in sorted(pool, key=lambda r: r.video_id):
        by_category[pilot_labels[rec.video_id]].append(rec)

    sample: list[VideoRecord] = []
    channel_counts: Counter = Counter()
    for cat in CATEGORY_ORDER:
        quota = quotas.get(cat, 0)
        if quota == 0:
            continue
        cells: dict[tuple[str, str], list[VideoRecord]] = {}
        for rec in by_category[cat]:
            cluster = clusters.get(rec.video_id, f"solo:{rec.video_id}")
            cells.setdefault((cluster, rec.channel_id), []).append(rec)
        cell_keys = sorted(cells)
        cell_rank = {k: float(rng.random()) for k in cell_keys}
        for k in cell_keys:
            rng.shuffle(cells[k])
        cluster_counts: Counter = Counter()
        for _ in range(quota):
            candidates = [k for k in cell_keys if cells[k]]
            cluster, channel = min(
                candidates,
                key=lambda k: (channel_counts[k[1]], cluster_counts[k[0]], cell_rank[k]),
            )
            rec = cells[(cluster, channel)].pop()
            sample.append(rec)
            channel_counts[channel] += 1
            cluster_counts[cluster] += 1
    return sample


def majority_vote(matrix: LabelMatrix) -> tuple[list[GoldLabel], list[str]]:
    """Gold labels by strict majority; items without one are excluded.

    An item becomes gold iff a single emotion category (never
    ``hard_to_tell``) received more than half of its rater choices. The
    returned gold and excluded ids partition the matrix's items.
    """
    gold: list[GoldLabel] = []
    excluded: list[str] = []
    threshold = matrix.n_raters / 2.0
    for item_id, row in zip(matrix.item_ids, matrix.cells):
        winner = None
        for choice, count in Counter(row).items():
            if choice != HARD_TO_TELL and count > threshold:
                winner = GoldLabel(item_id, EmotionCategory(choice), count)
                break
        if winner is None:
            excluded.append(item_id)
        else:
            gold.append(winner)
    return gold, excluded


def _pair_kappa(col_a: Sequence[str], col_b: Sequence[str]) -> float | None:
    n = len(col_a)
    agree = sum(a == b for a, b in zip(col_a, col_b))
    marg_a = Counter(col_a)
    marg_b = Counter(col_b)
    if len(marg_a) == 1 and marg_a.keys() == marg_b.keys():
        return None  # both raters constant on the same label: chance term is 1
    p_o = agree / n
    p_e = sum(marg_a[c] * marg_b.get(c, 0) for c in marg_a) / (n * n)
    return (p_o - p_e) / (1.0 - p_e)


def cohen_kappa_mean(matrix: LabelMatrix) -> float | None:
    """Unweighted mean of pairwise Cohen's kappa over all rater pairs.

    Pairs whose chance agreement is exactly 1 (both raters constant on the
    same label) are undefined and excluded with a warning.
    """
    columns = list(zip(*matrix.cells))
    kappas = []
    skipped = 0
    for i in range(len(columns)):
        for j in range(i + 1, len(columns)):
            k = _pair_kappa(columns[i], columns[j])
            if k is None:
                skipped += 1
            else:
                kappas.append(k)
    if skipped:
        warnings.warn(f"{skipped} rater pair(s) with degenerate chance agreement excluded")
    if not kappas:
        return None
    return sum(kappas) / len(kappas)


def fleiss_kappa(matrix: LabelMatrix) -> float | None:
    """Fleiss' kappa over the complete grid.

    Per-item agreement P_i = sum_j n_ij(n_ij - 1) / (n(n-1)) with n raters;
    kappa = (P_bar - P_e) / (1 - P_e) where P_e = sum_j p_j^2 over pooled
    category proportions. Returns ``None`` when P_e = 1.
    """
    n = matrix.n_raters
    total = Counter()
    p_sum = 0.0
    for row in matrix.cells:
        counts = Counter(row)
        total.update(counts)
        p_sum += sum(c * (c - 1) for c in counts.values()) / (n * (n - 1))
    if len(total) == 1:
        return None
    p_bar = p_sum / matrix.n_items
    pooled = matrix.n_items * n
    p_e = sum((c / pooled) ** 2 for c in total.values())
    return (p_bar - p_e) / (1.0 - p_e)


def krippendorff_alpha(values_by_item: Iterable[Sequence[str]] | LabelMatrix) -> float | None:
    """Krippendorff's alpha with the nominal difference function.

    Builds the coincidence matrix over all pairable values (items with at
    least two ratings): o_ck = sum_u n_uc(n_uk - d_ck) / (m_u - 1). Then
    alpha = 1 - D_o/D_e with D_o the off-diagonal coincidence mass over n and
    D_e the expected disagreement from the marginals. Returns ``None`` when
    D_e = 0 (a single category across all ratings).
    """
    if isinstance(values_by_item, LabelMatrix):
        rows: Iterable[Sequence[str]] = values_by_item.cells
    else:
        rows = values_by_item
    coincidence: dict[tuple[str, str], float] = {}
    marginals: Counter = Counter()
    n_total = 0.0
    for row in rows:
        m = len(row)
        if m < 2:
            continue
        counts = Counter(row)
        for c, n_c in counts.items():
            marginals[c] += n_c
            n_total += n_c
            for k, n_k in counts.items():
                pairs = n_c * (n_k - (1 if c == k else 0)) / (m - 1)
                if pairs:
                    coincidence[(c, k)] = coincidence.get((c, k), 0.0) + pairs
    if n_total < 2 or len(marginals) == 0:
        return None
    if len(marginals) == 1:
        return None  # expected disagreement is zero
    d_o = sum(v for (c, k), v in coincidence.items() if c != k) / n_total
    cats = sorted(marginals)
    d_e = sum(
        marginals[c] * marginals[k] for c in cats for k in cats if c != k
    ) / (n_total * (n_total - 1))
    return 1.0 - d_o / d_e


def agreement_report(matrix: LabelMatrix) -> AgreementReport:
    return AgreementReport(
        cohen_kappa=cohen_kappa_mean(matrix),
        fleiss_kappa=fleiss_kappa(matrix),
        krippendorff_alpha=krippendorff_alpha(matrix),
        n_items=matrix.n_items,
        n_raters=matrix.n_raters,
    )


def stratified_split(
    gold: Sequence[GoldLabel], train_n: int, seed: int
) -> tuple[list[GoldLabel], list[GoldLabel]]:
    """Split gold labels into train/test, stratified by category.

    Train quotas follow the gold category proportions within one item
    (largest remainder); selection within a category is a seeded shuffle.
    Deterministic given (gold, train_n, seed); outputs are sorted by item_id.
    """
    if train_n >= len(gold):
        raise ValueError(f"train_n {train_n} must be smaller than the gold set ({len(gold)})")
    counts = Counter(g.label.value for g in gold)
    quotas = _proportional_quotas(counts, train_n)
    for cat, q in quotas.items():
        if q > counts[cat]:
            quotas = _cap_quotas(quotas, counts)
            break
    rng = np.random.default_rng(seed)
    train: list[GoldLabel] = []
    test: list[GoldLabel] = []
    for cat in CATEGORY_ORDER:
        members = sorted((g for g in gold if g.label.value == cat), key=lambda g: g.item_id)
        if not members:
            continue
        idx = np.arange(len(members))
        rng.shuffle(idx)
        chosen = set(idx[: quotas.get(cat, 0)].tolist())
        for i, g in enumerate(members):
            (train if i in chosen else test).append(g)
    train.sort(key=lambda g: g.item_id)
    test.sort(key=lambda g: g.item_id)
    return train, test

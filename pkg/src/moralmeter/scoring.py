"""Pluggable six-emotion scorers, primary-emotion assignment, and evaluation.

A scorer maps one video record (title + thumbnail reference) to six
independent probabilities, one per category. Three kinds are provided:

* ``remote_service`` posts to an external classifier service and parses six
  named probabilities; out-of-range payloads are rejected, never clamped.
* ``file_replay`` looks up precomputed scores by video_id.
* ``lexicon_baseline`` computes deterministic scores from keyword lists
  shipped as data files (offline end-to-end testing only, not a model).
"""

from __future__ import annotations

import json
import re
import time
import warnings
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import httpx

from .annotation import GoldLabel
from .categories import CATEGORY_ORDER, EmotionCategory
from .corpus import VideoRecord
from .errors import MissingScoreError, ProtocolError, ScoringError

SCORER_KINDS = ("remote_service", "lexicon_baseline", "file_replay")


@dataclass(frozen=True)
class EmotionScores:
    """Six per-category probabilities in [0, 1]; they need not sum to 1."""

    scores: dict[str, float]

    def __post_init__(self):
        if set(self.scores) != set(CATEGORY_ORDER):
            raise ValueError(f"scores must have exactly the six category keys, got {sorted(self.scores)}")
        for token, value in self.scores.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ValueError(f"{token}: probability must be a number")
            if not 0.0 <= float(value) <= 1.0:
                raise ValueError(f"{token}: probability {value} outside [0, 1]")

    def __getitem__(self, token: str) -> float:
        return float(self.scores[token])

    def as_dict(self) -> dict[str, float]:
        return {tok: float(self.scores[tok]) for tok in CATEGORY_ORDER}


@dataclass(frozen=True)
class ScorerDescriptor:
    kind: str
    language: str
    version: str = "0"
    endpoint: str | None = None

    def __post_init__(self):
        if self.kind not in SCORER_KINDS:
            raise ValueError(f"kind must be one of {SCORER_KINDS}")
        if self.kind == "remote_service" and not self.endpoint:
            raise ValueError("remote_service requires an endpoint")
        if self.kind != "remote_service" and self.endpoint:
            raise ValueError(f"{self.kind} does not take an endpoint")
        if self.language not in ("KO", "EN"):
            raise ValueError("language must be KO or EN")


class LexiconScorer:
    """Deterministic keyword-count baseline.

    Each non-neutral category scores hits/(hits+1) keyword matches in the
    title; neutral scores 1/(1+total hits), so a title with no lexicon word
    scores 0 everywhere except neutral = 1. ASCII terms match on word
    boundaries, non-ASCII terms (Korean) as substrings.
    """

    def __init__(self, language: str, lexicon: Mapping[str, Sequence[str]] | None = None):
        self.language = language
        if lexicon is None:
            name = "lexicon_ko.json" if language == "KO" else "lexicon_en.json"
            with resources.files("moralmeter.data").joinpath(name).open(encoding="utf-8") as fh:
                lexicon = json.load(fh)
        self._patterns: dict[str, list[re.Pattern]] = {}
        for token, terms in lexicon.items():
            pats = []
            for term in terms:
                folded = term.casefold()
                if folded.isascii():
                    pats.append(re.compile(rf"\b{re.escape(folded)}\b"))
                else:
                    pats.append(re.compile(re.escape(folded)))
            self._patterns[token] = pats

    def score(self, record: VideoRecord) -> EmotionScores:
        title = record.title.casefold()
        hits = {
            tok: sum(1 for p in self._patterns.get(tok, []) if p.search(title))
            for tok in CATEGORY_ORDER
            if tok != "neutral"
        }
        total = sum(hits.values())
        scores = {tok: h / (h + 1.0) for tok, h in hits.items()}
        scores["neutral"] = 1.0 / (1.0 + total)
        return EmotionScores(scores)


class FileReplayScorer:
    """Serves precomputed scores from a line-delimited score file."""

    def __init__(self, path: str | Path):
        self._scores: dict[str, EmotionScores] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                obj = json.loads(line)
                self._scores[obj["video_id"]] = EmotionScores(
                    {tok: float(v) for tok, v in obj["scores"].items()}
                )

    def __len__(self) -> int:
        return len(self._scores)

    def score(self, record: VideoRecord) -> EmotionScores:
        try:
            return self._scores[record.video_id]
        except KeyError:
            raise MissingScoreError(
                f"no replay score for video {record.video_id}", video_id=record.video_id
            ) from None

    def all_scores(self) -> dict[str, EmotionScores]:
        return dict(self._scores)


class RemoteScorer:
    """Client for an external scoring service.

    One POST per record to ``{endpoint}/score`` carrying the title text and
    thumbnail reference; retries timeouts and 5xx responses with bounded
    exponential backoff before giving up with a :class:`ScoringError`.
    """

    def __init__(
        self,
        endpoint: str,
        language: str,
        timeout: float = 10.0,
        max_attempts: int = 3,
        backoff: float = 0.1,
        client: httpx.Client | None = None,
    ):
        self.endpoint = endpoint.rstrip("/")
        self.language = language
        self.timeout = timeout
        self.max_attempts = max_attempts
        self.backoff = backoff
        self._client = client or httpx.Client(timeout=timeout)

    def score(self, record: VideoRecord) -> EmotionScores:
        payload = {
            "video_id": record.video_id,
            "title": record.title,
            "thumbnail_url": record.thumbnail_ref,
            "language": self.language,
            "categories": list(CATEGORY_ORDER),
        }
        last_error: Exception | None = None
        for attempt in range(self.max_attempts):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                response = self._client.post(f"{self.endpoint}/score", json=payload)
            except httpx.HTTPError as exc:
                last_error = exc
                continue
            if response.status_code >= 500:
                last_error = ScoringError(
                    f"server error {response.status_code}", video_id=record.video_id
                )
                continue
            if response.status_code != 200:
                raise ProtocolError(
                    f"unexpected status {response.status_code} for video {record.video_id}",
                    video_id=record.video_id,
                )
            return self._parse(response, record.video_id)
        raise ScoringError(
            f"scoring failed for video {record.video_id} after {self.max_attempts} attempts: {last_error}",
            video_id=record.video_id,
        )

    @staticmethod
    def _parse(response: httpx.Response, video_id: str) -> EmotionScores:
        try:
            body = response.json()
            raw = body["scores"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ProtocolError(
                f"malformed response for video {video_id}: {exc}", video_id=video_id
            ) from exc
        missing = [tok for tok in CATEGORY_ORDER if tok not in raw]
        if missing:
            raise ProtocolError(
                f"response for video {video_id} missing categories {missing}", video_id=video_id
            )
        try:
            return EmotionScores({tok: float(raw[tok]) for tok in CATEGORY_ORDER})
        except (TypeError, ValueError) as exc:
            raise ProtocolError(
                f"response for video {video_id} rejected: {exc}", video_id=video_id
            ) from exc


def make_scorer(
    descriptor: ScorerDescriptor,
    scores_path: str | Path | None = None,
    **remote_kwargs,
):
    if descriptor.kind == "lexicon_baseline":
        return LexiconScorer(descriptor.language)
    if descriptor.kind == "file_replay":
        if scores_path is None:
            raise ValueError("file_replay scorer needs a scores_path")
        return FileReplayScorer(scores_path)
    return RemoteScorer(descriptor.endpoint, descriptor.language, **remote_kwargs)


def score_many(
    records: Sequence[VideoRecord], scorer, max_in_flight: int = 8
) -> dict[str, EmotionScores]:
    """Score records concurrently with a bounded number of in-flight calls."""
    with ThreadPoolExecutor(max_workers=max_in_flight) as pool:
        results = list(pool.map(scorer.score, records))
    return {rec.video_id: scores for rec, scores in zip(records, results)}


def primary_emotion(scores: EmotionScores) -> EmotionCategory:
    """Category with the highest probability; ties break by canonical order."""
    best = max(CATEGORY_ORDER, key=lambda tok: (scores[tok], -CATEGORY_ORDER.index(tok)))
    return EmotionCategory(best)


def distribution(scored: Iterable[EmotionScores]) -> dict[str, float]:
    """Proportion of each category as the primary emotion over a dataset."""
    counts = Counter()
    n = 0
    for scores in scored:
        counts[primary_emotion(scores).value] += 1
        n += 1
    if n == 0:
        raise ValueError("empty scored dataset")
    return {tok: counts[tok] / n for tok in CATEGORY_ORDER}


@dataclass(frozen=True)
class EvalReport:
    per_category: dict[str, dict[str, float]]
    avg_accuracy: float
    avg_macro_f1: float


def _binary_f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        warnings.warn("empty-support class: F1 defined as 0")
        return 0.0
    return 2 * tp / denom


def evaluate(
    predicted: Mapping[str, bool], gold: Sequence[GoldLabel], category: EmotionCategory | str
) -> dict[str, float]:
    """Binary accuracy and macro F1 for one category against gold labels.

    An item is positive iff its gold label equals the category. Macro F1
    averages the F1 of the positive and the negative class.
    """
    token = category.value if isinstance(category, EmotionCategory) else category
    missing = [g.item_id for g in gold if g.item_id not in predicted]
    if missing:
        raise ValueError(f"predictions missing for items: {missing[:5]}")
    tp = fp = fn = tn = 0
    for g in gold:
        truth = g.label.value == token
        pred = bool(predicted[g.item_id])
        if truth and pred:
            tp += 1
        elif truth:
            fn += 1
        elif pred:
            fp += 1
        else:
            tn += 1
    n = tp + fp + fn + tn
    accuracy = (tp + tn) / n
    macro_f1 = (_binary_f1(tp, fp, fn) + _binary_f1(tn, fn, fp)) / 2.0
    return {"accuracy": accuracy, "macro_f1": macro_f1}


def evaluate_all(
    predicted_by_category: Mapping[str, Mapping[str, bool]], gold: Sequence[GoldLabel]
) -> EvalReport:
    per_category = {
        tok: evaluate(predicted_by_category[tok], gold, tok) for tok in CATEGORY_ORDER
    }
    return EvalReport(
        per_category=per_category,
        avg_accuracy=sum(r["accuracy"] for r in per_category.values()) / len(per_category),
        avg_macro_f1=sum(r["macro_f1"] for r in per_category.values()) / len(per_category),
    )

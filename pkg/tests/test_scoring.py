import json
import threading

import httpx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES, make_record, make_scores, write_jsonl

from moralmeter import (
    CATEGORY_ORDER,
    EmotionCategory,
    EmotionScores,
    FileReplayScorer,
    GoldLabel,
    LexiconScorer,
    MissingScoreError,
    ProtocolError,
    RemoteScorer,
    ScorerDescriptor,
    ScoringError,
    distribution,
    evaluate,
    evaluate_all,
    make_scorer,
    primary_emotion,
    score_many,
)


# ---------------------------------------------------------------- EmotionScores


def test_scores_require_all_six_keys():
    with pytest.raises(ValueError, match="six category keys"):
        EmotionScores({"neutral": 0.5})


def test_scores_reject_out_of_range():
    values = {tok: 0.5 for tok in CATEGORY_ORDER}
    values["neutral"] = 1.2
    with pytest.raises(ValueError, match="outside"):
        EmotionScores(values)
    values["neutral"] = -0.1
    with pytest.raises(ValueError, match="outside"):
        EmotionScores(values)


def test_scores_reject_non_numbers():
    values = {tok: 0.5 for tok in CATEGORY_ORDER}
    values["neutral"] = "high"
    with pytest.raises(ValueError, match="must be a number"):
        EmotionScores(values)
    values["neutral"] = True
    with pytest.raises(ValueError, match="must be a number"):
        EmotionScores(values)


def test_scores_as_dict_canonical_order():
    scores = make_scores()
    assert list(scores.as_dict()) == list(CATEGORY_ORDER)
    assert scores["other_condemning"] == 0.1


# ---------------------------------------------------------------- descriptor


def test_descriptor_endpoint_rules():
    with pytest.raises(ValueError, match="requires an endpoint"):
        ScorerDescriptor(kind="remote_service", language="KO")
    with pytest.raises(ValueError, match="does not take an endpoint"):
        ScorerDescriptor(kind="file_replay", language="KO", endpoint="http://x")
    with pytest.raises(ValueError, match="kind"):
        ScorerDescriptor(kind="oracle", language="KO")
    with pytest.raises(ValueError, match="language"):
        ScorerDescriptor(kind="file_replay", language="FR")


def test_make_scorer_dispatch(tmp_path):
    replay_path = write_jsonl(
        tmp_path / "s.jsonl", [{"video_id": "v1", "scores": make_scores().as_dict()}]
    )
    replay = make_scorer(ScorerDescriptor("file_replay", "EN"), scores_path=replay_path)
    assert isinstance(replay, FileReplayScorer)
    with pytest.raises(ValueError, match="scores_path"):
        make_scorer(ScorerDescriptor("file_replay", "EN"))
    lex = make_scorer(ScorerDescriptor("lexicon_baseline", "EN"))
    assert isinstance(lex, LexiconScorer)
    remote = make_scorer(
        ScorerDescriptor("remote_service", "KO", endpoint="http://svc.test"), backoff=0.0
    )
    assert isinstance(remote, RemoteScorer)
    assert remote.endpoint == "http://svc.test"


# ---------------------------------------------------------------- lexicon baseline


def test_lexicon_no_hits_is_pure_neutral():
    scorer = LexiconScorer("EN", lexicon={"other_condemning": ["outrage"]})
    scores = scorer.score(make_record("v1", title="Weather update for Tuesday"))
    assert scores["neutral"] == 1.0
    assert scores["other_condemning"] == 0.0


def test_lexicon_hit_arithmetic():
    scorer = LexiconScorer(
        "EN",
        lexicon={
            "other_condemning": ["outrage", "scandal"],
            "other_praising": ["hero"],
        },
    )
    scores = scorer.score(make_record("v1", title="Outrage over scandal as hero speaks"))
    assert scores["other_condemning"] == pytest.approx(2.0 / 3.0)
    assert scores["other_praising"] == pytest.approx(0.5)
    assert scores["neutral"] == pytest.approx(1.0 / 4.0)


def test_lexicon_ascii_needs_word_boundary():
    scorer = LexiconScorer("EN", lexicon={"other_condemning": ["rage"]})
    inside = scorer.score(make_record("v1", title="storage prices fall"))
    assert inside["other_condemning"] == 0.0
    exact = scorer.score(make_record("v2", title="rage at the council meeting"))
    assert exact["other_condemning"] == 0.5


def test_lexicon_korean_matches_substring():
    scorer = LexiconScorer("KO", lexicon={"other_condemning": ["분노"]})
    scores = scorer.score(make_record("v1", title="시민들 분노했다"))
    assert scores["other_condemning"] == 0.5


def test_lexicon_bundled_data_loads():
    for lang in ("KO", "EN"):
        scorer = LexiconScorer(lang)
        scores = scorer.score(make_record("v1", title="nothing special"))
        assert set(scores.as_dict()) == set(CATEGORY_ORDER)


# ---------------------------------------------------------------- file replay


def test_replay_scorer_roundtrip(tmp_path):
    path = write_jsonl(
        tmp_path / "scores.jsonl",
        [
            {"video_id": "v1", "scores": make_scores(0.9).as_dict()},
            {"video_id": "v2", "scores": make_scores(0.2).as_dict()},
        ],
    )
    scorer = FileReplayScorer(path)
    assert len(scorer) == 2
    assert scorer.score(make_record("v1"))["other_condemning"] == 0.9
    assert set(scorer.all_scores()) == {"v1", "v2"}


def test_replay_scorer_missing_video(tmp_path):
    path = write_jsonl(tmp_path / "s.jsonl", [{"video_id": "v1", "scores": make_scores().as_dict()}])
    scorer = FileReplayScorer(path)
    with pytest.raises(MissingScoreError, match="ghost") as err:
        scorer.score(make_record("ghost"))
    assert err.value.video_id == "ghost"


def test_fixture_scores_cover_fixture_corpus(corpus, fixture_scores):
    assert {r.video_id for r in corpus} <= set(fixture_scores)


# ---------------------------------------------------------------- remote scorer


def remote(handler, **kwargs):
    client = httpx.Client(transport=httpx.MockTransport(handler))
    kwargs.setdefault("backoff", 0.0)
    return RemoteScorer("http://svc.test", "KO", client=client, **kwargs)


def ok_payload(**overrides):
    scores = {tok: 0.1 for tok in CATEGORY_ORDER}
    scores.update(overrides)
    return {"scores": scores}


def test_remote_scorer_success_and_payload_fields():
    seen = {}

    def handler(request):
        seen["url"] = str(request.url)
        seen["body"] = json.loads(request.content)
        return httpx.Response(200, json=ok_payload(other_condemning=0.8))

    scores = remote(handler).score(make_record("v1", title="T", thumbnail_ref="http://t/x.jpg"))
    assert scores["other_condemning"] == 0.8
    assert seen["url"] == "http://svc.test/score"
    body = seen["body"]
    assert body["video_id"] == "v1"
    assert body["title"] == "T"
    assert body["thumbnail_url"] == "http://t/x.jpg"
    assert body["language"] == "KO"
    assert body["categories"] == list(CATEGORY_ORDER)


def test_remote_scorer_retries_transient_500():
    calls = {"n": 0}

    def handler(request):
        calls["n"] += 1
        if calls["n"] < 3:
            return httpx.Response(503, text="busy")
        return httpx.Response(200, json=ok_payload())

    scores = remote(handler).score(make_record("v1"))
    assert calls["n"] == 3
    assert scores["neutral"] == 0.1


def test_remote_scorer_gives_up_after_max_attempts():
    calls = {"n": 0}

    def handler(request):
        calls["n"] += 1
        return httpx.Response(500, text="down")

    with pytest.raises(ScoringError, match="after 3 attempts") as err:
        remote(handler, max_attempts=3).score(make_record("v9"))
    assert calls["n"] == 3
    assert err.value.video_id == "v9"


def test_remote_scorer_retries_network_errors():
    calls = {"n": 0}

    def handler(request):
        calls["n"] += 1
        if calls["n"] == 1:
            raise httpx.ConnectError("boom")
        return httpx.Response(200, json=ok_payload())

    assert remote(handler).score(make_record("v1"))["neutral"] == 0.1
    assert calls["n"] == 2


def test_remote_scorer_4xx_is_protocol_error_no_retry():
    calls = {"n": 0}

    def handler(request):
        calls["n"] += 1
        return httpx.Response(404, text="nope")

    with pytest.raises(ProtocolError, match="unexpected status 404"):
        remote(handler).score(make_record("v1"))
    assert calls["n"] == 1


def test_remote_scorer_malformed_body():
    def handler(request):
        return httpx.Response(200, text="not json")

    with pytest.raises(ProtocolError, match="malformed"):
        remote(handler).score(make_record("v1"))


def test_remote_scorer_missing_category():
    def handler(request):
        payload = ok_payload()
        del payload["scores"]["non_moral"]
        return httpx.Response(200, json=payload)

    with pytest.raises(ProtocolError, match="missing categories"):
        remote(handler).score(make_record("v1"))


def test_remote_scorer_rejects_out_of_range_instead_of_clamping():
    def handler(request):
        return httpx.Response(200, json=ok_payload(neutral=1.7))

    with pytest.raises(ProtocolError, match="rejected"):
        remote(handler).score(make_record("v1"))


def test_score_many_keeps_record_order_and_bounds_concurrency():
    lock = threading.Lock()
    state = {"active": 0, "peak": 0}

    class CountingScorer:
        def score(self, record):
            with lock:
                state["active"] += 1
                state["peak"] = max(state["peak"], state["active"])
            try:
                threading.Event().wait(0.005)
                return make_scores()
            finally:
                with lock:
                    state["active"] -= 1

    records = [make_record(f"v{k}") for k in range(24)]
    out = score_many(records, CountingScorer(), max_in_flight=4)
    assert set(out) == {r.video_id for r in records}
    assert state["peak"] <= 4


# ---------------------------------------------------------------- primary emotion


def test_primary_emotion_argmax():
    assert primary_emotion(make_scores(0.9)) is EmotionCategory.OTHER_CONDEMNING
    assert primary_emotion(make_scores(0.1, non_moral=0.4)) is EmotionCategory.NON_MORAL


def test_primary_emotion_tie_breaks_canonically():
    flat = EmotionScores({tok: 0.5 for tok in CATEGORY_ORDER})
    assert primary_emotion(flat) is EmotionCategory.OTHER_CONDEMNING
    pair = make_scores(0.1, other_suffering=0.7, neutral=0.7)
    assert primary_emotion(pair) is EmotionCategory.OTHER_SUFFERING


@given(st.lists(st.floats(0, 1), min_size=6, max_size=6))
@settings(max_examples=100, deadline=None)
def test_primary_emotion_is_an_argmax(values):
    scores = EmotionScores(dict(zip(CATEGORY_ORDER, values)))
    top = primary_emotion(scores)
    assert scores[top.value] == max(values)


def test_distribution_sums_to_one():
    scored = [make_scores(0.9), make_scores(0.9), make_scores(0.1, neutral=0.8)]
    dist = distribution(scored)
    assert list(dist) == list(CATEGORY_ORDER)
    assert sum(dist.values()) == pytest.approx(1.0)
    assert dist["other_condemning"] == pytest.approx(2.0 / 3.0)
    assert dist["neutral"] == pytest.approx(1.0 / 3.0)


def test_distribution_empty_input():
    with pytest.raises(ValueError, match="empty"):
        distribution([])


# ---------------------------------------------------------------- evaluation


def gold_for(labels):
    return [GoldLabel(f"i{k}", EmotionCategory(cat), 3) for k, cat in enumerate(labels)]


def test_evaluate_hand_computed():
    gold = gold_for(["neutral", "neutral", "non_moral", "other_condemning", "non_moral"])
    predicted = {"i0": True, "i1": False, "i2": False, "i3": True, "i4": False}
    # tp=1 fn=1 tn=2 fp=1 -> accuracy 3/5; F1+ = 2/(2+1+1)=0.5, F1- = 4/(4+1+1)=2/3
    out = evaluate(predicted, gold, "neutral")
    assert out["accuracy"] == pytest.approx(0.6)
    assert out["macro_f1"] == pytest.approx((0.5 + 2.0 / 3.0) / 2.0)


def test_evaluate_missing_predictions():
    gold = gold_for(["neutral", "non_moral"])
    with pytest.raises(ValueError, match="missing for items"):
        evaluate({"i0": True}, gold, "neutral")


def test_evaluate_empty_support_warns():
    gold = gold_for(["neutral", "neutral"])
    predicted = {"i0": True, "i1": True}
    with pytest.warns(UserWarning, match="empty-support"):
        out = evaluate(predicted, gold, "neutral")
    assert out["accuracy"] == 1.0
    assert out["macro_f1"] == pytest.approx(0.5)


def test_evaluate_accepts_enum_or_token():
    gold = gold_for(["neutral", "non_moral"])
    predicted = {"i0": True, "i1": False}
    as_token = evaluate(predicted, gold, "neutral")
    as_enum = evaluate(predicted, gold, EmotionCategory.NEUTRAL)
    assert as_token == as_enum


def test_evaluate_all_averages():
    gold = gold_for(["neutral", "non_moral", "other_condemning"])
    predicted_by_cat = {
        tok: {g.item_id: g.label.value == tok for g in gold} for tok in CATEGORY_ORDER
    }
    import warnings as w

    with w.catch_warnings():
        w.simplefilter("ignore")  # three categories have no positive support
        report = evaluate_all(predicted_by_cat, gold)
    assert report.avg_accuracy == pytest.approx(1.0)
    assert set(report.per_category) == set(CATEGORY_ORDER)

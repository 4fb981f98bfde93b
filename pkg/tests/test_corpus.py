import json
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import FIXTURES, channel_dict, make_record, oracle, record_dict, write_jsonl

from moralmeter import (
    DegenerateInputError,
    InsufficientDataError,
    ToolkitError,
    descriptive_stats,
    engagement_ratios,
    load_dataset,
    load_registry,
    summarize,
)


@pytest.fixture()
def small_registry(tmp_path):
    path = write_jsonl(
        tmp_path / "channels.jsonl",
        [channel_dict("ch1", "KO"), channel_dict("ch2", "US")],
    )
    return load_registry(path)


# ---------------------------------------------------------------- registry


def test_load_registry_parses_channels(small_registry):
    assert set(small_registry) == {"ch1", "ch2"}
    assert small_registry["ch2"].country == "US"
    assert small_registry["ch1"].creation_date.year == 2010


def test_load_registry_rejects_duplicate_channel(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [channel_dict("ch1"), channel_dict("ch1")])
    with pytest.raises(ToolkitError, match="duplicate channel_id"):
        load_registry(path)


def test_load_registry_rejects_empty_file(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text("")
    with pytest.raises(ToolkitError, match="empty"):
        load_registry(path)


def test_load_registry_rejects_bad_line(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(channel_dict("ch1")) + "\n{not json\n")
    with pytest.raises(ToolkitError, match="registry line 2"):
        load_registry(path)


def test_load_registry_rejects_bad_country(tmp_path):
    path = write_jsonl(tmp_path / "c.jsonl", [channel_dict("ch1", country="FR")])
    with pytest.raises(ToolkitError, match="country"):
        load_registry(path)


def test_load_registry_missing_file():
    with pytest.raises(OSError):
        load_registry("/nonexistent/channels.jsonl")


# ---------------------------------------------------------------- dataset loading


def test_load_dataset_accepts_valid_records(small_registry, tmp_path):
    path = write_jsonl(
        tmp_path / "d.jsonl",
        [record_dict("v1"), record_dict("v2", channel_id="ch2", country="US")],
    )
    result = load_dataset(path, small_registry)
    assert [r.video_id for r in result.records] == ["v1", "v2"]
    assert result.rejections == []


def test_load_dataset_null_engagement_is_preserved(small_registry, tmp_path):
    path = write_jsonl(tmp_path / "d.jsonl", [record_dict("v1", likes=None, comments=None)])
    result = load_dataset(path, small_registry)
    rec = result.records[0]
    assert rec.likes is None and rec.comments is None
    assert rec.views == 100


@pytest.mark.parametrize(
    "patch, reason",
    [
        ({"channel_id": "ghost"}, "unknown channel"),
        ({"country": "US"}, "does not match channel"),
        ({"upload_date": "2021-07-01"}, "upload_date is after retrieved_at"),
        ({"views": -1}, "views must be non-negative"),
        ({"views": None}, "views is required"),
        ({"views": 1.5}, "views must be an integer"),
        ({"likes": -3}, "likes must be non-negative"),
        ({"duration_seconds": "long"}, "duration_seconds must be an integer"),
        ({"upload_date": "not-a-date"}, "not a valid ISO-8601 date"),
        ({"title": 7}, "title must be a string"),
        ({"video_id": ""}, "video_id must be a non-empty string"),
    ],
)
def test_load_dataset_rejects_invalid_record(small_registry, tmp_path, patch, reason):
    row = record_dict("v1")
    row.update(patch)
    path = write_jsonl(tmp_path / "d.jsonl", [row])
    result = load_dataset(path, small_registry)
    assert result.records == []
    assert len(result.rejections) == 1
    rej = result.rejections[0]
    assert rej.line_no == 1
    assert reason in rej.reason


def test_load_dataset_rejects_malformed_line_and_keeps_rest(small_registry, tmp_path):
    path = tmp_path / "d.jsonl"
    path.write_text(json.dumps(record_dict("v1")) + "\n{oops\n" + json.dumps(record_dict("v2")) + "\n")
    result = load_dataset(path, small_registry)
    assert [r.video_id for r in result.records] == ["v1", "v2"]
    assert len(result.rejections) == 1
    assert result.rejections[0].line_no == 2
    assert "malformed line" in result.rejections[0].reason


def test_load_dataset_duplicate_keeps_first(small_registry, tmp_path):
    path = write_jsonl(
        tmp_path / "d.jsonl",
        [record_dict("v1", views=100), record_dict("v1", views=999)],
    )
    result = load_dataset(path, small_registry)
    assert len(result.records) == 1
    assert result.records[0].views == 100
    assert result.rejections[0].reason == "duplicate video_id"
    assert result.rejections[0].video_id == "v1"


def test_load_dataset_empty_registry(tmp_path):
    path = write_jsonl(tmp_path / "d.jsonl", [record_dict("v1")])
    with pytest.raises(ToolkitError, match="registry is empty"):
        load_dataset(path, {})


def test_load_dataset_missing_file(small_registry):
    with pytest.raises(OSError):
        load_dataset("/nonexistent/data.jsonl", small_registry)


def test_fixture_corpus_counts_match_manifest(corpus):
    with open(FIXTURES / "manifest.json", encoding="utf-8") as fh:
        manifest = json.load(fh)
    assert len(corpus) == manifest["n_records"]
    per_channel = {}
    for rec in corpus:
        per_channel[rec.channel_id] = per_channel.get(rec.channel_id, 0) + 1
    assert per_channel == manifest["per_channel"]
    per_country = {}
    for rec in corpus:
        per_country[rec.country] = per_country.get(rec.country, 0) + 1
    assert per_country == manifest["per_country"]


# ---------------------------------------------------------------- summarize


def test_summarize_constant_series():
    stats = summarize([4.0, 4.0, 4.0])
    assert stats.n == 3
    assert stats.mean == 4.0
    assert stats.median == 4.0
    assert stats.sd == 0.0
    assert stats.skewness is None and stats.kurtosis is None


def test_summarize_known_values():
    # frozen from a direct two-pass moment computation
    stats = summarize([1.0, 2.0, 3.0, 4.0, 100.0])
    assert stats.mean == pytest.approx(22.0, abs=1e-12)
    assert stats.median == 3.0
    assert stats.sd == pytest.approx(43.617656975128774, rel=1e-12)
    assert stats.skewness == pytest.approx(2.232395911636458, rel=1e-12)
    assert stats.kurtosis == pytest.approx(4.986865957200655, rel=1e-12)
    assert stats.min == 1.0 and stats.max == 100.0


def test_summarize_needs_two_observations():
    with pytest.raises(InsufficientDataError, match="at least 2"):
        summarize([5.0])


def test_summarize_small_n_moment_guards():
    # skewness needs n >= 3, kurtosis needs n >= 4
    two = summarize([1.0, 2.0])
    assert two.skewness is None and two.kurtosis is None
    three = summarize([1.0, 2.0, 4.0])
    assert three.skewness is not None and three.kurtosis is None


@given(st.lists(st.floats(-1e6, 1e6), min_size=4, max_size=60), st.randoms())
@settings(max_examples=60, deadline=None)
def test_summarize_permutation_invariant(values, rnd):
    shuffled = list(values)
    rnd.shuffle(shuffled)
    a, b = summarize(values), summarize(shuffled)
    assert a.mean == b.mean and a.sd == b.sd
    assert a.skewness == b.skewness and a.kurtosis == b.kurtosis


@given(
    st.lists(st.floats(-1e3, 1e3), min_size=4, max_size=40),
    st.floats(-1e3, 1e3),
)
@settings(max_examples=60, deadline=None)
def test_summarize_shift_leaves_shape_alone(values, shift):
    base = summarize(values)
    moved = summarize([v + shift for v in values])
    assert moved.mean == pytest.approx(base.mean + shift, abs=1e-6)
    assert moved.sd == pytest.approx(base.sd, abs=1e-6)
    if base.skewness is not None and base.sd > 1e-6:
        assert moved.skewness == pytest.approx(base.skewness, abs=1e-5)


@given(st.lists(st.floats(-100, 100), min_size=4, max_size=40), st.floats(0.5, 10.0))
@settings(max_examples=60, deadline=None)
def test_summarize_scale_scales_sd(values, scale):
    base = summarize(values)
    scaled = summarize([v * scale for v in values])
    assert scaled.sd == pytest.approx(base.sd * scale, rel=1e-9, abs=1e-9)


@given(st.lists(st.floats(-50, 50), min_size=4, max_size=30))
@settings(max_examples=60, deadline=None)
def test_summarize_matches_naive_moments(values):
    stats = summarize(values)
    n = len(values)
    mean = sum(values) / n
    m2 = sum((v - mean) ** 2 for v in values) / n
    assert stats.sd == pytest.approx(math.sqrt(m2 * n / (n - 1)), abs=1e-9)


# ---------------------------------------------------------------- per-country stats


def test_descriptive_stats_excludes_missing_metric():
    recs = [
        make_record("v1", likes=10),
        make_record("v2", likes=None),
        make_record("v3", likes=20),
    ]
    stats = descriptive_stats(recs, "likes", "KO")
    assert stats.n == 2
    assert stats.mean == 15.0


def test_descriptive_stats_unknown_metric():
    with pytest.raises(ValueError, match="country"):
        descriptive_stats([make_record("v1")], "views", "FR")
    with pytest.raises(ValueError, match="unknown metric"):
        make_record("v1").metric("dislikes")


def test_descriptive_stats_insufficient():
    with pytest.raises(InsufficientDataError):
        descriptive_stats([make_record("v1")], "views", "KO")


def test_engagement_ratios_hand_case():
    recs = [
        make_record("v1", views=100, comments=50),
        make_record("v2", views=300, comments=30),
    ]
    ratios = engagement_ratios(recs, "KO")
    assert ratios["median_to_mean_views"] == pytest.approx(200.0 / 200.0)
    assert ratios["comment_intensity"] == pytest.approx(80.0 / 400.0)


def test_engagement_ratios_comments_equal_views():
    recs = [make_record("v1", views=70, comments=70), make_record("v2", views=30, comments=30)]
    assert engagement_ratios(recs, "KO")["comment_intensity"] == pytest.approx(1.0)


def test_engagement_ratios_skips_missing_comment_rows():
    recs = [
        make_record("v1", views=100, comments=10),
        make_record("v2", views=900, comments=None),
    ]
    # intensity denominator only counts rows where comments are present
    assert engagement_ratios(recs, "KO")["comment_intensity"] == pytest.approx(0.1)


def test_engagement_ratios_zero_views_degenerate():
    recs = [make_record("v1", views=0), make_record("v2", views=0)]
    with pytest.raises(DegenerateInputError):
        engagement_ratios(recs, "KO")


def test_engagement_ratios_no_records():
    with pytest.raises(InsufficientDataError):
        engagement_ratios([make_record("v1", country="KO")], "US")


# ---------------------------------------------------------------- oracle comparison


def test_fixture_describe_matches_oracle(corpus):
    expect = oracle("describe_oracle.json")
    for country, block in expect.items():
        for metric, vals in block["stats"].items():
            stats = descriptive_stats(corpus, metric, country)
            assert stats.n == vals["n"]
            assert stats.mean == pytest.approx(vals["mean"], rel=1e-9)
            assert stats.median == pytest.approx(vals["median"], rel=1e-9)
            assert stats.sd == pytest.approx(vals["sd"], rel=1e-9)
            assert stats.min == vals["min"] and stats.max == vals["max"]
            assert stats.skewness == pytest.approx(vals["skewness"], rel=1e-9)
            assert stats.kurtosis == pytest.approx(vals["kurtosis"], rel=1e-9)
        ratios = engagement_ratios(corpus, country)
        assert ratios["median_to_mean_views"] == pytest.approx(
            block["ratios"]["median_to_mean_views"], rel=1e-9
        )
        assert ratios["comment_intensity"] == pytest.approx(
            block["ratios"]["comment_intensity"], rel=1e-9
        )

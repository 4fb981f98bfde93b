import shutil

import pytest
import yaml

from helpers import FIXTURES

from moralmeter import ConfigError, apply_seed_overrides, load_config

CONFIG = FIXTURES / "config.yaml"


def rewrite(tmp_path, mutate):
    """Copy the fixture config + inputs to tmp, mutate the mapping, save."""
    with open(CONFIG, encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    for name in (
        "dataset.jsonl",
        "channels.jsonl",
        "scores_200.jsonl",
        "growth.jsonl",
        "pilot_labels.jsonl",
        "clusters.jsonl",
    ):
        shutil.copy(FIXTURES / name, tmp_path / name)
    mutate(raw)
    out = tmp_path / "config.yaml"
    with open(out, "w", encoding="utf-8") as fh:
        yaml.safe_dump(raw, fh)
    return out


def test_load_fixture_config():
    config = load_config(CONFIG)
    assert config.dataset_path == FIXTURES / "dataset.jsonl"
    assert config.registry_path == FIXTURES / "channels.jsonl"
    assert config.language == "EN"
    assert config.growth_windows == ((1, 10), (51, 60))
    assert [s.response for s in config.model_specs] == ["views"]
    assert config.bootstrap.reps == 50
    assert config.bootstrap.fraction == 0.5
    assert config.seeds.sampling == 11
    assert config.seeds.split == 22
    assert config.seeds.bootstrap == 33
    assert config.annotation.raters == ("r1", "r2", "r3")
    # derived artifact paths live under the output directory
    assert config.sample_path.parent == config.output_dir
    assert config.sample_path.name == "annotation_sample.jsonl"
    assert config.labels_path.name == "annotation_log.jsonl"
    assert config.gold_path.name == "gold.csv"
    assert config.scores_out_path.name == "scores.jsonl"


def test_relative_paths_resolve_against_config_dir(tmp_path):
    path = rewrite(tmp_path, lambda raw: None)
    config = load_config(path)
    assert config.dataset_path == tmp_path / "dataset.jsonl"
    assert config.output_dir == tmp_path / "out"


@pytest.mark.parametrize(
    "mutate, field",
    [
        (lambda raw: raw.pop("dataset_path"), "dataset_path"),
        (lambda raw: raw.pop("registry_path"), "registry_path"),
        (lambda raw: raw.pop("output_dir"), "output_dir"),
        (lambda raw: raw.update(registry_path="ghost.jsonl"), "registry_path"),
        (lambda raw: raw.update(language="FR"), "language"),
        (lambda raw: raw.update(growth_windows=[[0, 10]]), "growth_windows[0]"),
        (lambda raw: raw.update(growth_windows=[[5, 2]]), "growth_windows[0]"),
        (lambda raw: raw.update(growth_windows=[[1]]), "growth_windows[0]"),
        (lambda raw: raw.update(model_specs={"response": "views"}), "model_specs"),
        (lambda raw: raw.update(model_specs=[{"response": "shares"}]), "model_specs[0].response"),
        (lambda raw: raw["bootstrap"].update(fraction=1.5), "bootstrap.fraction"),
        (lambda raw: raw["bootstrap"].update(reps=0), "bootstrap.reps"),
        (lambda raw: raw["seeds"].update(split="five"), "seeds.split"),
        (lambda raw: raw["seeds"].update(split=True), "seeds.split"),
        (lambda raw: raw["seeds"].update(split=-1), "seeds.split"),
        (lambda raw: raw["annotation"].update(raters=["only"]), "annotation.raters"),
        (lambda raw: raw["annotation"].update(service_port=70000), "annotation.service_port"),
    ],
)
def test_invalid_config_names_failing_field(tmp_path, mutate, field):
    path = rewrite(tmp_path, mutate)
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.field == field


def test_missing_config_file():
    with pytest.raises(ConfigError, match="cannot read") as err:
        load_config("/nonexistent/config.yaml")
    assert err.value.field == "config"


def test_invalid_yaml(tmp_path):
    path = tmp_path / "config.yaml"
    path.write_text("dataset_path: [unclosed\n")
    with pytest.raises(ConfigError, match="valid YAML"):
        load_config(path)


def test_scores_or_scorer_required(tmp_path):
    def drop_scores(raw):
        raw.pop("scores_path", None)
        raw.pop("scorer", None)

    path = rewrite(tmp_path, drop_scores)
    with pytest.raises(ConfigError, match="either scores_path or a scorer"):
        load_config(path)


def test_file_replay_scorer_needs_scores_path(tmp_path):
    def replay_without_path(raw):
        raw.pop("scores_path", None)
        raw["scorer"] = {"kind": "file_replay"}

    path = rewrite(tmp_path, replay_without_path)
    with pytest.raises(ConfigError, match="file_replay scorer needs scores_path"):
        load_config(path)


def test_remote_scorer_descriptor(tmp_path):
    def remote(raw):
        raw["scorer"] = {"kind": "remote_service", "endpoint": "http://svc.test", "version": "3"}

    config = load_config(rewrite(tmp_path, remote))
    assert config.scorer.kind == "remote_service"
    assert config.scorer.endpoint == "http://svc.test"
    assert config.scorer.version == "3"
    assert config.scorer.language == config.language


def test_digest_is_stable_and_sensitive(tmp_path):
    config_a = load_config(CONFIG)
    config_b = load_config(CONFIG)
    assert config_a.digest() == config_b.digest()
    changed = load_config(rewrite(tmp_path, lambda raw: raw["seeds"].update(split=99)))
    assert changed.digest() != config_a.digest()


def test_seed_overrides_update_seeds_and_digest():
    config = load_config(CONFIG)
    before = config.digest()
    apply_seed_overrides(config, ["split=77", "bootstrap=5"])
    assert config.seeds.split == 77
    assert config.seeds.bootstrap == 5
    assert config.seeds.sampling == 11  # untouched
    assert config.digest() != before


@pytest.mark.parametrize(
    "override",
    ["split", "split=x", "split=-2", "lucky=3", "split=1=2"],
)
def test_seed_override_rejects_bad_values(override):
    config = load_config(CONFIG)
    with pytest.raises(ConfigError) as err:
        apply_seed_overrides(config, [override])
    assert err.value.field == "seed-override"

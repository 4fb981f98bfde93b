"""Pipeline configuration: one YAML file drives every subcommand.

Relative paths in the file resolve against the config file's directory.
Input paths named in the config must exist at load time; paths derived
from ``output_dir`` (sample file, annotation log, gold table) are stage
artifacts and are only required by the stages that read them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import yaml

from .categories import CATEGORY_SET
from .errors import ConfigError
from .regress import DEFAULT_EMOTION_PREDICTORS, ModelSpec
from .scoring import SCORER_KINDS, ScorerDescriptor

_RESPONSES = ("views", "likes", "comments")


@dataclass
class BootstrapConfig:
    reps: int = 1000
    fraction: float = 0.2
    focal: str = "other_condemning"


@dataclass
class SeedConfig:
    sampling: int = 0
    split: int = 0
    bootstrap: int = 0

    def as_dict(self) -> dict[str, int]:
        return {"sampling": self.sampling, "split": self.split, "bootstrap": self.bootstrap}


@dataclass
class AnnotationConfig:
    sample_n: int = 40
    train_n: int = 30
    service_port: int = 8787
    raters: tuple[str, ...] = ("r1", "r2", "r3")


@dataclass
class PipelineConfig:
    dataset_path: Path
    registry_path: Path
    output_dir: Path
    language: str = "EN"
    scores_path: Path | None = None
    scorer: ScorerDescriptor | None = None
    growth_path: Path | None = None
    pilot_labels_path: Path | None = None
    clusters_path: Path | None = None
    ui_dir: Path | None = None
    growth_windows: tuple[tuple[int, int], ...] = ((1, 10), (51, 60))
    model_specs: list[ModelSpec] = field(default_factory=list)
    bootstrap: BootstrapConfig = field(default_factory=BootstrapConfig)
    seeds: SeedConfig = field(default_factory=SeedConfig)
    annotation: AnnotationConfig = field(default_factory=AnnotationConfig)
    raw: dict = field(default_factory=dict)

    # stage artifacts under output_dir, read by later stages
    @property
    def sample_path(self) -> Path:
        return self.output_dir / "annotation_sample.jsonl"

    @property
    def labels_path(self) -> Path:
        return self.output_dir / "annotation_log.jsonl"

    @property
    def gold_path(self) -> Path:
        return self.output_dir / "gold.csv"

    @property
    def scores_out_path(self) -> Path:
        return self.output_dir / "scores.jsonl"

    def digest(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True, ensure_ascii=False).encode("utf-8")
        ).hexdigest()


def _require(raw: dict, key: str):
    if key not in raw or raw[key] is None:
        raise ConfigError(f"missing required field {key}", field=key)
    return raw[key]


def _as_int(value, fld: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{fld} must be an integer, got {value!r}", field=fld)
    if minimum is not None and value < minimum:
        raise ConfigError(f"{fld} must be >= {minimum}, got {value}", field=fld)
    return value


def _input_path(raw_value, fld: str, base: Path, must_exist: bool = True) -> Path:
    if not isinstance(raw_value, str) or not raw_value:
        raise ConfigError(f"{fld} must be a non-empty path string", field=fld)
    path = (base / raw_value).resolve() if not Path(raw_value).is_absolute() else Path(raw_value)
    if must_exist and not path.exists():
        raise ConfigError(f"{fld} does not exist: {path}", field=fld)
    return path


def _parse_model_spec(obj: dict, fld: str) -> ModelSpec:
    if not isinstance(obj, dict):
        raise ConfigError(f"{fld} must be a mapping", field=fld)
    response = obj.get("response")
    if response not in _RESPONSES:
        raise ConfigError(f"{fld}.response must be one of {_RESPONSES}", field=f"{fld}.response")
    predictors = tuple(obj.get("emotion_predictors", DEFAULT_EMOTION_PREDICTORS))
    bad = [p for p in predictors if p not in CATEGORY_SET]
    if bad:
        raise ConfigError(
            f"{fld}.emotion_predictors contains unknown categories {bad}",
            field=f"{fld}.emotion_predictors",
        )
    kwargs = {}
    for flag in ("log_duration", "channel_fe", "month_fe", "weekday_fe", "duration_buckets"):
        if flag in obj:
            if not isinstance(obj[flag], bool):
                raise ConfigError(f"{fld}.{flag} must be a boolean", field=f"{fld}.{flag}")
            kwargs[flag] = obj[flag]
    return ModelSpec(response=response, emotion_predictors=predictors, **kwargs)


def load_config(path: str | Path) -> PipelineConfig:
    """Parse and validate the pipeline YAML; raises ConfigError naming the
    first failing field."""
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}", field="config") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}", field="config") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping", field="config")
    base = path.parent.resolve()

    dataset_path = _input_path(_require(raw, "dataset_path"), "dataset_path", base)
    registry_path = _input_path(_require(raw, "registry_path"), "registry_path", base)
    out_raw = _require(raw, "output_dir")
    if not isinstance(out_raw, str) or not out_raw:
        raise ConfigError("output_dir must be a non-empty path string", field="output_dir")
    output_dir = (base / out_raw).resolve() if not Path(out_raw).is_absolute() else Path(out_raw)

    language = raw.get("language", "EN")
    if language not in ("KO", "EN"):
        raise ConfigError(f"language must be KO or EN, got {language!r}", field="language")

    scores_path = None
    if raw.get("scores_path") is not None:
        scores_path = _input_path(raw["scores_path"], "scores_path", base)
    scorer = None
    if raw.get("scorer") is not None:
        sraw = raw["scorer"]
        if not isinstance(sraw, dict) or sraw.get("kind") not in SCORER_KINDS:
            raise ConfigError(
                f"scorer.kind must be one of {SCORER_KINDS}", field="scorer.kind"
            )
        try:
            scorer = ScorerDescriptor(
                kind=sraw["kind"],
                language=sraw.get("language", language),
                version=str(sraw.get("version", "0")),
                endpoint=sraw.get("endpoint"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc), field="scorer") from exc
    if scorer is None and scores_path is None:
        raise ConfigError(
            "either scores_path or a scorer descriptor is required", field="scores_path"
        )
    if scorer is not None and scorer.kind == "file_replay" and scores_path is None:
        raise ConfigError("file_replay scorer needs scores_path", field="scores_path")

    optional_paths = {}
    for fld in ("growth_path", "pilot_labels_path", "clusters_path", "ui_dir"):
        if raw.get(fld) is not None:
            optional_paths[fld] = _input_path(raw[fld], fld, base)

    windows = []
    for i, win in enumerate(raw.get("growth_windows", [[1, 10], [51, 60]])):
        if (
            not isinstance(win, (list, tuple))
            or len(win) != 2
            or not all(isinstance(v, int) and not isinstance(v, bool) for v in win)
            or win[0] < 1
            or win[1] < win[0]
        ):
            raise ConfigError(
                f"growth_windows[{i}] must be [start_day, end_day] with 1 <= start <= end",
                field=f"growth_windows[{i}]",
            )
        windows.append((win[0], win[1]))

    specs_raw = raw.get("model_specs", [])
    if not isinstance(specs_raw, list):
        raise ConfigError("model_specs must be a list", field="model_specs")
    model_specs = [
        _parse_model_spec(obj, f"model_specs[{i}]") for i, obj in enumerate(specs_raw)
    ]

    braw = raw.get("bootstrap", {})
    bootstrap = BootstrapConfig(
        reps=_as_int(braw.get("reps", 1000), "bootstrap.reps", minimum=1),
        fraction=braw.get("fraction", 0.2),
        focal=braw.get("focal", "other_condemning"),
    )
    if not isinstance(bootstrap.fraction, (int, float)) or not 0 < bootstrap.fraction <= 1:
        raise ConfigError(
            f"bootstrap.fraction must be in (0, 1], got {braw.get('fraction')!r}",
            field="bootstrap.fraction",
        )

    sraw = raw.get("seeds", {})
    if not isinstance(sraw, dict):
        raise ConfigError("seeds must be a mapping", field="seeds")
    seeds = SeedConfig(
        sampling=_as_int(sraw.get("sampling", 0), "seeds.sampling", minimum=0),
        split=_as_int(sraw.get("split", 0), "seeds.split", minimum=0),
        bootstrap=_as_int(sraw.get("bootstrap", 0), "seeds.bootstrap", minimum=0),
    )

    araw = raw.get("annotation", {})
    raters = tuple(araw.get("raters", ("r1", "r2", "r3")))
    if len(raters) < 2 or not all(isinstance(r, str) and r for r in raters):
        raise ConfigError("annotation.raters needs >= 2 non-empty ids", field="annotation.raters")
    annotation = AnnotationConfig(
        sample_n=_as_int(araw.get("sample_n", 40), "annotation.sample_n", minimum=1),
        train_n=_as_int(araw.get("train_n", 30), "annotation.train_n", minimum=1),
        service_port=_as_int(araw.get("service_port", 8787), "annotation.service_port", minimum=1),
        raters=raters,
    )
    if annotation.service_port > 65535:
        raise ConfigError("annotation.service_port must be <= 65535", field="annotation.service_port")

    return PipelineConfig(
        dataset_path=dataset_path,
        registry_path=registry_path,
        output_dir=output_dir,
        language=language,
        scores_path=scores_path,
        scorer=scorer,
        growth_windows=tuple(windows),
        model_specs=model_specs,
        bootstrap=bootstrap,
        seeds=seeds,
        annotation=annotation,
        raw=raw,
        **optional_paths,
    )


def apply_seed_overrides(config: PipelineConfig, overrides: Sequence[str]) -> None:
    """Apply ``k=v`` seed overrides in place (also into the digest source)."""
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"seed override {item!r} is not k=v", field="seed-override")
        if key not in ("sampling", "split", "bootstrap"):
            raise ConfigError(f"unknown seed {key!r}", field="seed-override")
        try:
            seed = int(value)
        except ValueError:
            raise ConfigError(f"seed {key} must be an integer, got {value!r}", field="seed-override")
        if seed < 0:
            raise ConfigError(f"seed {key} must be >= 0", field="seed-override")
        setattr(config.seeds, key, seed)
        config.raw.setdefault("seeds", {})[key] = seed

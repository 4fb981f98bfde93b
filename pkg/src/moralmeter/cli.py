"""Pipeline orchestrator: `moralmeter <subcommand> --config <path>`.

Every subcommand loads one YAML config, runs a single stage, and writes its
artifacts plus a manifest (config digest, seeds, artifact list, status)
under the output directory. Stages communicate only through those files, so
the pipeline restarts from any stage's outputs. The TOOL_LOG environment
variable sets logging verbosity and never affects results.
"""

from __future__ import annotations

import csv
import json
import logging
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import figures
from .annotation import (
    GoldLabel,
    LabelMatrix,
    agreement_report,
    majority_vote,
    stratified_sample,
    stratified_split,
)
from .categories import CATEGORY_DISPLAY, CHOICE_ORDER, EmotionCategory
from .config import PipelineConfig, apply_seed_overrides, load_config
from .corpus import descriptive_stats, engagement_ratios, load_dataset, load_registry
from .errors import ConfigError, InsufficientDataError, ToolkitError
from .growth import load_growth_series, stability_summary
from .regress import build_design, coefficient_table, fit_nb, fit_poisson, overdispersion_test, predict_curve
from .robustness import bootstrap as run_bootstrap
from .robustness import per_channel_fits
from .scoring import EmotionScores, ScorerDescriptor, distribution, make_scorer, score_many
from .service import SessionStore, create_app, load_sample_items

log = logging.getLogger("moralmeter")

CURVE_GRID = [round(p, 2) for p in np.linspace(0.0, 1.0, 21).tolist()]


def _setup_logging():
    level = os.environ.get("TOOL_LOG", "WARNING").upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR"):
        level = "WARNING"
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row.get(f)) for f in fieldnames])
    return path


def _write_json(path: Path, obj) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, sort_keys=True, ensure_ascii=False, indent=2)
        fh.write("\n")
    return path


def _write_jsonl(path: Path, rows: list[dict]) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True, ensure_ascii=False) + "\n")
    return path


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def _load_corpus(cfg: PipelineConfig):
    registry = load_registry(cfg.registry_path)
    result = load_dataset(cfg.dataset_path, registry)
    if result.rejections:
        log.warning("%d record(s) rejected while loading the dataset", len(result.rejections))
    if not result.records:
        raise ToolkitError("dataset contains no valid records")
    return result.records, registry, result


def _resolve_scores(cfg: PipelineConfig, records) -> dict[str, EmotionScores]:
    """Scores for every record: the score stage's artifact if present,
    otherwise the configured scorer (replay file, lexicon, or remote)."""
    if cfg.scores_out_path.exists():
        return {
            row["video_id"]: EmotionScores({k: float(v) for k, v in row["scores"].items()})
            for row in _read_jsonl(cfg.scores_out_path)
        }
    descriptor = cfg.scorer or ScorerDescriptor(kind="file_replay", language=cfg.language)
    scorer = make_scorer(descriptor, scores_path=cfg.scores_path)
    return score_many(records, scorer)


def _write_manifest(cfg: PipelineConfig, subcommand: str, artifacts, status: str, error=None):
    manifest = {
        "subcommand": subcommand,
        "config_digest": cfg.digest(),
        "seeds": cfg.seeds.as_dict(),
        "status": status,
        "artifacts": sorted(str(Path(p).relative_to(cfg.output_dir)) for p in artifacts),
        "error": error,
    }
    _write_json(cfg.output_dir / "manifest.json", manifest)


def _prepare(config_path, output, seed_override) -> PipelineConfig:
    cfg = load_config(config_path)
    apply_seed_overrides(cfg, seed_override)
    if output:
        cfg.output_dir = Path(output).resolve()
    cfg.output_dir.mkdir(parents=True, exist_ok=True)
    return cfg


def _run(subcommand: str, stage_fn, config_path, output, seed_override):
    _setup_logging()
    try:
        cfg = _prepare(config_path, output, seed_override)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    artifacts: list[Path] = []
    try:
        artifacts = stage_fn(cfg)
    except Exception as exc:
        _write_manifest(cfg, subcommand, artifacts, "failed", error=str(exc))
        raise click.ClickException(str(exc)) from exc
    _write_manifest(cfg, subcommand, artifacts, "ok")
    click.echo(f"{subcommand}: {len(artifacts)} artifact(s) in {cfg.output_dir}")


@click.group()
def main():
    """Moral-emotion engagement analysis pipeline."""


def _pipeline_command(name: str):
    def deco(fn):
        fn = click.option(
            "--seed-override", multiple=True, metavar="K=V", help="Override a seed, e.g. bootstrap=7."
        )(fn)
        fn = click.option("--output", type=click.Path(), default=None, help="Override output_dir.")(fn)
        fn = click.option("--config", "config_path", required=True, type=click.Path())(fn)
        return main.command(name=name)(fn)

    return deco


# ---------------------------------------------------------------- stages


def stage_validate(cfg: PipelineConfig) -> list[Path]:
    registry = load_registry(cfg.registry_path)
    result = load_dataset(cfg.dataset_path, registry)
    per_channel: dict[str, int] = {}
    for rec in result.records:
        per_channel[rec.channel_id] = per_channel.get(rec.channel_id, 0) + 1
    report = {
        "n_accepted": len(result.records),
        "n_rejected": len(result.rejections),
        "n_channels": len(registry),
        "per_channel_counts": per_channel,
        "rejections": [
            {"line_no": r.line_no, "video_id": r.video_id, "reason": r.reason}
            for r in result.rejections
        ],
    }
    return [_write_json(cfg.output_dir / "validation_report.json", report)]


def stage_describe(cfg: PipelineConfig) -> list[Path]:
    records, _, _ = _load_corpus(cfg)
    countries = sorted({r.country for r in records})
    stat_rows = []
    for country in countries:
        for metric in ("views", "likes", "comments"):
            try:
                s = descriptive_stats(records, metric, country)
            except InsufficientDataError as exc:
                log.warning("describe: %s/%s skipped (%s)", country, metric, exc)
                continue
            stat_rows.append(
                {
                    "country": country,
                    "metric": metric,
                    "n": s.n,
                    "mean": s.mean,
                    "median": s.median,
                    "sd": s.sd,
                    "min": s.min,
                    "max": s.max,
                    "skewness": s.skewness,
                    "kurtosis": s.kurtosis,
                }
            )
    ratio_rows = []
    for country in countries:
        ratios = engagement_ratios(records, country)
        ratio_rows.append({"country": country, **ratios})
    return [
        _write_csv(
            cfg.output_dir / "describe.csv",
            ["country", "metric", "n", "mean", "median", "sd", "min", "max", "skewness", "kurtosis"],
            stat_rows,
        ),
        _write_csv(
            cfg.output_dir / "ratios.csv",
            ["country", "median_to_mean_views", "comment_intensity"],
            ratio_rows,
        ),
    ]


def stage_growth(cfg: PipelineConfig) -> list[Path]:
    if cfg.growth_path is None:
        raise ConfigError("growth stage needs growth_path", field="growth_path")
    series = load_growth_series(cfg.growth_path)
    summaries = stability_summary(series, cfg.growth_windows)
    rows = [
        {
            "start_day": w.start_day,
            "end_day": w.end_day,
            "n_rates": w.n_rates,
            "mean_rate": w.mean_rate,
            "median_rate": w.median_rate,
        }
        for w in summaries
    ]
    return [
        _write_csv(
            cfg.output_dir / "growth_summary.csv",
            ["start_day", "end_day", "n_rates", "mean_rate", "median_rate"],
            rows,
        )
    ]


def stage_sample(cfg: PipelineConfig) -> list[Path]:
    if cfg.pilot_labels_path is None or cfg.clusters_path is None:
        raise ConfigError(
            "sample stage needs pilot_labels_path and clusters_path", field="pilot_labels_path"
        )
    records, _, _ = _load_corpus(cfg)
    pilot = {row["video_id"]: row["label"] for row in _read_jsonl(cfg.pilot_labels_path)}
    clusters = {row["video_id"]: str(row["cluster"]) for row in _read_jsonl(cfg.clusters_path)}
    pool = [r for r in records if r.video_id in pilot]
    if not pool:
        raise ToolkitError("no corpus records carry pilot labels")
    sample = stratified_sample(pool, pilot, clusters, cfg.annotation.sample_n, cfg.seeds.sampling)
    rows = [
        {
            "item_id": rec.video_id,
            "title": rec.title,
            "thumbnail_url": rec.thumbnail_ref,
            "channel_id": rec.channel_id,
            "cluster": clusters.get(rec.video_id, f"solo:{rec.video_id}"),
            "pilot_label": pilot[rec.video_id],
        }
        for rec in sample
    ]
    return [_write_jsonl(cfg.sample_path, rows)]


def _build_guideline(language: str) -> str:
    name_key = "name_ko" if language == "KO" else "name_en"
    desc_key = "desc_ko" if language == "KO" else "desc_en"
    lines = ["Pick the emotion the thumbnail and title together express."]
    for token in CHOICE_ORDER:
        display = CATEGORY_DISPLAY[token]
        lines.append(f"{display[name_key]}: {display[desc_key]}")
    return "\n".join(lines)


def stage_aggregate(cfg: PipelineConfig) -> list[Path]:
    if not cfg.sample_path.exists():
        raise ToolkitError(f"no annotation sample at {cfg.sample_path}; run sample first")
    if not cfg.labels_path.exists():
        raise ToolkitError(f"no annotation log at {cfg.labels_path}; run annotate-serve first")
    items = load_sample_items(cfg.sample_path)
    store = SessionStore(
        items=items,
        raters=list(cfg.annotation.raters),
        guideline="",
        log_path=cfg.labels_path,
    )
    export = store.export()
    missing = sum(1 for row in export["cells"] for cell in row if cell is None)
    if missing:
        raise ToolkitError(f"annotation incomplete: {missing} empty cell(s) in the label matrix")
    matrix = LabelMatrix(
        item_ids=tuple(export["item_ids"]),
        raters=tuple(export["raters"]),
        cells=tuple(tuple(row) for row in export["cells"]),
    )
    gold, excluded = majority_vote(matrix)
    report = agreement_report(matrix)
    gold_rows = [
        {"item_id": g.item_id, "label": g.label.value, "vote_count": g.vote_count} for g in gold
    ]
    agreement = {
        "n_items": matrix.n_items,
        "n_raters": matrix.n_raters,
        "cohen_kappa_mean": report.cohen_kappa,
        "fleiss_kappa": report.fleiss_kappa,
        "krippendorff_alpha": report.krippendorff_alpha,
        "n_gold": len(gold),
        "n_excluded": len(excluded),
        "excluded_item_ids": excluded,
    }
    return [
        _write_csv(cfg.gold_path, ["item_id", "label", "vote_count"], gold_rows),
        _write_json(cfg.output_dir / "agreement.json", agreement),
    ]


def stage_split(cfg: PipelineConfig) -> list[Path]:
    if not cfg.gold_path.exists():
        raise ToolkitError(f"no gold table at {cfg.gold_path}; run aggregate first")
    with open(cfg.gold_path, encoding="utf-8", newline="") as fh:
        gold = [
            GoldLabel(
                item_id=row["item_id"],
                label=EmotionCategory(row["label"]),
                vote_count=int(row["vote_count"]),
            )
            for row in csv.DictReader(fh)
        ]
    train, test = stratified_split(gold, cfg.annotation.train_n, cfg.seeds.split)
    fields = ["item_id", "label", "vote_count"]
    to_rows = lambda part: [
        {"item_id": g.item_id, "label": g.label.value, "vote_count": g.vote_count} for g in part
    ]
    return [
        _write_csv(cfg.output_dir / "train.csv", fields, to_rows(train)),
        _write_csv(cfg.output_dir / "test.csv", fields, to_rows(test)),
    ]


def stage_score(cfg: PipelineConfig) -> list[Path]:
    records, _, _ = _load_corpus(cfg)
    descriptor = cfg.scorer or ScorerDescriptor(kind="file_replay", language=cfg.language)
    scorer = make_scorer(descriptor, scores_path=cfg.scores_path)
    scored = score_many(records, scorer)
    rows = [
        {"video_id": rec.video_id, "scores": scored[rec.video_id].as_dict()} for rec in records
    ]
    return [_write_jsonl(cfg.scores_out_path, rows)]


def stage_distribution(cfg: PipelineConfig) -> list[Path]:
    records, _, _ = _load_corpus(cfg)
    scores = _resolve_scores(cfg, records)
    rows = []
    for country in sorted({r.country for r in records}):
        dist = distribution(scores[r.video_id] for r in records if r.country == country)
        for category, proportion in dist.items():
            rows.append({"country": country, "category": category, "proportion": proportion})
    return [
        _write_csv(cfg.output_dir / "distribution.csv", ["country", "category", "proportion"], rows)
    ]


def _spec_stem(cfg: PipelineConfig, index: int) -> str:
    spec = cfg.model_specs[index]
    if sum(1 for s in cfg.model_specs if s.response == spec.response) > 1:
        return f"{spec.response}_{index}"
    return spec.response


def _require_specs(cfg: PipelineConfig):
    if not cfg.model_specs:
        raise ConfigError("this stage needs at least one entry in model_specs", field="model_specs")


def stage_fit(cfg: PipelineConfig) -> list[Path]:
    _require_specs(cfg)
    records, _, _ = _load_corpus(cfg)
    scores = _resolve_scores(cfg, records)
    artifacts = []
    for i, spec in enumerate(cfg.model_specs):
        design = build_design(records, scores, spec)
        pois = fit_poisson(design)
        nb = fit_nb(design)
        test = overdispersion_test(nb, pois)
        stem = _spec_stem(cfg, i)
        artifacts.append(
            _write_csv(
                cfg.output_dir / f"fit_{stem}.csv",
                [
                    "coefficient",
                    "estimate",
                    "std_error",
                    "z",
                    "p",
                    "stars",
                    "irr",
                    "irr_ci_low",
                    "irr_ci_high",
                ],
                coefficient_table(nb),
            )
        )
        summary = {
            "response": spec.response,
            "n": nb.n,
            "n_dropped": design.n_dropped,
            "alpha": nb.alpha,
            "log_likelihood_nb": nb.log_likelihood,
            "log_likelihood_poisson": pois.log_likelihood,
            "converged": nb.converged,
            "iterations": nb.iterations,
            "overdispersion": {
                "statistic": test.statistic,
                "p_value": test.p_value,
                "significant_at_01": test.significant_at_01,
            },
        }
        artifacts.append(_write_json(cfg.output_dir / f"fit_{stem}_summary.json", summary))
    return artifacts


def stage_curves(cfg: PipelineConfig) -> list[Path]:
    _require_specs(cfg)
    records, _, _ = _load_corpus(cfg)
    scores = _resolve_scores(cfg, records)
    artifacts = []
    for i, spec in enumerate(cfg.model_specs):
        design = build_design(records, scores, spec)
        nb = fit_nb(design)
        stem = _spec_stem(cfg, i)
        for emotion in spec.emotion_predictors:
            points = predict_curve(nb, design, emotion, CURVE_GRID)
            rows = [
                {
                    "p": pt.p,
                    "mu": pt.mu,
                    "ci_low": pt.ci_low,
                    "ci_high": pt.ci_high,
                    "relative": pt.relative,
                }
                for pt in points
            ]
            artifacts.append(
                _write_csv(
                    cfg.output_dir / f"curves_{stem}_{emotion}.csv",
                    ["p", "mu", "ci_low", "ci_high", "relative"],
                    rows,
                )
            )
    return artifacts


def stage_bootstrap(cfg: PipelineConfig) -> list[Path]:
    _require_specs(cfg)
    records, _, _ = _load_corpus(cfg)
    scores = _resolve_scores(cfg, records)
    spec = cfg.model_specs[0]
    result = run_bootstrap(
        records,
        scores,
        spec,
        cfg.bootstrap.focal,
        n_replicates=cfg.bootstrap.reps,
        fraction=cfg.bootstrap.fraction,
        seed=cfg.seeds.bootstrap,
    )
    stem = f"{_spec_stem(cfg, 0)}_{cfg.bootstrap.focal}"
    rows = [{"estimate": est} for est in result.estimates]
    summary = {
        "focal": result.focal,
        "fraction": result.fraction,
        "subsample_size": result.subsample_size,
        "n_replicates": result.n_replicates,
        "n_converged": result.n_converged,
        "n_failed": result.n_failed,
        "ci_low": result.ci_low,
        "median": result.median,
        "ci_high": result.ci_high,
    }
    return [
        _write_csv(cfg.output_dir / f"bootstrap_{stem}.csv", ["estimate"], rows),
        _write_json(cfg.output_dir / f"bootstrap_{stem}_summary.json", summary),
    ]


def stage_per_channel(cfg: PipelineConfig) -> list[Path]:
    _require_specs(cfg)
    records, _, _ = _load_corpus(cfg)
    scores = _resolve_scores(cfg, records)
    spec = cfg.model_specs[0]
    fits = per_channel_fits(records, scores, spec, cfg.bootstrap.focal)
    stem = f"{_spec_stem(cfg, 0)}_{cfg.bootstrap.focal}"
    rows = [
        {
            "channel_id": f.channel_id,
            "n": f.n,
            "estimate": f.estimate,
            "ci_low": f.ci_low,
            "ci_high": f.ci_high,
            "positive": f.positive,
        }
        for f in fits.fits
    ]
    summary = {
        "focal": fits.focal,
        "n_channels_fit": len(fits.fits),
        "n_positive": fits.n_positive,
        "skipped": fits.skipped,
    }
    return [
        _write_csv(
            cfg.output_dir / f"per_channel_{stem}.csv",
            ["channel_id", "n", "estimate", "ci_low", "ci_high", "positive"],
            rows,
        ),
        _write_json(cfg.output_dir / f"per_channel_{stem}_summary.json", summary),
    ]


def stage_report(cfg: PipelineConfig) -> list[Path]:
    rendered = figures.render_all(cfg.output_dir)
    if not rendered:
        raise ToolkitError("no artifacts to render; run pipeline stages first")
    return rendered


# ------------------------------------------------------------ commands


@_pipeline_command("validate")
def cmd_validate(config_path, output, seed_override):
    """Check the config, registry, and dataset; write a validation report."""
    _run("validate", stage_validate, config_path, output, seed_override)


@_pipeline_command("describe")
def cmd_describe(config_path, output, seed_override):
    """Descriptive engagement statistics per country and metric."""
    _run("describe", stage_describe, config_path, output, seed_override)


@_pipeline_command("growth")
def cmd_growth(config_path, output, seed_override):
    """Daily view-growth stability summary over configured day windows."""
    _run("growth", stage_growth, config_path, output, seed_override)


@_pipeline_command("sample")
def cmd_sample(config_path, output, seed_override):
    """Draw the stratified annotation sample."""
    _run("sample", stage_sample, config_path, output, seed_override)


@_pipeline_command("aggregate")
def cmd_aggregate(config_path, output, seed_override):
    """Majority-vote gold labels and agreement statistics from the log."""
    _run("aggregate", stage_aggregate, config_path, output, seed_override)


@_pipeline_command("split")
def cmd_split(config_path, output, seed_override):
    """Stratified train/test split of the gold labels."""
    _run("split", stage_split, config_path, output, seed_override)


@_pipeline_command("score")
def cmd_score(config_path, output, seed_override):
    """Run the configured scorer over the corpus."""
    _run("score", stage_score, config_path, output, seed_override)


@_pipeline_command("distribution")
def cmd_distribution(config_path, output, seed_override):
    """Primary-emotion distribution per country."""
    _run("distribution", stage_distribution, config_path, output, seed_override)


@_pipeline_command("fit")
def cmd_fit(config_path, output, seed_override):
    """Fit every configured model; write coefficient tables and summaries."""
    _run("fit", stage_fit, config_path, output, seed_override)


@_pipeline_command("curves")
def cmd_curves(config_path, output, seed_override):
    """Predicted-engagement curves over each emotion predictor."""
    _run("curves", stage_curves, config_path, output, seed_override)


@_pipeline_command("bootstrap")
def cmd_bootstrap(config_path, output, seed_override):
    """Subsample bootstrap of the focal coefficient."""
    _run("bootstrap", stage_bootstrap, config_path, output, seed_override)


@_pipeline_command("per-channel")
def cmd_per_channel(config_path, output, seed_override):
    """Per-channel refits of the focal coefficient."""
    _run("per-channel", stage_per_channel, config_path, output, seed_override)


@_pipeline_command("report")
def cmd_report(config_path, output, seed_override):
    """Render figures from existing artifacts."""
    _run("report", stage_report, config_path, output, seed_override)


@_pipeline_command("annotate-serve")
def cmd_annotate_serve(config_path, output, seed_override):
    """Serve the annotation API (and UI when ui_dir is set); blocks."""
    import uvicorn

    _setup_logging()
    try:
        cfg = _prepare(config_path, output, seed_override)
    except ConfigError as exc:
        raise click.ClickException(str(exc)) from exc
    if not cfg.sample_path.exists():
        raise click.ClickException(f"no annotation sample at {cfg.sample_path}; run sample first")
    items = load_sample_items(cfg.sample_path)
    store = SessionStore(
        items=items,
        raters=list(cfg.annotation.raters),
        guideline=_build_guideline(cfg.language),
        log_path=cfg.labels_path,
    )
    app = create_app(store, ui_dir=cfg.ui_dir)
    _write_manifest(cfg, "annotate-serve", [cfg.labels_path], "ok")
    click.echo(f"annotation service on http://127.0.0.1:{cfg.annotation.service_port}")
    uvicorn.run(app, host="127.0.0.1", port=cfg.annotation.service_port, log_level="warning")


if __name__ == "__main__":
    main()

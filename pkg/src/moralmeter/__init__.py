"""Moral-emotion framing vs. engagement analysis toolkit."""

from .annotation import (
    AgreementReport,
    GoldLabel,
    LabelMatrix,
    agreement_report,
    cohen_kappa_mean,
    fleiss_kappa,
    krippendorff_alpha,
    majority_vote,
    stratified_sample,
    stratified_split,
)
from .categories import CATEGORY_ORDER, CHOICE_ORDER, HARD_TO_TELL, EmotionCategory
from .config import PipelineConfig, apply_seed_overrides, load_config
from .corpus import (
    ChannelInfo,
    DescriptiveStats,
    LoadResult,
    VideoRecord,
    descriptive_stats,
    engagement_ratios,
    load_dataset,
    load_registry,
    summarize,
)
from .errors import (
    ConfigError,
    DegenerateInputError,
    DesignError,
    InsufficientDataError,
    InternalConsistencyError,
    MissingScoreError,
    ProtocolError,
    ScoringError,
    ToolkitError,
)
from .growth import GrowthSeries, daily_growth_rates, load_growth_series, stability_summary
from .regress import (
    DesignMatrix,
    FitResult,
    ModelSpec,
    OverdispersionTest,
    build_design,
    coefficient_table,
    fit_nb,
    fit_poisson,
    irr,
    overdispersion_test,
    predict_curve,
    significance_stars,
)
from .robustness import BootstrapResult, ChannelFitSet, bootstrap, nearest_rank, per_channel_fits
from .scoring import (
    EmotionScores,
    EvalReport,
    FileReplayScorer,
    LexiconScorer,
    RemoteScorer,
    ScorerDescriptor,
    distribution,
    evaluate,
    evaluate_all,
    make_scorer,
    primary_emotion,
    score_many,
)
from .service import SessionStore, create_app, load_sample_items

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "BootstrapResult",
    "CATEGORY_ORDER",
    "CHOICE_ORDER",
    "ChannelFitSet",
    "ChannelInfo",
    "ConfigError",
    "DegenerateInputError",
    "DescriptiveStats",
    "DesignError",
    "DesignMatrix",
    "EmotionCategory",
    "EmotionScores",
    "EvalReport",
    "FileReplayScorer",
    "FitResult",
    "GoldLabel",
    "GrowthSeries",
    "HARD_TO_TELL",
    "InsufficientDataError",
    "InternalConsistencyError",
    "LabelMatrix",
    "LexiconScorer",
    "LoadResult",
    "MissingScoreError",
    "ModelSpec",
    "OverdispersionTest",
    "PipelineConfig",
    "ProtocolError",
    "RemoteScorer",
    "ScorerDescriptor",
    "ScoringError",
    "SessionStore",
    "ToolkitError",
    "VideoRecord",
    "agreement_report",
    "bootstrap",
    "build_design",
    "coefficient_table",
    "cohen_kappa_mean",
    "create_app",
    "daily_growth_rates",
    "descriptive_stats",
    "distribution",
    "engagement_ratios",
    "evaluate",
    "evaluate_all",
    "fit_nb",
    "fit_poisson",
    "apply_seed_overrides",
    "fleiss_kappa",
    "irr",
    "krippendorff_alpha",
    "load_config",
    "load_dataset",
    "load_growth_series",
    "load_registry",
    "load_sample_items",
    "majority_vote",
    "make_scorer",
    "nearest_rank",
    "overdispersion_test",
    "per_channel_fits",
    "predict_curve",
    "primary_emotion",
    "score_many",
    "significance_stars",
    "stability_summary",
    "stratified_sample",
    "stratified_split",
    "summarize",
]

"""Stability checks: subsample bootstrap and per-channel refits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

import numpy as np

from .corpus import VideoRecord
from .errors import DegenerateInputError, DesignError, ToolkitError
from .regress import DesignMatrix, ModelSpec, build_design, fit_nb
from .scoring import EmotionScores


def nearest_rank(sorted_values: Sequence[float], pct: float) -> float:
    """Nearest-rank percentile: value at rank ceil(pct/100 * N), 1-indexed."""
    if not sorted_values:
        raise DegenerateInputError("percentile of an empty sample")
    if not 0.0 < pct <= 100.0:
        raise ValueError(f"percentile {pct} outside (0, 100]")
    rank = math.ceil(pct / 100.0 * len(sorted_values))
    return float(sorted_values[rank - 1])


@dataclass(frozen=True)
class BootstrapResult:
    focal: str
    fraction: float
    subsample_size: int
    n_replicates: int
    n_converged: int
    n_failed: int
    estimates: tuple[float, ...]  # converged focal estimates, replicate order
    ci_low: float    # 2.5th percentile
    median: float    # 50th
    ci_high: float   # 97.5th


def bootstrap(
    records: Sequence[VideoRecord],
    scores: Mapping[str, EmotionScores],
    spec: ModelSpec,
    focal: str,
    n_replicates: int = 1000,
    fraction: float = 0.2,
    seed: int = 0,
) -> BootstrapResult:
    """Refit the model on without-replacement subsamples of the corpus.

    Each replicate r draws floor(fraction * n) records without replacement
    using default_rng([seed, r]), rebuilds the design (fixed-effect levels
    may differ from the full sample), and refits. Replicates whose design is
    rank deficient or whose fit does not converge are dropped and counted.
    The interval is the nearest-rank 2.5th/50th/97.5th percentiles of the
    focal coefficient across converged replicates.
    """
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction {fraction} outside (0, 1]")
    if n_replicates < 1:
        raise ValueError("n_replicates must be positive")
    full = build_design(records, scores, spec)
    if focal not in full.column_names:
        raise ValueError(f"focal column {focal!r} not in the model design")
    base = list(records)
    m = int(fraction * len(base))
    if m < 2:
        raise DegenerateInputError(
            f"subsample size {m} too small (fraction {fraction} of {len(base)} records)"
        )
    estimates: list[float] = []
    n_failed = 0
    for rep in range(n_replicates):
        rng = np.random.default_rng([seed, rep])
        idx = rng.choice(len(base), size=m, replace=False)
        subset = [base[i] for i in idx]
        try:
            design = build_design(subset, scores, spec)
            fit = fit_nb(design)
        except (DesignError, ToolkitError, np.linalg.LinAlgError):
            n_failed += 1
            continue
        if not fit.converged or focal not in fit.coefficients:
            n_failed += 1
            continue
        estimates.append(fit.coefficients[focal])
    if not estimates:
        raise ToolkitError("every bootstrap replicate failed")
    if n_failed > 0.1 * n_replicates:
        warnings.warn(f"{n_failed}/{n_replicates} bootstrap replicates failed")
    ordered = sorted(estimates)
    return BootstrapResult(
        focal=focal,
        fraction=fraction,
        subsample_size=m,
        n_replicates=n_replicates,
        n_converged=len(estimates),
        n_failed=n_failed,
        estimates=tuple(estimates),
        ci_low=nearest_rank(ordered, 2.5),
        median=nearest_rank(ordered, 50.0),
        ci_high=nearest_rank(ordered, 97.5),
    )


@dataclass(frozen=True)
class ChannelFit:
    channel_id: str
    n: int
    estimate: float
    ci_low: float
    ci_high: float
    positive: bool


@dataclass(frozen=True)
class ChannelFitSet:
    focal: str
    fits: tuple[ChannelFit, ...]
    skipped: dict[str, str]

    @property
    def n_positive(self) -> int:
        return sum(f.positive for f in self.fits)


def per_channel_fits(
    records: Sequence[VideoRecord],
    scores: Mapping[str, EmotionScores],
    spec: ModelSpec,
    focal: str,
    min_extra: int = 10,
) -> ChannelFitSet:
    """Refit the model within each channel (channel effects dropped).

    A channel enters only when it has at least (design columns + min_extra)
    usable records; smaller channels, rank-deficient designs, and
    non-converged fits are skipped with a reason. Reports the focal
    coefficient with its 95% Wald interval and sign per channel.
    """
    channel_spec = replace(spec, channel_fe=False)
    by_channel: dict[str, list[VideoRecord]] = {}
    for rec in records:
        by_channel.setdefault(rec.channel_id, []).append(rec)
    fits: list[ChannelFit] = []
    skipped: dict[str, str] = {}
    for channel_id in sorted(by_channel):
        subset = by_channel[channel_id]
        try:
            design = build_design(subset, scores, channel_spec)
        except (DesignError, ToolkitError) as exc:
            skipped[channel_id] = str(exc)
            continue
        p = design.X.shape[1]
        if design.n < p + min_extra:
            skipped[channel_id] = (
                f"too few observations (n={design.n}, columns={p}, need {p + min_extra})"
            )
            continue
        if focal not in design.column_names:
            skipped[channel_id] = f"focal column {focal!r} absent from design"
            continue
        try:
            fit = fit_nb(design)
        except (ToolkitError, np.linalg.LinAlgError) as exc:
            skipped[channel_id] = f"fit failed: {exc}"
            continue
        if not fit.converged:
            skipped[channel_id] = "fit did not converge"
            continue
        b = fit.coefficients[focal]
        se = fit.std_errors[focal]
        fits.append(
            ChannelFit(
                channel_id=channel_id,
                n=design.n,
                estimate=b,
                ci_low=b - 1.96 * se,
                ci_high=b + 1.96 * se,
                positive=b > 0,
            )
        )
    return ChannelFitSet(focal=focal, fits=tuple(fits), skipped=skipped)

"""Count regression of engagement on emotion probabilities with fixed effects.

Models the response counts as Poisson or NB2 (Var = mu + alpha*mu^2) with a
log link. The Poisson fit uses iteratively reweighted least squares; the NB
fit alternates an IRLS step for the coefficients given the dispersion with a
safeguarded Newton step for the dispersion on the profile log-likelihood,
initialized from the Poisson fit. Standard errors come from the observed
information of the joint likelihood (coefficient block).
"""

from __future__ import annotations

import math
import os
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import qr as scipy_qr
from scipy.special import gammaln, polygamma, psi
from scipy.stats import chi2, norm

from .corpus import VideoRecord
from .errors import DesignError, InternalConsistencyError, ToolkitError
from .scoring import EmotionScores

DEFAULT_EMOTION_PREDICTORS = (
    "other_condemning",
    "other_praising",
    "other_suffering",
    "neutral",
)

WEEKDAY_NAMES = ("mon", "tue", "wed", "thu", "fri", "sat", "sun")

ETA_CLIP = 30.0
ALPHA_FLOOR = 1e-8
# below this the profile likelihood is flat to machine precision (the
# gammaln terms at r = 1/alpha lose more digits than alpha contributes),
# so the fit is reported with exact Poisson semantics
ALPHA_COLLAPSE = 1e-6


@dataclass(frozen=True)
class ModelSpec:
    """Which response to model and which predictors/controls to include."""

    response: str
    emotion_predictors: tuple[str, ...] = DEFAULT_EMOTION_PREDICTORS
    log_duration: bool = True
    channel_fe: bool = True
    month_fe: bool = True
    weekday_fe: bool = True
    duration_buckets: bool = False  # decile dummies instead of log-duration

    def __post_init__(self):
        if self.response not in ("views", "likes", "comments"):
            raise ValueError("response must be views, likes, or comments")
        if not self.emotion_predictors:
            raise ValueError("emotion_predictors must be non-empty")


@dataclass
class DesignMatrix:
    y: np.ndarray
    X: np.ndarray
    column_names: list[str]
    row_ids: list[str]
    n_dropped: int = 0

    @property
    def n(self) -> int:
        return len(self.y)


@dataclass
class FitResult:
    model: str
    column_names: list[str]
    coefficients: dict[str, float]
    std_errors: dict[str, float]
    z_values: dict[str, float]
    p_values: dict[str, float]
    alpha: float
    log_likelihood: float
    converged: bool
    iterations: int
    n: int
    cov: np.ndarray
    diagnostics: dict = field(default_factory=dict)

    def coef_vector(self) -> np.ndarray:
        return np.array([self.coefficients[c] for c in self.column_names])


def _dummy_block(values: Sequence, levels: list, prefix: str):
    """Dummy columns for every level but the first (reference) one."""
    names = [f"{prefix}:{lvl}" for lvl in levels[1:]]
    arr = np.zeros((len(values), len(levels) - 1))
    index = {lvl: i - 1 for i, lvl in enumerate(levels)}
    for row, v in enumerate(values):
        col = index[v]
        if col >= 0:
            arr[row, col] = 1.0
    return names, arr


def build_design(
    records: Sequence[VideoRecord],
    scores: Mapping[str, EmotionScores],
    spec: ModelSpec,
) -> DesignMatrix:
    """Assemble the response vector and dense predictor matrix.

    Column order: intercept, emotion predictors (spec order), log(duration+1)
    or duration-decile dummies, then channel/month/weekday dummies with the
    first observed level (alphabetical channel, calendar-first month, Monday-
    first weekday) as reference. Rows are sorted by video_id; records whose
    response is missing are dropped and counted. The matrix must have full
    column rank.
    """
    missing_scores = [r.video_id for r in records if r.video_id not in scores]
    if missing_scores:
        raise ToolkitError(f"records without scores: {missing_scores[:5]}")
    kept = sorted(
        (r for r in records if r.metric(spec.response) is not None),
        key=lambda r: r.video_id,
    )
    n_dropped = len(records) - len(kept)
    if not kept:
        raise ToolkitError(f"no records with a {spec.response} value")

    y = np.array([r.metric(spec.response) for r in kept], dtype=float)
    names: list[str] = ["intercept"]
    blocks: list[np.ndarray] = [np.ones((len(kept), 1))]

    for token in spec.emotion_predictors:
        names.append(token)
        blocks.append(np.array([[scores[r.video_id][token]] for r in kept]))

    durations = np.array([r.duration_seconds for r in kept], dtype=float)
    if spec.duration_buckets:
        edges = np.quantile(durations, np.linspace(0.1, 0.9, 9))
        buckets = np.searchsorted(edges, durations, side="right")
        levels = sorted(set(buckets.tolist()))
        if len(levels) > 1:
            block_names, arr = _dummy_block(buckets.tolist(), levels, "duration_decile")
            names.extend(block_names)
            blocks.append(arr)
    elif spec.log_duration:
        names.append("log_duration")
        blocks.append(np.log1p(durations).reshape(-1, 1))

    fe_blocks = []
    if spec.channel_fe:
        fe_blocks.append(("channel", [r.channel_id for r in kept], sorted))
    if spec.month_fe:
        fe_blocks.append(("month", [r.upload_date.month for r in kept], sorted))
    if spec.weekday_fe:
        fe_blocks.append(
            ("weekday", [WEEKDAY_NAMES[r.upload_date.weekday()] for r in kept],
             lambda vs: [w for w in WEEKDAY_NAMES if w in vs])
        )
    for prefix, values, order in fe_blocks:
        levels = order(set(values))
        singletons = [lvl for lvl in levels if values.count(lvl) == 1]
        if singletons:
            warnings.warn(f"{prefix} level(s) with a single observation: {singletons}")
        if len(levels) > 1:
            block_names, arr = _dummy_block(values, levels, prefix)
            names.extend(block_names)
            blocks.append(arr)

    X = np.hstack(blocks)
    _check_rank(X, names)
    return DesignMatrix(
        y=y, X=X, column_names=names, row_ids=[r.video_id for r in kept], n_dropped=n_dropped
    )


def _check_rank(X: np.ndarray, names: list[str]):
    r_diag = None
    _, r, pivots = scipy_qr(X, mode="economic", pivoting=True)
    r_diag = np.abs(np.diag(r))
    tol = r_diag.max() * max(X.shape) * np.finfo(float).eps
    rank = int((r_diag > tol).sum())
    if rank < X.shape[1]:
        collinear = [names[i] for i in pivots[rank:]]
        raise DesignError(f"design matrix is rank deficient; collinear columns: {collinear}")


def _clip_eta(eta: np.ndarray, diag: dict) -> np.ndarray:
    if np.any(np.abs(eta) > ETA_CLIP):
        if not diag.get("clipped"):
            warnings.warn(f"linear predictor clipped at +/-{ETA_CLIP}")
        diag["clipped"] = True
        return np.clip(eta, -ETA_CLIP, ETA_CLIP)
    return eta


def _poisson_ll(y: np.ndarray, mu: np.ndarray) -> float:
    return float(np.sum(y * np.log(mu) - mu - gammaln(y + 1)))


def nb_loglik(y: np.ndarray, mu: np.ndarray, alpha: float) -> float:
    """NB2 log-likelihood with gamma-function terms."""
    r = 1.0 / alpha
    return float(
        np.sum(
            gammaln(y + r)
            - gammaln(r)
            - gammaln(y + 1)
            + r * np.log(r / (r + mu))
            + y * np.log(mu / (r + mu))
        )
    )


def nb_score(
    X: np.ndarray, y: np.ndarray, beta: np.ndarray, alpha: float
) -> np.ndarray:
    """Analytic gradient of the NB2 log-likelihood in (beta, alpha)."""
    mu = np.exp(np.clip(X @ beta, -ETA_CLIP, ETA_CLIP))
    r = 1.0 / alpha
    g_beta = X.T @ ((y - mu) / (1.0 + alpha * mu))
    dl_dr = psi(y + r) - psi(r) + np.log(r) + 1.0 - np.log(r + mu) - (r + y) / (r + mu)
    g_alpha = -(r**2) * float(np.sum(dl_dr))
    return np.append(g_beta, g_alpha)


def _nb_alpha_derivs(y, mu, alpha):
    r = 1.0 / alpha
    dl_dr = psi(y + r) - psi(r) + np.log(r) + 1.0 - np.log(r + mu) - (r + y) / (r + mu)
    d2l_dr2 = (
        polygamma(1, y + r) - polygamma(1, r) + 1.0 / r - 1.0 / (r + mu) + (y - mu) / (r + mu) ** 2
    )
    g = -(r**2) * float(np.sum(dl_dr))
    h = 2.0 * r**3 * float(np.sum(dl_dr)) + r**4 * float(np.sum(d2l_dr2))
    return g, h


def _nb_observed_information(X, y, beta, alpha):
    """Negative Hessian of the joint NB2 log-likelihood at (beta, alpha)."""
    mu = np.exp(np.clip(X @ beta, -ETA_CLIP, ETA_CLIP))
    r = 1.0 / alpha
    w = mu * (1.0 + alpha * y) / (1.0 + alpha * mu) ** 2
    h_bb = -(X.T * w) @ X
    cross = -(r**2) * (y - mu) * mu / (r + mu) ** 2
    h_ba = X.T @ cross
    _, h_aa = _nb_alpha_derivs(y, mu, alpha)
    p = X.shape[1]
    hess = np.zeros((p + 1, p + 1))
    hess[:p, :p] = h_bb
    hess[:p, p] = h_ba
    hess[p, :p] = h_ba
    hess[p, p] = h_aa
    return -hess


def _wald(names, beta, cov) -> tuple[dict, dict, dict, dict]:
    se = np.sqrt(np.diag(cov))
    z = beta / se
    p = 2.0 * norm.sf(np.abs(z))
    return (
        dict(zip(names, beta.tolist())),
        dict(zip(names, se.tolist())),
        dict(zip(names, z.tolist())),
        dict(zip(names, p.tolist())),
    )


def _diag_base() -> dict:
    return {"blas_threads": int(os.environ.get("OMP_NUM_THREADS") or os.cpu_count() or 1)}


def fit_poisson(design: DesignMatrix, tol: float = 1e-10, max_iter: int = 100) -> FitResult:
    """Maximum-likelihood Poisson regression with log link via IRLS.

    Converges when the relative log-likelihood change drops below ``tol``;
    the linear predictor is clipped at +/-30 with a warning. Standard errors
    come from the Fisher information at the optimum.
    """
    X, y = design.X, design.y
    n, p = X.shape
    diag = _diag_base()
    beta = np.zeros(p)
    beta[0] = math.log(max(float(y.mean()), 1e-8))
    eta = _clip_eta(X @ beta, diag)
    mu = np.exp(eta)
    ll = _poisson_ll(y, mu)
    trace = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        z = eta + (y - mu) / mu
        xtw = X.T * mu
        try:
            delta = np.linalg.solve(xtw @ X, xtw @ z) - beta
        except np.linalg.LinAlgError:
            delta = np.linalg.lstsq(xtw @ X, xtw @ z, rcond=None)[0] - beta
        step = 1.0
        for _ in range(40):
            cand = beta + step * delta
            eta_c = _clip_eta(X @ cand, diag)
            mu_c = np.exp(eta_c)
            ll_c = _poisson_ll(y, mu_c)
            if ll_c >= ll - 1e-12:
                break
            step /= 2.0
        beta, eta, mu = cand, eta_c, mu_c
        trace.append(ll_c)
        if abs(ll_c - ll) <= tol * (1.0 + abs(ll)):
            ll = ll_c
            converged = True
            break
        ll = ll_c
    diag["ll_trace"] = trace
    fisher = (X.T * mu) @ X
    cov = np.linalg.inv(fisher)
    coef, se, zv, pv = _wald(design.column_names, beta, cov)
    return FitResult(
        model="poisson",
        column_names=list(design.column_names),
        coefficients=coef,
        std_errors=se,
        z_values=zv,
        p_values=pv,
        alpha=0.0,
        log_likelihood=ll,
        converged=converged,
        iterations=iterations,
        n=n,
        cov=cov,
        diagnostics=diag,
    )


def _alpha_newton_step(y, mu, alpha):
    """One safeguarded Newton step on the profile log-likelihood in alpha."""
    g, h = _nb_alpha_derivs(y, mu, alpha)
    if h < 0:
        proposal = alpha - g / h
    else:
        proposal = alpha * 2.0 if g > 0 else alpha / 2.0
    if not np.isfinite(proposal) or proposal <= 0:
        proposal = alpha / 2.0
    proposal = min(max(proposal, ALPHA_FLOOR), 1e6)
    ll = nb_loglik(y, mu, alpha)
    for _ in range(40):
        if nb_loglik(y, mu, proposal) >= ll - 1e-12:
            return proposal
        proposal = alpha + (proposal - alpha) / 2.0
        proposal = min(max(proposal, ALPHA_FLOOR), 1e6)
    return alpha


def fit_nb(design: DesignMatrix, tol: float = 1e-10, max_outer: int = 200) -> FitResult:
    """Maximum-likelihood NB2 regression (Var = mu + alpha*mu^2).

    Alternates (a) an IRLS step for the coefficients given alpha using NB
    working weights mu/(1+alpha*mu) with (b) a safeguarded Newton step for
    alpha on the profile log-likelihood (floor 1e-8). Initialized from the
    Poisson fit and a method-of-moments alpha. When alpha collapses to the
    floor the result reports alpha = 0 Poisson semantics with a warning.
    """
    X, y = design.X, design.y
    if float(np.var(y)) == 0.0:
        raise ToolkitError("response has zero variance")
    n, p = X.shape
    pois = fit_poisson(design, tol=tol)
    diag = _diag_base()
    beta = pois.coef_vector()
    eta = _clip_eta(X @ beta, diag)
    mu = np.exp(eta)
    alpha = max(float(np.sum((y - mu) ** 2 - mu) / np.sum(mu**2)), ALPHA_FLOOR)
    ll = nb_loglik(y, mu, alpha)
    trace = [ll]
    converged = False
    iterations = 0
    for iterations in range(1, max_outer + 1):
        w = mu / (1.0 + alpha * mu)
        z = eta + (y - mu) / mu
        xtw = X.T * w
        try:
            target = np.linalg.solve(xtw @ X, xtw @ z)
        except np.linalg.LinAlgError:
            target = np.linalg.lstsq(xtw @ X, xtw @ z, rcond=None)[0]
        delta = target - beta
        step = 1.0
        for _ in range(40):
            cand = beta + step * delta
            eta_c = _clip_eta(X @ cand, diag)
            mu_c = np.exp(eta_c)
            ll_c = nb_loglik(y, mu_c, alpha)
            if ll_c >= ll - 1e-12:
                break
            step /= 2.0
        if ll_c < ll - 1e-12:  # no ascent step found; keep current beta
            cand, eta_c, mu_c = beta, eta, mu
        beta, eta, mu = cand, eta_c, mu_c

        alpha = _alpha_newton_step(y, mu, alpha)
        ll_new = nb_loglik(y, mu, alpha)
        trace.append(ll_new)
        if abs(ll_new - ll) <= tol * (1.0 + abs(ll)):
            ll = ll_new
            converged = True
            break
        ll = ll_new
    diag["ll_trace"] = trace

    if alpha <= ALPHA_COLLAPSE:
        warnings.warn("dispersion collapsed to its floor; reporting Poisson semantics")
        diag["alpha_at_floor"] = True
        diag["ll_trace"] = trace
        result = fit_poisson(design, tol=tol)
        result.model = "nb2"
        result.iterations = iterations
        result.diagnostics.update(diag)
        return result

    info = _nb_observed_information(X, y, beta, alpha)
    try:
        full_cov = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        full_cov = np.linalg.pinv(info)
    cov = full_cov[:p, :p]
    coef, se, zv, pv = _wald(design.column_names, beta, cov)
    diag["alpha_se"] = float(np.sqrt(full_cov[p, p])) if full_cov[p, p] > 0 else None
    return FitResult(
        model="nb2",
        column_names=list(design.column_names),
        coefficients=coef,
        std_errors=se,
        z_values=zv,
        p_values=pv,
        alpha=alpha,
        log_likelihood=ll,
        converged=converged,
        iterations=iterations,
        n=n,
        cov=cov,
        diagnostics=diag,
    )


@dataclass(frozen=True)
class OverdispersionTest:
    statistic: float
    p_value: float
    significant_at_01: bool


def overdispersion_test(nb: FitResult, pois: FitResult) -> OverdispersionTest:
    """Boundary-corrected likelihood-ratio test of alpha = 0.

    The statistic is 2(ll_NB - ll_Poisson); under the null the dispersion
    sits on the parameter boundary, so the p-value uses the 1/2 chi2_0 +
    1/2 chi2_1 mixture: p = 0.5 * P(chi2_1 >= LR) for LR > 0, else 1.
    """
    if nb.n != pois.n or nb.column_names != pois.column_names:
        raise ToolkitError("overdispersion test requires fits on the same design")
    lr = 2.0 * (nb.log_likelihood - pois.log_likelihood)
    if lr < -1e-6:
        raise InternalConsistencyError(
            f"NB log-likelihood below Poisson by {-lr / 2.0}; optimizer failure"
        )
    lr = max(lr, 0.0)
    p = 1.0 if lr == 0.0 else 0.5 * float(chi2.sf(lr, df=1))
    return OverdispersionTest(statistic=lr, p_value=p, significant_at_01=p < 0.01)


def irr(fit: FitResult) -> dict[str, dict[str, float]]:
    """Incidence rate ratios exp(coef) with 95% Wald intervals."""
    if not fit.converged:
        raise ToolkitError("fit did not converge; IRRs unavailable")
    out = {}
    for name in fit.column_names:
        b = fit.coefficients[name]
        se = fit.std_errors[name]
        out[name] = {
            "irr": math.exp(b),
            "ci_low": math.exp(b - 1.96 * se),
            "ci_high": math.exp(b + 1.96 * se),
        }
    return out


@dataclass(frozen=True)
class CurvePoint:
    p: float
    mu: float
    ci_low: float
    ci_high: float
    relative: float


def predict_curve(
    fit: FitResult,
    design: DesignMatrix,
    emotion: str,
    grid: Sequence[float],
) -> list[CurvePoint]:
    """Predicted count vs. one emotion probability, others at sample means.

    For each grid point the emotion column is set to p and every other
    column to its sample mean (dummies at sample proportions); the band is
    exp(x'b +/- 1.96*sqrt(x'Cov x)). ``relative`` is mu(p)/mu(0) =
    exp(coef * p), the rate-ratio panel.
    """
    if emotion not in fit.column_names:
        raise ValueError(f"column {emotion!r} not in the fitted model")
    for p in grid:
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"grid point {p} outside [0, 1]")
    idx = fit.column_names.index(emotion)
    beta = fit.coef_vector()
    xbar = design.X.mean(axis=0)
    points = []
    for p in grid:
        x = xbar.copy()
        x[idx] = p
        eta = float(x @ beta)
        var = float(x @ fit.cov @ x)
        half = 1.96 * math.sqrt(max(var, 0.0))
        points.append(
            CurvePoint(
                p=float(p),
                mu=math.exp(eta),
                ci_low=math.exp(eta - half),
                ci_high=math.exp(eta + half),
                relative=math.exp(beta[idx] * p),
            )
        )
    return points


def significance_stars(p_value: float) -> str:
    if not 0.0 <= p_value <= 1.0:
        raise ValueError(f"p-value {p_value} outside [0, 1]")
    if p_value < 0.001:
        return "***"
    if p_value < 0.01:
        return "**"
    if p_value < 0.05:
        return "*"
    return ""


def coefficient_table(fit: FitResult) -> list[dict]:
    """One row per coefficient: estimate, SE, z, p, stars, IRR, CI."""
    ratios = irr(fit)
    rows = []
    for name in fit.column_names:
        rows.append(
            {
                "coefficient": name,
                "estimate": fit.coefficients[name],
                "std_error": fit.std_errors[name],
                "z": fit.z_values[name],
                "p": fit.p_values[name],
                "stars": significance_stars(fit.p_values[name]),
                "irr": ratios[name]["irr"],
                "irr_ci_low": ratios[name]["ci_low"],
                "irr_ci_high": ratios[name]["ci_high"],
            }
        )
    return rows

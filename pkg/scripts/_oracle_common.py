"""Shared helpers for the oracle scripts.

Everything here is written from scratch against the file formats — no
imports from the package under test. Fits use scipy.optimize with numeric
gradients, a different optimizer family from the package's IRLS/Newton.
"""

from __future__ import annotations

import json
from datetime import date
from pathlib import Path

import numpy as np
from scipy.optimize import minimize
from scipy.special import gammaln

EMOTIONS = ["other_condemning", "other_praising", "other_suffering", "neutral"]
WEEKDAYS = ["mon", "tue", "wed", "thu", "fri", "sat", "sun"]


def read_jsonl(path):
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def weekday_name(record) -> str:
    return WEEKDAYS[date.fromisoformat(record["upload_date"]).weekday()]


def build_design(records, scores, response="views"):
    """Independent design build: intercept, emotions, log(duration+1),
    channel/month/weekday dummies with the first observed level dropped."""
    kept = sorted(
        (r for r in records if r.get(response) is not None), key=lambda r: r["video_id"]
    )
    y = np.array([float(r[response]) for r in kept])
    names = ["intercept"]
    cols = [np.ones(len(kept))]
    for emotion in EMOTIONS:
        names.append(emotion)
        cols.append(np.array([float(scores[r["video_id"]][emotion]) for r in kept]))
    names.append("log_duration")
    cols.append(np.log1p(np.array([float(r["duration_seconds"]) for r in kept])))
    for level in sorted({r["channel_id"] for r in kept})[1:]:
        names.append(f"channel:{level}")
        cols.append(np.array([1.0 if r["channel_id"] == level else 0.0 for r in kept]))
    months = [int(r["upload_date"][5:7]) for r in kept]
    for level in sorted(set(months))[1:]:
        names.append(f"month:{level}")
        cols.append(np.array([1.0 if m == level else 0.0 for m in months]))
    days = [weekday_name(r) for r in kept]
    present = [w for w in WEEKDAYS if w in set(days)]
    for level in present[1:]:
        names.append(f"weekday:{level}")
        cols.append(np.array([1.0 if d == level else 0.0 for d in days]))
    return y, np.column_stack(cols), names


def nb_negll(y, X):
    def fn(params):
        beta, log_alpha = params[:-1], params[-1]
        alpha = np.exp(log_alpha)
        mu = np.exp(np.clip(X @ beta, -30.0, 30.0))
        r = 1.0 / alpha
        ll = np.sum(
            gammaln(y + r)
            - gammaln(r)
            - gammaln(y + 1)
            + r * np.log(r / (r + mu))
            + y * np.log(mu / (r + mu))
        )
        return -ll

    return fn


def poisson_negll(y, X):
    def fn(beta):
        mu = np.exp(np.clip(X @ beta, -30.0, 30.0))
        return -np.sum(y * np.log(mu) - mu - gammaln(y + 1))

    return fn


def fit_poisson_scipy(y, X):
    fn = poisson_negll(y, X)
    x0 = np.zeros(X.shape[1])
    x0[0] = np.log(max(y.mean(), 1e-8))
    res = minimize(fn, x0, method="BFGS", options={"gtol": 1e-7, "maxiter": 20000})
    res = minimize(fn, res.x, method="BFGS", options={"gtol": 1e-7, "maxiter": 20000})
    return res.x, -fn(res.x)


def fit_nb_scipy(y, X):
    """NB2 maximum likelihood over (beta, log alpha), numeric gradients."""
    fn = nb_negll(y, X)
    beta0, _ = fit_poisson_scipy(y, X)
    mu = np.exp(np.clip(X @ beta0, -30.0, 30.0))
    mom = max(float(np.sum((y - mu) ** 2 - mu) / np.sum(mu**2)), 1e-4)
    x0 = np.append(beta0, np.log(mom))
    res = minimize(fn, x0, method="BFGS", options={"gtol": 1e-7, "maxiter": 20000})
    res = minimize(fn, res.x, method="BFGS", options={"gtol": 1e-7, "maxiter": 20000})
    beta = res.x[:-1]
    alpha = float(np.exp(res.x[-1]))
    return beta, alpha, -fn(res.x)


def fixture_dir() -> Path:
    return Path(__file__).resolve().parent.parent / "fixtures"


def write_oracle(name: str, payload: dict):
    path = fixture_dir() / "oracle" / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"wrote {path}")

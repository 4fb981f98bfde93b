"""Render figures from pipeline artifacts to PNG files.

Each renderer reads the delimited artifact a stage already wrote (never the
raw corpus), so figures can be regenerated from any completed stage. All
rendering uses the Agg backend; nothing here affects numeric outputs.
"""

from __future__ import annotations

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .categories import CATEGORY_ORDER  # noqa: E402

_DPI = 150


def _read_csv(path: Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def render_distribution(out_dir: Path) -> Path | None:
    src = out_dir / "distribution.csv"
    if not src.exists():
        return None
    rows = _read_csv(src)
    by_country: dict[str, dict[str, float]] = defaultdict(dict)
    for row in rows:
        by_country[row["country"]][row["category"]] = float(row["proportion"])
    fig, ax = plt.subplots(figsize=(8, 4.5))
    width = 0.8 / max(len(by_country), 1)
    xs = range(len(CATEGORY_ORDER))
    for i, (country, props) in enumerate(sorted(by_country.items())):
        ax.bar(
            [x + i * width for x in xs],
            [100.0 * props.get(cat, 0.0) for cat in CATEGORY_ORDER],
            width=width,
            label=country,
        )
    ax.set_xticks([x + width * (len(by_country) - 1) / 2 for x in xs])
    ax.set_xticklabels(CATEGORY_ORDER, rotation=30, ha="right")
    ax.set_ylabel("share of videos (%)")
    ax.set_title("Primary emotion distribution")
    ax.legend()
    fig.tight_layout()
    dest = out_dir / "fig_distribution.png"
    fig.savefig(dest, dpi=_DPI)
    plt.close(fig)
    return dest


def render_curves(out_dir: Path) -> list[Path]:
    rendered = []
    for src in sorted(out_dir.glob("curves_*.csv")):
        rows = _read_csv(src)
        p = [float(r["p"]) for r in rows]
        fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
        ax1.plot(p, [float(r["mu"]) for r in rows], color="tab:blue")
        ax1.fill_between(
            p,
            [float(r["ci_low"]) for r in rows],
            [float(r["ci_high"]) for r in rows],
            alpha=0.25,
            color="tab:blue",
        )
        ax1.set_xlabel("emotion probability")
        ax1.set_ylabel("predicted count")
        ax2.plot(p, [float(r["relative"]) for r in rows], color="tab:orange")
        ax2.axhline(1.0, linestyle=":", color="gray")
        ax2.set_xlabel("emotion probability")
        ax2.set_ylabel("rate ratio vs p=0")
        fig.suptitle(src.stem.replace("curves_", "").replace("_", " "))
        fig.tight_layout()
        dest = out_dir / f"fig_{src.stem}.png"
        fig.savefig(dest, dpi=_DPI)
        plt.close(fig)
        rendered.append(dest)
    return rendered


def render_bootstrap(out_dir: Path) -> list[Path]:
    rendered = []
    for src in sorted(out_dir.glob("bootstrap_*.csv")):
        rows = _read_csv(src)
        estimates = [float(r["estimate"]) for r in rows]
        if not estimates:
            continue
        ordered = sorted(estimates)
        lo = ordered[max(0, int(0.025 * len(ordered)) - 1)]
        hi = ordered[min(len(ordered) - 1, int(0.975 * len(ordered)))]
        fig, ax = plt.subplots(figsize=(7, 4))
        ax.hist(estimates, bins=min(40, max(10, len(estimates) // 10)), color="tab:blue", alpha=0.8)
        ax.axvline(lo, color="tab:red", linestyle="--")
        ax.axvline(hi, color="tab:red", linestyle="--")
        ax.set_xlabel("coefficient estimate")
        ax.set_ylabel("replicates")
        ax.set_title(src.stem.replace("bootstrap_", "").replace("_", " "))
        fig.tight_layout()
        dest = out_dir / f"fig_{src.stem}.png"
        fig.savefig(dest, dpi=_DPI)
        plt.close(fig)
        rendered.append(dest)
    return rendered


def render_per_channel(out_dir: Path) -> list[Path]:
    rendered = []
    for src in sorted(out_dir.glob("per_channel_*.csv")):
        rows = _read_csv(src)
        if not rows:
            continue
        fig, ax = plt.subplots(figsize=(7, 0.5 * len(rows) + 1.5))
        for i, row in enumerate(rows):
            est = float(row["estimate"])
            ax.plot([float(row["ci_low"]), float(row["ci_high"])], [i, i], color="tab:blue")
            ax.plot([est], [i], "o", color="tab:blue")
        ax.axvline(0.0, linestyle=":", color="gray")
        ax.set_yticks(range(len(rows)))
        ax.set_yticklabels([r["channel_id"] for r in rows])
        ax.set_xlabel("coefficient with 95% CI")
        ax.set_title(src.stem.replace("per_channel_", "").replace("_", " "))
        fig.tight_layout()
        dest = out_dir / f"fig_{src.stem}.png"
        fig.savefig(dest, dpi=_DPI)
        plt.close(fig)
        rendered.append(dest)
    return rendered


def render_growth(out_dir: Path) -> Path | None:
    src = out_dir / "growth_summary.csv"
    if not src.exists():
        return None
    rows = _read_csv(src)
    labels = [f"{r['start_day']}-{r['end_day']}" for r in rows]
    means = [float(r["mean_rate"]) if r["mean_rate"] else 0.0 for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar(labels, means, color="tab:green", alpha=0.8)
    ax.set_xlabel("day window")
    ax.set_ylabel("mean daily growth (%)")
    ax.set_title("View-growth stability")
    fig.tight_layout()
    dest = out_dir / "fig_growth.png"
    fig.savefig(dest, dpi=_DPI)
    plt.close(fig)
    return dest


def render_all(out_dir: str | Path) -> list[Path]:
    """Render every figure whose source artifact exists; returns the PNGs."""
    out_dir = Path(out_dir)
    rendered: list[Path] = []
    single = render_distribution(out_dir)
    if single:
        rendered.append(single)
    rendered.extend(render_curves(out_dir))
    rendered.extend(render_bootstrap(out_dir))
    rendered.extend(render_per_channel(out_dir))
    single = render_growth(out_dir)
    if single:
        rendered.append(single)
    return rendered

"""Matplotlib renderings of a report dict.

Figures are drawn from the JSON-ready report (not the snapshot) so a report
imported from a corpus file plots exactly like one computed live. Headless
backend; every function writes PNG files and returns their paths.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  backend must be pinned first

_STYLE = {
    "figure.figsize": (7.0, 4.2),
    "figure.dpi": 110,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _bar(ax, histogram: dict[str, int], color: str) -> None:
    labels = list(histogram)
    values = [histogram[k] for k in labels]
    ax.bar(range(len(labels)), values, color=color)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=20, ha="right")


def _save(fig, outdir: Path, name: str, written: list[Path]) -> None:
    path = outdir / name
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    written.append(path)


def render_figures(report: dict, outdir: str | Path) -> list[Path]:
    """Write every figure the report has data for; skip the rest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    with plt.rc_context(_STYLE):
        surv = report["survival"]
        if surv["grid_days"]:
            fig, ax = plt.subplots()
            ax.plot(surv["grid_days"], surv["gap_curve"], label="longest response gap")
            ax.plot(
                surv["grid_days"],
                surv["duration_curve"],
                label="total duration",
                linestyle="--",
            )
            cutoff = surv["cutoff_95_days"]
            if cutoff is not None:
                ax.axvline(cutoff, color="crimson", linewidth=1)
                ax.annotate(
                    f"95% cutoff: {cutoff:.1f}d",
                    xy=(cutoff, 0.5),
                    xytext=(5, 0),
                    textcoords="offset points",
                    color="crimson",
                )
            ax.set_xscale("log")
            ax.set_xlabel("threshold (days)")
            ax.set_ylabel("fraction of engagements at or above")
            ax.set_ylim(0, 1.02)
            ax.set_title("Engagement survival")
            ax.legend()
            _save(fig, outdir, "survival.png", written)

        resp = report["response_invocation"]
        if resp["count"]:
            fig, ax = plt.subplots()
            _bar(ax, resp["latency_histogram"], "#35618f")
            ax.set_ylabel("attacker replies")
            ax.set_title("Attacker reply latency")
            _save(fig, outdir, "latency_histogram.png", written)

        ids = report["ids"]
        if ids["count"]:
            fig, ax = plt.subplots()
            _bar(ax, ids["speed_histogram"], "#2f7d4f")
            ax.set_ylabel("engagements")
            ax.set_title("Turns to first disclosure")
            _save(fig, outdir, "disclosure_speed.png", written)

        har = report["har"]
        if har["reviewed"]:
            fig, ax = plt.subplots()
            _bar(ax, har["edit_histogram"], "#8f5d35")
            ax.set_ylabel("suggestions")
            ax.set_title("Operator edit distance")
            _save(fig, outdir, "edit_histogram.png", written)

        fresh = report["freshness_by_n"]
        orders = [int(n) for n in fresh]
        series = {
            "overall": [
                (fresh[str(n)]["overall"] or {}).get("mean") for n in orders
            ],
            "attacker": [
                (fresh[str(n)]["by_direction"]["attacker"] or {}).get("mean") for n in orders
            ],
            "defender": [
                (fresh[str(n)]["by_direction"]["defender"] or {}).get("mean") for n in orders
            ],
        }
        if any(v is not None for v in series["overall"]):
            fig, ax = plt.subplots()
            for label, values in series.items():
                pts = [(n, v) for n, v in zip(orders, values) if v is not None]
                if pts:
                    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=label)
            ax.set_xlabel("n-gram order")
            ax.set_ylabel("mean freshness")
            ax.set_ylim(0, 1.02)
            ax.set_title("Message freshness by n-gram order")
            ax.legend()
            _save(fig, outdir, "freshness_by_n.png", written)

        takeoff = report["takeoff"]
        weekday = {k: v for k, v in takeoff["by_weekday"].items()}
        if any(v is not None for v in weekday.values()):
            fig, ax = plt.subplots()
            labels = list(weekday)
            values = [0.0 if weekday[k] is None else weekday[k] * 100 for k in labels]
            ax.bar(range(len(labels)), values, color="#5d3a8f")
            ax.set_xticks(range(len(labels)))
            ax.set_xticklabels([d[:3] for d in labels])
            ax.set_ylabel("takeoff %")
            ax.set_title("Takeoff by seeding weekday (UTC)")
            _save(fig, outdir, "takeoff_weekday.png", written)

    return written

"""Report rendering: delimited per-case output plus matplotlib figures.

`write_reports` drops one CSV and one PNG per suite into the target
directory, along with a combined summary pair.  `newton_polygon_figure`
plots the coefficient-valuation points of a polynomial together with the
lower hull the solver actually used.
"""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import EXPECTED_DIVERGENCE, FAIL, PASS, SKIP, UNKNOWN, SuiteReport
from .solver import UPoly, newton_polygon

_COLUMNS = [
    "suite",
    "q",
    "case_id",
    "status",
    "input",
    "expected",
    "got",
    "witnesses",
    "residuals",
    "note",
]

_STATUS_ORDER = [PASS, FAIL, UNKNOWN, SKIP, EXPECTED_DIVERGENCE]
_STATUS_COLORS = {
    PASS: "#2a9d4e",
    FAIL: "#c0392b",
    UNKNOWN: "#e6a700",
    SKIP: "#95a5a6",
    EXPECTED_DIVERGENCE: "#5b7bd5",
}


def write_csv(rows: list[dict], path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)


def suite_figure(reports: list[SuiteReport], path: Path, title: str) -> None:
    labels = [f"{r.suite} q={r.q}" for r in reports]
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(labels) + 2), 4))
    bottoms = [0] * len(reports)
    for status in _STATUS_ORDER:
        heights = [r.tally().get(status, 0) for r in reports]
        if not any(heights):
            continue
        ax.bar(
            labels,
            heights,
            bottom=bottoms,
            label=status,
            color=_STATUS_COLORS[status],
        )
        bottoms = [b + h for b, h in zip(bottoms, heights)]
    ax.set_ylabel("cases")
    ax.set_title(title)
    ax.legend(fontsize=8)
    plt.setp(ax.get_xticklabels(), rotation=45, ha="right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_reports(reports: list[SuiteReport], directory: str | Path) -> list[Path]:
    """One CSV + PNG per suite name, plus summary.csv / summary.png."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    by_suite: dict[str, list[SuiteReport]] = {}
    for rep in reports:
        by_suite.setdefault(rep.suite, []).append(rep)
    all_rows: list[dict] = []
    for suite, reps in by_suite.items():
        rows = [row for rep in reps for row in rep.rows()]
        all_rows.extend(rows)
        csv_path = directory / f"{suite}.csv"
        write_csv(rows, csv_path)
        written.append(csv_path)
        fig_path = directory / f"{suite}.png"
        suite_figure(reps, fig_path, f"suite outcomes: {suite}")
        written.append(fig_path)
    summary_csv = directory / "summary.csv"
    write_csv(all_rows, summary_csv)
    written.append(summary_csv)
    summary_png = directory / "summary.png"
    suite_figure(reports, summary_png, "suite outcomes")
    written.append(summary_png)
    return written


def newton_polygon_figure(g: UPoly, path: str | Path) -> Path:
    np_ = newton_polygon(g)
    fig, ax = plt.subplots(figsize=(6, 4))
    xs = [i for i, _ in np_.points]
    ys = [float(v) for _, v in np_.points]
    ax.scatter(xs, ys, zorder=3, label="coefficient valuations")
    hx = [i for i, _ in np_.vertices]
    hy = [float(v) for _, v in np_.vertices]
    ax.plot(hx, hy, "-o", color="#c0392b", zorder=2, label="lower hull")
    for seg in np_.segments:
        mid_x = (seg.i_start + seg.i_end) / 2
        v0 = dict(np_.vertices)[seg.i_start]
        mid_y = float(v0 + seg.slope * (mid_x - seg.i_start))
        ax.annotate(
            f"root val {seg.root_valuation}",
            (mid_x, mid_y),
            textcoords="offset points",
            xytext=(0, 8),
            fontsize=8,
        )
    ax.set_xlabel("coefficient degree")
    ax.set_ylabel("valuation")
    ax.set_title("Newton polygon")
    ax.legend(fontsize=8)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path

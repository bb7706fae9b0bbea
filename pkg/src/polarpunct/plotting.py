"""Render FER sweep results as matplotlib figures."""

from __future__ import annotations

from typing import Sequence

from matplotlib.figure import Figure

_MARKERS = "osd^v<>ph"


def fer_figure(rows: Sequence[dict], title: str | None = None) -> Figure:
    """Semilog FER-vs-SNR figure, one curve per pattern; zero estimates are gaps."""
    fig = Figure(figsize=(6.4, 4.4))
    ax = fig.subplots()
    by_pattern: dict[int, list[dict]] = {}
    for row in rows:
        by_pattern.setdefault(int(row["pattern_id"]), []).append(row)
    for idx, (pid, cells) in enumerate(sorted(by_pattern.items())):
        cells = sorted(cells, key=lambda r: r["ebn0_db"])
        xs = [r["ebn0_db"] for r in cells if r["fer"] > 0]
        ys = [r["fer"] for r in cells if r["fer"] > 0]
        label = f"Np={cells[0]['np']} {cells[0]['model']}/{cells[0]['method']}"
        ax.semilogy(xs, ys, marker=_MARKERS[idx % len(_MARKERS)], label=label)
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("Frame error rate")
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.4)
    ax.legend(loc="lower left", fontsize=8)
    return fig


def save_fer_plot(rows: Sequence[dict], path, title: str | None = None) -> None:
    fer_figure(rows, title=title).savefig(path, dpi=150, bbox_inches="tight")

"""Figure rendering for the report path.

Each CSV emitted by the report writer gets a companion PNG.  Rendering is
deliberately plain: one axes, labeled columns, an optional reference line
(the pre-Schwarzian test plots carry the y = 1 threshold).  All figures
use the Agg backend so runs stay headless.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _read_csv(path):
    with open(path, "r", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header = rows[0]
    data = [[float(v) for v in row] for row in rows[1:]]
    columns = list(zip(*data)) if data else [[] for _ in header]
    return header, columns


def render_csv(csv_path, png_path, kind: str = "line",
               title: str = "", ylabel: str = "", hline: float | None = None):
    """Render one emitted CSV to a PNG next to it."""
    header, columns = _read_csv(csv_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if kind == "mesh" and len(header) >= 3:
        re_idx = header.index("re")
        im_idx = header.index("im")
        ax.plot(columns[re_idx], columns[im_idx], lw=0.8)
        ax.set_aspect("equal")
        ax.set_xlabel("Re w")
        ax.set_ylabel("Im w")
    else:
        x = columns[0]
        for label, ys in zip(header[1:], columns[1:]):
            if kind == "scatter":
                ax.plot(x, ys, ".", ms=3, label=label)
            else:
                ax.plot(x, ys, lw=1.2, label=label)
        if kind == "loglog" and len(x):
            ax.set_xscale("log")
            ax.set_yscale("log")
        if hline is not None:
            ax.axhline(hline, color="crimson", lw=1.0, ls="--")
        ax.set_xlabel(header[0])
        ax.set_ylabel(ylabel)
        if len(header) > 1:
            ax.legend(fontsize=8)
    ax.set_title(title, fontsize=10)
    fig.tight_layout()
    fig.savefig(png_path, dpi=110)
    plt.close(fig)

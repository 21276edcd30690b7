"""Matplotlib rendering of scenario tables.

Imported only when figures are requested, so the numerical core carries no
graphics dependency.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .report import FigureSpec, Outcome  # noqa: E402

RC = {
    "figure.figsize": (7.0, 4.2),
    "font.size": 10,
    "axes.grid": True,
    "grid.alpha": 0.3,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 120,
    "savefig.bbox": "tight",
    "svg.hashsalt": "pathmeasure",
}


def render(spec: FigureSpec, outcome: Outcome, directory: Path) -> Path:
    table = outcome.table(spec.table)
    x = table.column(spec.x).astype(float)
    path = directory / spec.filename
    with plt.rc_context(RC):
        fig, ax = plt.subplots()
        for name in spec.ys:
            y = table.column(name).astype(float)
            if spec.style == "step":
                ax.step(x, y, where="mid", label=name, linewidth=1.0)
            elif spec.style == "marker":
                ax.plot(x, y, "o-", label=name)
            else:
                ax.plot(x, y, label=name, linewidth=1.2)
        ax.set_title(spec.title)
        ax.set_xlabel(spec.xlabel)
        ax.set_ylabel(spec.ylabel)
        if len(spec.ys) > 1:
            ax.legend(frameon=False)
        # fixed metadata keeps the PNG bytes reproducible
        fig.savefig(path, metadata={"Software": None})
        plt.close(fig)
    return path


def render_all(outcome: Outcome, directory: Path) -> list[Path]:
    directory.mkdir(parents=True, exist_ok=True)
    return [render(spec, outcome, directory) for spec in outcome.figures]

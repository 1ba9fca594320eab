"""SVG line charts of the per-N series in an experiment report."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import ValidationError  # noqa: E402
from .experiments.report import ExperimentReport  # noqa: E402


def render_plot(report: ExperimentReport, path) -> None:
    """Write one polyline per ``name[N=...]`` series of ``report`` to ``path``.

    ``p_fail`` series are drawn on a log axis, with zeros clipped to half a
    trial so they stay visible.  Output bytes depend only on the report.
    """
    series = report.series()
    if not series or not any(series.values()):
        raise ValidationError(f"report {report.name!r} has no per-N series to plot")
    log_y = any(name.startswith("p_fail") for name in series)
    floor = 0.5 / max(int(report.params.get("trials", 1)), 1)

    with plt.rc_context({"svg.hashsalt": "virtperm", "svg.fonttype": "path"}):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for name, pts in sorted(series.items()):
            xs = [n for n, _ in pts]
            ys = [max(v, floor) if log_y else v for _, v in pts]
            (line,) = ax.plot(xs, ys, marker="o", label=name)
            line.set_gid(f"series-{name}")
        ax.set_xscale("log")
        if log_y:
            ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_title(f"{report.name} (seed {report.seed})")
        ax.legend()
        fig.tight_layout()
        try:
            fig.savefig(path, format="svg", metadata={"Date": None})
        finally:
            plt.close(fig)

"""Static log-log SVG charts of benchmark CSVs."""
from __future__ import annotations

import io
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .bench import read_csv  # noqa: E402
from .core import ConfigError  # noqa: E402

METRICS = ("feas", "opt", "dist")
_TITLES = {"feas": "feasibility gap", "opt": "optimality gap", "dist": "distance to solution"}
_STYLE = {
    "svg.hashsalt": "hvivr",
    "svg.fonttype": "none",
    "path.simplify": False,
}


def _positive(xs, ys):
    pts = [(x, y) for x, y in zip(xs, ys) if x is not None and y is not None and x > 0 and y > 0]
    return [p[0] for p in pts], [p[1] for p in pts]


def emit_svg(csv_paths, out_path, metrics=None, labels=None) -> list:
    """Write one log-log panel per metric; returns the notes about omitted series.

    Solid lines are ergodic averages, dashed lines the snapshot point ``w``.
    Non-positive values cannot sit on a log axis and are dropped.  A metric
    that is empty in every CSV is left out, with a note in the figure.
    """
    if not csv_paths:
        raise ConfigError("need at least one CSV")
    data = [read_csv(p) for p in csv_paths]
    labels = list(labels) if labels else [os.path.splitext(os.path.basename(p))[0] for p in csv_paths]
    if len(labels) != len(data):
        raise ConfigError("one label per CSV")
    metrics = list(metrics) if metrics else list(METRICS)
    for m in metrics:
        if m not in METRICS:
            raise ConfigError(f"unknown metric {m!r}; choose from {METRICS}")

    notes, panels = [], []
    for m in metrics:
        series = []
        for lab, cols in zip(labels, data):
            for suffix, style in (("erg", "-"), ("w", "--")):
                xs, ys = _positive(cols["epochs"], cols[f"{m}_{suffix}"])
                if xs:
                    series.append((f"{lab} ({'ergodic' if suffix == 'erg' else 'w'})", xs, ys, style, lab))
                else:
                    notes.append(f"{m}_{suffix} of {lab}: no positive values, series omitted")
        if series:
            panels.append((m, series))
    if not panels:
        notes.append("no plottable metric")

    with matplotlib.rc_context(_STYLE):
        npan = max(1, len(panels))
        fig, axes = plt.subplots(1, npan, figsize=(5.0 * npan, 4.0), squeeze=False)
        colours = {lab: f"C{i % 10}" for i, lab in enumerate(labels)}
        for ax, (m, series) in zip(axes[0], panels):
            for name, xs, ys, style, lab in series:
                ax.plot(xs, ys, linestyle=style, color=colours[lab], label=name, gid=name)
            ax.set_xscale("log")
            ax.set_yscale("log")
            ax.set_xlabel("epochs")
            ax.set_title(_TITLES[m])
            ax.legend(fontsize="small")
        if not panels:
            axes[0][0].set_axis_off()
        if notes:
            fig.text(0.01, 0.01, "; ".join(notes), fontsize="x-small", gid="note")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None, "Creator": None})
        plt.close(fig)
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(buf.getvalue())
    return notes

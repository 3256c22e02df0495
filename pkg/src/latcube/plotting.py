"""Static log-scale figures for sweep results."""

from __future__ import annotations

import warnings

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .errors import DomainError

PLOT_FLOOR = 1e-16

# keep text as text in SVG output so legends stay grep-able and diffs small
matplotlib.rcParams["svg.fonttype"] = "none"
matplotlib.rcParams["svg.hashsalt"] = "latcube"

_MARKERS = ["o", "x", "s", "^", "d", "v", "*", "+"]


def render_plot(groups, path, title: str | None = None, ylabel: str = "relative error") -> None:
    """Render one error-decay polyline per labeled row group to a file.

    ``groups`` is an ordered mapping label -> rows (or an iterable of
    ``(label, rows)`` pairs); the legend lists labels in input order.  The
    x axis is the cross budget N (linear), the y axis the error (log).
    Zero errors cannot sit on a log axis, so they are clamped to 1e-16 and
    a warning is emitted.  The format follows the file extension; ``.svg``
    gives a text-diffable vector file.
    """
    pairs = list(groups.items()) if hasattr(groups, "items") else list(groups)
    if not pairs:
        raise DomainError("render_plot needs at least one group")
    fig, ax = plt.subplots(figsize=(7.0, 5.0))
    try:
        for i, (label, rows) in enumerate(pairs):
            xs = [r.N for r in rows]
            ys = []
            for r in rows:
                if r.eps_inf < PLOT_FLOOR:
                    warnings.warn(
                        f"clamping eps_inf={r.eps_inf!r} at N={r.N} to the plot floor "
                        f"{PLOT_FLOOR}",
                        stacklevel=2,
                    )
                    ys.append(PLOT_FLOOR)
                else:
                    ys.append(r.eps_inf)
            ax.plot(xs, ys, marker=_MARKERS[i % len(_MARKERS)], markersize=3.5,
                    linewidth=1.2, label=str(label), gid=f"series-{i}-{label}")
        ax.set_yscale("log")
        ax.set_xlabel("N")
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(loc="best")
        fig.tight_layout()
        try:
            fig.savefig(path)
        except OSError as exc:
            raise OSError(f"cannot write figure to {path}: {exc}") from exc
    finally:
        plt.close(fig)

"""Line charts of CSV columns as standalone, byte-reproducible SVG."""
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .errors import ConfigurationError  # noqa: E402
from .io import read_csv  # noqa: E402

matplotlib.rcParams["svg.hashsalt"] = "micropolar"
matplotlib.rcParams["svg.fonttype"] = "none"
matplotlib.rcParams["path.simplify"] = False


def line_chart(path, series, xlabel="t", ylabel="", loglog=True, title=None):
    """``series`` is a list of ``(label, x, y)``; at least one nonempty series is required."""
    if not series:
        raise ConfigurationError("nothing to plot: no series given")
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    try:
        for label, x, y in series:
            x = np.asarray(x, dtype=float)
            y = np.asarray(y, dtype=float)
            if x.size == 0 or x.size != y.size:
                raise ConfigurationError(f"series {label!r} is empty or ragged")
            if loglog:
                keep = (x > 0) & (y > 0) & np.isfinite(y)
                x, y = x[keep], y[keep]
                if x.size == 0:
                    raise ConfigurationError(f"series {label!r} has no positive samples for a log-log plot")
            ax.plot(x, y, label=label, linewidth=1.2)
        if loglog:
            ax.set_xscale("log")
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend()
        fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    finally:
        plt.close(fig)
    return path


def plot_csv(csv_path, out_path, x="t", columns=None, loglog=True, labels=None):
    """Plot ``columns`` of a CSV written by this package against ``x``."""
    header, data = read_csv(csv_path)
    if x not in data:
        raise ConfigurationError(f"column {x!r} not in {csv_path}")
    cols = columns or [h for h in header if h != x]
    missing = [c for c in cols if c not in data]
    if missing:
        raise ConfigurationError(f"columns {missing} not in {csv_path}")
    if data[x].size == 0:
        raise ConfigurationError(f"{csv_path} has no data rows")
    labels = labels or cols
    series = [(lab, data[x], data[c]) for lab, c in zip(labels, cols)]
    return line_chart(out_path, series, xlabel=x, loglog=loglog)

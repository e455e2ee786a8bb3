"""SVG line charts from the sweep and BSV-scan CSV files (optional ``plot`` extra)."""

import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import numpy as np

logger = logging.getLogger(__name__)


def _pyplot():
    try:
        import matplotlib
    except ImportError as e:
        raise ImportError(
            "matplotlib is required for plots; install joint-uncertainty[plot]"
        ) from e
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def plot_convergence(rows: Sequence[Mapping[str, str]], path: Path) -> Path:
    """R against the mode count, one curve per photon number, with 1 - 2/n dashed."""
    plt = _pyplot()
    series: Dict[int, List[tuple]] = {}
    for row in rows:
        if row.get("status", "ok") != "ok":
            continue
        series.setdefault(int(row["n"]), []).append((int(row["m"]), float(row["R"])))
    if not series:
        raise ValueError("no successful sweep rows to plot")

    fig, ax = plt.subplots(figsize=(7, 5))
    for n in sorted(series):
        points = sorted(series[n])
        modes, products = zip(*points)
        (line,) = ax.plot(modes, products, "o-", label=f"n = {n}")
        ax.axhline(1.0 - 2.0 / n, color=line.get_color(), linestyle="--", linewidth=1)
    ax.set_xlabel("modes m")
    ax.set_ylabel("min dtau^2 dOmega^2")
    ax.set_ylim(bottom=0.0)
    ax.legend()
    ax.grid(True, alpha=0.3)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path


def plot_bsv_scaling(
    rows: Sequence[Mapping[str, str]], path: Path, fit: Optional[Mapping[str, float]] = None
) -> Path:
    """log-log chart of 1 - R_min against <n>, with the fitted line if given."""
    plt = _pyplot()
    data = sorted((float(r["mean_n"]), float(r["product"])) for r in rows)
    if not data:
        raise ValueError("no BSV scan rows to plot")
    mean_n = np.array([n for n, _ in data])
    deficit = 1.0 - np.array([r for _, r in data])

    fig, ax = plt.subplots(figsize=(7, 5))
    ax.loglog(mean_n, deficit, "o", label="1 - R_min")
    ax.loglog(mean_n, 2.0 / mean_n, ":", color="gray", label="2/<n>")
    if fit:
        ax.loglog(mean_n, fit["c"] * mean_n ** (-fit["k"]), "-",
                  label=f"c <n>^-k, k={fit['k']:.3f}, c={fit['c']:.3f}")
    ax.set_xlabel("<n>")
    ax.set_ylabel("1 - min dtau^2 dOmega^2")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", bbox_inches="tight")
    plt.close(fig)
    logger.info(f"Wrote {path}")
    return path

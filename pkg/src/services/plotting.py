"""
SVG charts of sweep results: one chart per metric, x = SNR (dB), one line per
estimator, either averaged over the d grid or faceted by d.
"""

import math
from collections import defaultdict
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from loguru import logger  # noqa: E402

from src.core.exceptions import ConfigurationError, ResultsFormatError  # noqa: E402
from src.services.harness import AggregateRow  # noqa: E402

METRIC_COLUMNS = {
    "mse": "mean_mse",
    "ser": "mean_ser",
    "throughput": "mean_throughput",
}
METRIC_LABELS = {
    "mse": "Mean squared error",
    "ser": "Symbol error rate",
    "throughput": "Throughput (bits / subcarrier)",
}
LOG_METRICS = {"mse", "ser"}
LOG_FLOOR = 1e-6
# Text stays as <text> elements; fixed salt keeps element ids stable
SVG_RC = {"svg.fonttype": "none", "svg.hashsalt": "groupest"}


def _curves(
    rows: Sequence[AggregateRow], column: str
) -> Dict[str, Tuple[List[float], List[float]]]:
    """Per-estimator (snr, value) pairs, averaging rows that share an SNR."""
    buckets: Dict[str, Dict[float, List[float]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        buckets[row.estimator][row.snr_db].append(getattr(row, column))

    curves = {}
    for estimator, by_snr in buckets.items():
        snrs = sorted(by_snr)
        curves[estimator] = (snrs, [float(np.mean(by_snr[s])) for s in snrs])
    return curves


def _draw(ax, rows: Sequence[AggregateRow], metric: str) -> bool:
    """Draw one panel; True when some value was raised to the log floor."""
    clamped = False
    for estimator, (snrs, values) in sorted(_curves(rows, METRIC_COLUMNS[metric]).items()):
        if metric in LOG_METRICS:
            clamped = clamped or any(v < LOG_FLOOR for v in values)
            values = [max(v, LOG_FLOOR) for v in values]
        ax.plot(snrs, values, marker="o", label=estimator)

    if metric in LOG_METRICS:
        ax.set_yscale("log")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel(METRIC_LABELS[metric])
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    return clamped


def emit_plots(
    rows: Sequence[AggregateRow],
    metric: str,
    path: Union[str, Path],
    facet_by_d: bool = False,
) -> Path:
    """Render one metric to a self-contained SVG file."""
    if metric not in METRIC_COLUMNS:
        raise ConfigurationError(
            f"Unknown metric '{metric}', expected one of {sorted(METRIC_COLUMNS)}",
            config_key="metric",
        )
    if not rows:
        raise ResultsFormatError("No result rows to plot")

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with plt.rc_context(SVG_RC):
        _render(rows, metric, path, facet_by_d)
    logger.info(f"Saved {metric} chart to {path}")
    return path


def _render(
    rows: Sequence[AggregateRow], metric: str, path: Path, facet_by_d: bool
) -> None:
    channels = sorted({row.channel for row in rows})

    if facet_by_d:
        d_values = sorted({row.d for row in rows})
        ncols = min(3, len(d_values))
        nrows = math.ceil(len(d_values) / ncols)
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(5 * ncols, 4 * nrows), squeeze=False
        )
        clamped = False
        for ax, d in zip(axes.flat, d_values):
            clamped = _draw(ax, [r for r in rows if r.d == d], metric) or clamped
            ax.set_title(f"d = {d}")
        for ax in list(axes.flat)[len(d_values) :]:
            ax.set_visible(False)
    else:
        fig, ax = plt.subplots(figsize=(6, 4.5))
        clamped = _draw(ax, rows, metric)
        ax.set_title(f"{METRIC_LABELS[metric]}, averaged over d")

    fig.suptitle(f"Channel: {', '.join(channels)}")
    if clamped:
        fig.text(
            0.01,
            0.01,
            f"values below {LOG_FLOOR:g} drawn at {LOG_FLOOR:g}",
            fontsize=8,
            style="italic",
        )

    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)

"""
Monte Carlo sweep driver.

A sweep visits every (d, SNR) cell of the configured grid, runs K(d) trials
per cell and reduces them to one AggregateRow per (estimator, d, SNR).
Every trial has its own seed derived from (master_seed, channel, d, snr,
trial), so a cell's numbers do not depend on which other cells are in the
grid or on the order in which workers finish.
"""

import csv
import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from pydantic import BaseModel

from config.simulation_config import TRIALS_AUTO, SimConfig
from src.core.exceptions import (
    ConfigurationError,
    ResultsFormatError,
    SimulationException,
    SweepCellError,
)
from src.services.channel import ChannelModel, pdp_for
from src.services.estimators import Estimator
from src.services.link import (
    ToneAllocation,
    TrialMetrics,
    lmmse_filter_for,
    run_trial,
)
from src.utils.metadata import run_metadata

CSV_COLUMNS = (
    "channel",
    "estimator",
    "d",
    "snr_db",
    "trials",
    "mean_mse",
    "stderr_mse",
    "mean_ser",
    "stderr_ser",
    "mean_ber",
    "mean_throughput",
    "mean_chosen_d",
)
_INT_COLUMNS = {"d", "trials"}
_TEXT_COLUMNS = {"channel", "estimator"}


class AggregateRow(BaseModel):
    """Per-cell averages over K(d) trials for one estimator."""

    channel: str
    estimator: str
    d: int
    snr_db: float
    trials: int
    mean_mse: float
    stderr_mse: float
    mean_ser: float
    stderr_ser: float
    mean_ber: float
    mean_throughput: float
    mean_chosen_d: Optional[float] = None


def trials_for(d: int, mode: Union[str, int] = TRIALS_AUTO) -> int:
    """K(d): 300 for d <= 8, 200 for d <= 16, 100 beyond; fixed modes pass through."""
    if str(mode).strip().lower() == TRIALS_AUTO:
        if d <= 8:
            return 300
        if d <= 16:
            return 200
        return 100

    try:
        count = int(mode)
    except (TypeError, ValueError):
        raise ConfigurationError(
            f"Unknown trials mode '{mode}'", config_key="trials"
        ) from None
    if count < 1:
        raise ConfigurationError("Trial count must be positive", config_key="trials")
    return count


def trial_seed(master_seed: int, channel: str, d: int, snr_db: float, trial: int) -> int:
    """Integer seed hashed from the trial's identity."""
    key = f"{master_seed}:{channel}:{d}:{float(snr_db)!r}:{trial}"
    return int(hashlib.sha256(key.encode()).hexdigest(), 16)


def trial_rng(
    master_seed: int, channel: str, d: int, snr_db: float, trial: int
) -> np.random.Generator:
    """Independent generator for one trial."""
    seed = trial_seed(master_seed, channel, d, snr_db, trial)
    return np.random.default_rng(np.random.SeedSequence(seed))


def _mean_and_stderr(samples: Sequence[float]) -> Tuple[float, float]:
    values = np.asarray(samples, dtype=float)
    mean = float(values.mean())
    if values.size < 2:
        return mean, 0.0
    return mean, float(values.std(ddof=1) / math.sqrt(values.size))


def _aggregate(
    channel: str,
    method: Estimator,
    d: int,
    snr_db: float,
    samples: List[TrialMetrics],
) -> AggregateRow:
    mean_mse, stderr_mse = _mean_and_stderr([m.mse for m in samples])
    mean_ser, stderr_ser = _mean_and_stderr([m.ser for m in samples])
    chosen = [m.chosen_d for m in samples if m.chosen_d is not None]
    return AggregateRow(
        channel=channel,
        estimator=method.value,
        d=d,
        snr_db=float(snr_db),
        trials=len(samples),
        mean_mse=mean_mse,
        stderr_mse=stderr_mse,
        mean_ser=mean_ser,
        stderr_ser=stderr_ser,
        mean_ber=float(np.mean([m.ber for m in samples])),
        mean_throughput=float(np.mean([m.throughput for m in samples])),
        mean_chosen_d=float(np.mean(chosen)) if chosen else None,
    )


def run_cell(
    config: SimConfig,
    d: int,
    snr_db: float,
    estimators: Optional[Iterable[Estimator]] = None,
) -> Dict[Estimator, AggregateRow]:
    """Run K(d) trials of one cell; every estimator sees the same trials."""
    methods = [Estimator(e) for e in (estimators or config.estimators)]
    channel = ChannelModel(config.channel)
    cell = {"channel": channel.value, "d": d, "snr_db": snr_db}

    try:
        pdp = pdp_for(
            channel,
            config.n,
            d,
            config.cp_length,
            config.tdl_decay_rate,
            config.symbol_duration_us,
        )
        lmmse_filter = None
        if Estimator.LMMSE in methods:
            alloc = ToneAllocation.for_generator(config.n, d)
            lmmse_filter = lmmse_filter_for(pdp, config, alloc, snr_db)

        samples: Dict[Estimator, List[TrialMetrics]] = {m: [] for m in methods}
        num_trials = trials_for(d, config.trials)
        for trial in range(num_trials):
            rng = trial_rng(config.master_seed, channel.value, d, snr_db, trial)
            outcome = run_trial(
                config,
                d,
                snr_db,
                rng,
                estimators=methods,
                pdp=pdp,
                lmmse_filter=lmmse_filter,
            )
            for method, metrics in outcome.items():
                samples[method].append(metrics)
    except SimulationException as e:
        raise SweepCellError(
            f"Cell failed: {e.message}",
            cell={**cell, "estimators": [m.value for m in methods]},
            details={"cause": e.code, **e.details},
        ) from e
    except Exception as e:
        raise SweepCellError(
            f"Cell failed: {str(e)}",
            cell={**cell, "estimators": [m.value for m in methods]},
        ) from e

    logger.info(
        f"Cell {channel.value} d={d} snr={snr_db:g} dB: {num_trials} trials done"
    )
    return {
        m: _aggregate(channel.value, m, d, snr_db, samples[m]) for m in methods
    }


def sweep(config: SimConfig) -> List[AggregateRow]:
    """Run the full grid and return rows ordered by (estimator, d, snr)."""
    run_metadata(config).log_start("Sweep")
    methods = [Estimator(e) for e in config.estimators]
    cells = [(d, snr) for d in config.d_grid for snr in config.snr_grid_db]
    logger.info(
        f"Sweeping {len(cells)} cells x {len(methods)} estimators "
        f"on {config.channel} with {config.workers} worker(s)"
    )

    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        futures = [
            executor.submit(run_cell, config, d, snr, methods) for d, snr in cells
        ]
        try:
            results = [future.result() for future in futures]
        except SweepCellError as e:
            for future in futures:
                future.cancel()
            logger.error(f"Sweep aborted at {e.cell}: {e.message}")
            raise

    by_cell = dict(zip(cells, results))
    return [by_cell[(d, snr)][m] for m in methods for d, snr in cells]


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(rows: Iterable[AggregateRow], path: Union[str, Path]) -> Path:
    """Write rows with a header; floats keep 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_format_value(data[column]) for column in CSV_COLUMNS])
            count += 1
    logger.info(f"Wrote {count} rows to {path}")
    return path


def _parse_value(column: str, text: str, line: int) -> Any:
    if column in _TEXT_COLUMNS:
        return text
    if column == "mean_chosen_d" and text == "":
        return None
    try:
        return int(text) if column in _INT_COLUMNS else float(text)
    except ValueError:
        raise ResultsFormatError(
            f"Bad value '{text}' in column '{column}' on line {line}",
            column=column,
        ) from None


def read_csv(path: Union[str, Path]) -> List[AggregateRow]:
    """Parse a results file written by ``write_csv``."""
    path = Path(path)
    with path.open("r", newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in CSV_COLUMNS:
            if column not in header:
                raise ResultsFormatError(
                    f"Results file {path} is missing column '{column}'",
                    column=column,
                )
        return [
            AggregateRow(
                **{
                    column: _parse_value(column, record[column] or "", line)
                    for column in CSV_COLUMNS
                }
            )
            for line, record in enumerate(reader, start=2)
        ]


def summarize(rows: Sequence[AggregateRow]) -> str:
    """Plain-text table of the headline metrics."""
    header = (
        f"{'channel':<8}{'estimator':<10}{'d':>5}{'snr_db':>8}{'trials':>8}"
        f"{'mse':>12}{'ser':>12}{'throughput':>12}{'chosen_d':>10}"
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        chosen = "" if row.mean_chosen_d is None else f"{row.mean_chosen_d:.1f}"
        lines.append(
            f"{row.channel:<8}{row.estimator:<10}{row.d:>5}{row.snr_db:>8g}"
            f"{row.trials:>8}{row.mean_mse:>12.4e}{row.mean_ser:>12.4e}"
            f"{row.mean_throughput:>12.4f}{chosen:>10}"
        )
    return "\n".join(lines)

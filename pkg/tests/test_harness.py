"""Tests for the Monte Carlo sweep driver and result files."""

import numpy as np
import pytest

from config.simulation_config import SimConfig
from src.core.exceptions import ConfigurationError, ResultsFormatError, SweepCellError
from src.services.estimators import Estimator
from src.services.harness import (
    CSV_COLUMNS,
    AggregateRow,
    read_csv,
    run_cell,
    summarize,
    sweep,
    trial_rng,
    trial_seed,
    trials_for,
    write_csv,
)


def _broken_prefix_config():
    """A validated config whose prefix is then zeroed; model_copy skips validation."""
    config = SimConfig.build(n=64, d_grid=[8], snr_grid_db=[5.0], trials="2")
    return config.model_copy(update={"n_cp": 0})


class TestTrialSchedule:
    @pytest.mark.parametrize(
        "d, expected", [(2, 300), (8, 300), (16, 200), (64, 100), (128, 100)]
    )
    def test_auto(self, d, expected):
        assert trials_for(d) == expected

    def test_fixed(self):
        """A fixed count applies to every d."""
        assert trials_for(2, "7") == 7
        assert trials_for(128, 7) == 7

    @pytest.mark.parametrize("mode", ["many", "0", -3])
    def test_bad_mode(self, mode):
        with pytest.raises(ConfigurationError) as exc:
            trials_for(8, mode)
        assert exc.value.config_key == "trials"


class TestSeeding:
    def test_seed_depends_on_identity(self):
        """Each coordinate of the trial identity changes the seed."""
        base = trial_seed(1, "tdl", 8, 10.0, 0)
        assert base == trial_seed(1, "tdl", 8, 10.0, 0)
        assert base != trial_seed(2, "tdl", 8, 10.0, 0)
        assert base != trial_seed(1, "itu", 8, 10.0, 0)
        assert base != trial_seed(1, "tdl", 16, 10.0, 0)
        assert base != trial_seed(1, "tdl", 8, 15.0, 0)
        assert base != trial_seed(1, "tdl", 8, 10.0, 1)

    def test_int_and_float_snr_agree(self):
        """10 and 10.0 name the same cell."""
        assert trial_seed(1, "tdl", 8, 10, 0) == trial_seed(1, "tdl", 8, 10.0, 0)

    def test_generators_repeat(self):
        a = trial_rng(5, "tdl", 8, 0.0, 3).standard_normal(4)
        b = trial_rng(5, "tdl", 8, 0.0, 3).standard_normal(4)
        np.testing.assert_array_equal(a, b)


class TestRunCell:
    def test_common_trials(self, small_config):
        """Every estimator is averaged over the same number of trials."""
        rows = run_cell(small_config, 8, 10.0)
        assert set(rows) == {Estimator.LS, Estimator.LMMSE, Estimator.SUBGROUP}
        assert {row.trials for row in rows.values()} == {4}
        assert rows[Estimator.SUBGROUP].mean_chosen_d is not None
        assert rows[Estimator.LS].mean_chosen_d is None

    def test_error_names_cell(self):
        """A channel that cannot be built reports the failing cell."""
        config = _broken_prefix_config()
        with pytest.raises(SweepCellError) as exc:
            run_cell(config, 8, 5.0)
        assert exc.value.cell["d"] == 8
        assert exc.value.cell["snr_db"] == 5.0
        assert exc.value.cell["channel"] == "tdl"


class TestSweep:
    def test_row_order(self, small_config):
        """Rows come estimator-major, then d, then SNR."""
        rows = sweep(small_config)
        assert len(rows) == 12
        keys = [(row.estimator, row.d, row.snr_db) for row in rows]
        assert keys[:4] == [("ls", 8, 0.0), ("ls", 8, 10.0), ("ls", 16, 0.0), ("ls", 16, 10.0)]
        assert [row.estimator for row in rows[::4]] == ["ls", "lmmse", "subgroup"]

    def test_workers_do_not_change_results(self, small_config):
        """Thread count only affects scheduling."""
        serial = sweep(small_config)
        parallel = sweep(small_config.model_copy(update={"workers": 3}))
        assert serial == parallel

    def test_cells_are_independent(self, small_config):
        """A cell's numbers do not depend on the rest of the grid."""
        full = sweep(small_config)
        alone = sweep(small_config.model_copy(update={"d_grid": [16]}))
        assert [row for row in full if row.d == 16] == alone

    def test_empty_grid(self, small_config):
        """No SNR points means no rows."""
        assert sweep(small_config.model_copy(update={"snr_grid_db": []})) == []

    def test_sweep_aborts_on_failing_cell(self):
        config = _broken_prefix_config()
        with pytest.raises(SweepCellError):
            sweep(config)


def _row(**overrides):
    values = dict(
        channel="tdl",
        estimator="subgroup",
        d=8,
        snr_db=10.0,
        trials=4,
        mean_mse=0.1 + 1e-17,
        stderr_mse=0.01,
        mean_ser=1 / 3,
        stderr_ser=0.0,
        mean_ber=0.2,
        mean_throughput=1.5,
        mean_chosen_d=8.0,
    )
    values.update(overrides)
    return AggregateRow(**values)


class TestResultsFile:
    def test_header_and_rows(self, tmp_path):
        path = write_csv([_row(), _row(estimator="ls", mean_chosen_d=None)], tmp_path / "out.csv")
        lines = path.read_text().split("\n")
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 4  # header, two rows, trailing newline
        assert lines[2].endswith(",")

    def test_read_back(self, tmp_path):
        """Floats survive the file exactly and an empty chosen_d reads as None."""
        rows = [_row(), _row(estimator="ls", mean_chosen_d=None)]
        assert read_csv(write_csv(rows, tmp_path / "a" / "out.csv")) == rows

    def test_header_only(self, tmp_path):
        path = write_csv([], tmp_path / "empty.csv")
        assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
        assert read_csv(path) == []

    def test_missing_column(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("channel,estimator,d\ntdl,ls,8\n")
        with pytest.raises(ResultsFormatError) as exc:
            read_csv(path)
        assert exc.value.column == "snr_db"

    def test_bad_value(self, tmp_path):
        path = write_csv([_row()], tmp_path / "out.csv")
        path.write_text(path.read_text().replace("tdl,subgroup,8", "tdl,subgroup,eight"))
        with pytest.raises(ResultsFormatError) as exc:
            read_csv(path)
        assert exc.value.column == "d"

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_csv(tmp_path / "nope.csv")

    def test_sweep_file_is_reproducible(self, small_config, tmp_path):
        """Two runs with one seed give byte-identical files."""
        first = write_csv(sweep(small_config), tmp_path / "first.csv")
        second = write_csv(sweep(small_config), tmp_path / "second.csv")
        assert first.read_bytes() == second.read_bytes()
        assert len(first.read_text().splitlines()) == 13


class TestSummary:
    def test_table(self):
        text = summarize([_row(), _row(estimator="ls", mean_chosen_d=None)])
        lines = text.splitlines()
        assert lines[0].split() == [
            "channel",
            "estimator",
            "d",
            "snr_db",
            "trials",
            "mse",
            "ser",
            "throughput",
            "chosen_d",
        ]
        assert "subgroup" in lines[2] and "8.0" in lines[2]
        assert len(lines) == 4

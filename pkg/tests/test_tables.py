"""Delimited-table round trips for trajectories, diagnostics, and sweeps."""

import numpy as np
import pytest

from polyham import (
    DiagnosticsSeries,
    MeasurementModel,
    ParseError,
    SimulationConfig,
    build_artifact,
    run_trajectory,
)
from polyham.systems import logistic
from polyham.tables import (
    read_diagnostics_table,
    read_trajectory_table,
    write_diagnostics_table,
    write_sweep_table,
    write_trajectory_table,
)


def sample_result(mode="exact", seed=0):
    artifact = build_artifact(logistic(), c=1.0)
    model = (
        MeasurementModel(mode="exact")
        if mode == "exact"
        else MeasurementModel(mode=mode, m=25.0, rng_seed=seed)
    )
    config = SimulationConfig(dt=1e-2, t_final=0.5, model=model, record_stride=10)
    return run_trajectory(artifact, np.array([0.1]), config, seed=seed)


class TestTrajectoryTables:
    def test_header_and_round_trip(self, tmp_path):
        result = sample_result()
        path = tmp_path / "traj_000.csv"
        write_trajectory_table(path, result, "abc123")
        lines = path.read_text().splitlines()
        assert lines[0] == "# manifest=abc123"
        assert lines[1].startswith("step,t_prime,t_physical,x1,norm,re0,im0")
        loaded = read_trajectory_table(path)
        assert np.array_equal(loaded.states, result.states)
        assert loaded.times.tolist() == result.times.tolist()
        assert loaded.physical_times.tolist() == result.physical_times.tolist()
        assert np.array_equal(loaded.positions, result.positions)
        assert loaded.failure is None

    def test_stochastic_round_trip_is_exact(self, tmp_path):
        result = sample_result(mode="gaussian", seed=3)
        path = tmp_path / "traj.csv"
        write_trajectory_table(path, result, "d" * 8)
        loaded = read_trajectory_table(path)
        assert np.array_equal(loaded.states, result.states)
        for a, b in zip(loaded.classical, result.classical):
            assert a == b

    def test_failure_comment_preserved(self, tmp_path):
        result = sample_result()
        broken = type(result)(
            states=result.states,
            classical=result.classical,
            seed=result.seed,
            failure="decode floor at step 7",
        )
        path = tmp_path / "traj.csv"
        write_trajectory_table(path, broken, "e" * 8)
        assert "# failure=decode floor at step 7" in path.read_text()
        assert read_trajectory_table(path).failure == "decode floor at step 7"

    def test_amplitude_free_table_cannot_be_reloaded(self, tmp_path):
        result = sample_result()
        path = tmp_path / "traj.csv"
        write_trajectory_table(path, result, "f" * 8, amplitudes=False)
        header = path.read_text().splitlines()[1]
        assert "re0" not in header
        with pytest.raises(ParseError, match="amplitude"):
            read_trajectory_table(path)


class TestDiagnosticsTables:
    def make_series(self, branch):
        return DiagnosticsSeries(
            times=np.array([0.0, 0.5, 1.0]),
            entropy=np.array([0.0, 0.1, 0.3]),
            trace_distance=np.array([0.0, 0.2, 0.4]),
            branch_time=branch,
        )

    def test_round_trip_with_branch(self, tmp_path):
        series = self.make_series(0.5)
        path = tmp_path / "diagnostics.csv"
        write_diagnostics_table(path, series, "aa")
        text = path.read_text()
        assert text.startswith("# manifest=aa\n")
        assert "# branch_time=0.5" in text
        loaded = read_diagnostics_table(path)
        assert np.array_equal(loaded.times, series.times)
        assert np.array_equal(loaded.entropy, series.entropy)
        assert np.array_equal(loaded.trace_distance, series.trace_distance)
        assert loaded.branch_time == 0.5

    def test_round_trip_without_branch(self, tmp_path):
        path = tmp_path / "diagnostics.csv"
        write_diagnostics_table(path, self.make_series(None), "bb")
        assert "# branch_time=none" in path.read_text()
        assert read_diagnostics_table(path).branch_time is None


class TestSweepTables:
    def test_rows_and_none_marker(self, tmp_path):
        path = tmp_path / "sweep.csv"
        write_sweep_table(path, [(1e3, 12.5), (1e5, None)], "cc")
        lines = path.read_text().splitlines()
        assert lines[0] == "# manifest=cc"
        assert lines[1] == "s,branch_time"
        assert lines[2].startswith("1000")
        assert lines[3].endswith("none")
